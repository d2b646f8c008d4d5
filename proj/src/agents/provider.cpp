#include "refgame/agents/provider.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

namespace refgame::agents {

using nlohmann::json;

json to_wire(const CompletionRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    json msg{{"role", m.role}, {"text", m.text}};
    if (m.image_ref) msg["image_ref"] = *m.image_ref;
    messages.push_back(std::move(msg));
  }
  json j{{"model_id", request.model_id}, {"messages", messages}};
  if (request.reasoning_effort) j["reasoning_effort"] = to_string(*request.reasoning_effort);
  return j;
}

CompletionRequest request_from_wire(const json& j) {
  CompletionRequest r;
  r.model_id = j.at("model_id").get<std::string>();
  for (const auto& m : j.at("messages")) {
    ProviderMessage msg{m.at("role").get<std::string>(), m.at("text").get<std::string>(), std::nullopt};
    if (m.contains("image_ref")) msg.image_ref = m.at("image_ref").get<std::string>();
    r.messages.push_back(std::move(msg));
  }
  if (j.contains("reasoning_effort")) {
    r.reasoning_effort = parse_reasoning_effort(j.at("reasoning_effort").get<std::string>());
  }
  return r;
}

std::string fingerprint(const CompletionRequest& request) {
  const std::string canonical = to_wire(request).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<ProviderMessage> to_messages(const PromptBundle& bundle) {
  std::vector<ProviderMessage> out;
  out.push_back({"system", bundle.system_text, std::nullopt});
  for (const auto& m : bundle.context_messages) out.push_back({"user", m.text, m.image_ref});
  const Role self = bundle.role;
  for (const auto& turn : bundle.history) {
    if (turn.speaker == self) {
      out.push_back({"assistant", turn.text, std::nullopt});
    } else {
      const std::string who = turn.speaker == Role::Director ? "DIRECTOR" : "MATCHER";
      out.push_back({"user", who + ": " + turn.text, std::nullopt});
    }
  }
  if (bundle.trailing_system) out.push_back({"system", *bundle.trailing_system, std::nullopt});
  return out;
}

ReplayProvider::ReplayProvider(const std::filesystem::path& jsonl) {
  std::ifstream in(jsonl);
  if (!in) throw ProviderError("cannot open replay file " + jsonl.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    add(j.at("fingerprint").get<std::string>(), j.at("response").get<std::string>());
  }
}

void ReplayProvider::add(const std::string& fp, std::string response) {
  std::lock_guard lock(mutex_);
  responses_[fp] = std::move(response);
}

std::size_t ReplayProvider::size() const {
  std::lock_guard lock(mutex_);
  return responses_.size();
}

std::string ReplayProvider::complete(const CompletionRequest& request) {
  const auto fp = fingerprint(request);
  std::lock_guard lock(mutex_);
  auto it = responses_.find(fp);
  if (it == responses_.end()) throw ProviderError("no recorded response for request " + fp);
  return it->second;
}

RecordingProvider::RecordingProvider(CompletionProvider& inner, std::filesystem::path jsonl)
    : inner_(inner), path_(std::move(jsonl)) {}

std::string RecordingProvider::complete(const CompletionRequest& request) {
  std::string response = inner_.complete(request);
  json record{{"fingerprint", fingerprint(request)}, {"request", to_wire(request)}, {"response", response}};
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app);
  out << record.dump() << '\n';
  return response;
}

}  // namespace refgame::agents
