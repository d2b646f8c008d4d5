#include "refgame/corpus/extraction.hpp"

#include "refgame/agents/participant.hpp"
#include "refgame/agents/replies.hpp"
#include "refgame/metrics/text.hpp"
#include "refgame/resources.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace refgame::corpus {

namespace {

using nlohmann::json;
using agents::ReplyError;

void replace_all(std::string& text, std::string_view from, std::string_view to) {
  for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

void append_phrase(std::string& re, const std::string& phrase) {
  if (!re.empty()) re += kPhraseSeparator;
  re += phrase;
}

ReSet empty_set(const Dialogue& dialogue) {
  ReSet out;
  for (const auto& id : dialogue.targets) out[id] = "";
  return out;
}

std::string object_key(int k) { return "object_#" + std::to_string(k); }

}  // namespace

ReSet extract_res_tagged(const Dialogue& dialogue) {
  ReSet out = empty_set(dialogue);
  bool tagged = false;
  for (const auto& u : dialogue.utterances) {
    if (u.actor != Role::Director) continue;
    for (const auto& tag : u.tags) {
      if (tag.position < 1 || tag.position > static_cast<int>(dialogue.targets.size())) {
        throw ExtractionError("tag position " + std::to_string(tag.position) + " outside the grid");
      }
      append_phrase(out[dialogue.targets[tag.position - 1]], tag.phrase);
      tagged = true;
    }
  }
  if (!tagged) {
    throw ExtractionError("dialogue " + dialogue.pair_id + " round " + std::to_string(dialogue.round_index) +
                          " carries no referring-expression tags");
  }
  return out;
}

std::string transcript_text(const Dialogue& dialogue) {
  std::string out;
  for (const auto& u : dialogue.utterances) {
    if (!out.empty()) out += '\n';
    out += u.actor == Role::Director ? "Director: " : "Matcher: ";
    out += u.text;
  }
  return out;
}

std::string extraction_prompt(const Dialogue& dialogue, int n_objects) {
  std::string text(resources::re_extraction_prompt());
  while (!text.empty() && (text.back() == '\n' || text.back() == ' ')) text.pop_back();
  replace_all(text, "<num_objects>", std::to_string(n_objects));
  replace_all(text, "<transcript>", transcript_text(dialogue));
  return text;
}

ReSet parse_extraction_reply(std::string_view raw, const Dialogue& dialogue, int n_objects) {
  json j;
  try {
    j = json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error&) {
    throw ReplyError(ReplyError::Kind::Malformed, "Output only the JSON object, with no additional text");
  }
  if (!j.is_object()) throw ReplyError(ReplyError::Kind::Malformed, "reply must be a JSON object");
  if (static_cast<int>(dialogue.targets.size()) < n_objects) {
    throw ExtractionError("dialogue has fewer targets than objects requested");
  }
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (int k = 1; k <= n_objects && !known; ++k) known = key == object_key(k);
    if (!known) throw ReplyError(ReplyError::Kind::Malformed, "unexpected key \"" + key + "\"");
  }
  ReSet out;
  for (int k = 1; k <= n_objects; ++k) {
    const auto key = object_key(k);
    if (!j.contains(key)) throw ReplyError(ReplyError::Kind::Malformed, "missing key \"" + key + "\"");
    const auto& v = j.at(key);
    std::string re;
    if (v.is_string()) {
      re = v.get<std::string>();
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_string()) throw ReplyError(ReplyError::Kind::Malformed, key + " must hold strings");
        append_phrase(re, e.get<std::string>());
      }
    } else if (!v.is_null()) {
      throw ReplyError(ReplyError::Kind::Malformed, key + " must be a string");
    }
    out[dialogue.targets[static_cast<std::size_t>(k - 1)]] = re;
  }
  return out;
}

ReSet extract_res_llm(const Dialogue& dialogue, int n_objects, agents::CompletionProvider& provider,
                      const std::string& model_id, int max_attempts) {
  agents::CompletionRequest request;
  request.model_id = model_id;
  request.messages.push_back({"user", extraction_prompt(dialogue, n_objects), std::nullopt});
  std::vector<std::string> errors;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const std::string raw = provider.complete(request);
    try {
      return parse_extraction_reply(raw, dialogue, n_objects);
    } catch (const ReplyError& e) {
      errors.push_back(std::string(agents::to_string(e.kind())) + ": " + e.what());
      request.messages.push_back({"assistant", raw, std::nullopt});
      request.messages.push_back({"user", std::string("Your reply was rejected: ") + e.what() +
                                              ". Output only the JSON object.",
                                  std::nullopt});
    }
  }
  throw agents::RetriesExhausted(max_attempts, std::move(errors));
}

std::string ScriptedExtractionProvider::complete(const agents::CompletionRequest& request) {
  if (request.messages.empty()) throw agents::ProviderError("empty extraction request");
  const std::string& prompt = request.messages.front().text;
  static const std::regex objects(R"(There are exactly (\d+) target objects)");
  std::smatch m;
  if (!std::regex_search(prompt, m, objects)) throw agents::ProviderError("not an extraction prompt");
  const int n = std::stoi(m[1].str());

  static const std::regex line_re(
      R"(^Director: (?:Basket (\d+): |Let me clarify basket (\d+) again: )(.*)\.$)");
  std::vector<std::string> res(static_cast<std::size_t>(n));
  std::istringstream in(prompt);
  std::string line;
  while (std::getline(in, line)) {
    if (!std::regex_match(line, m, line_re)) continue;
    const int k = std::stoi(m[1].matched ? m[1].str() : m[2].str());
    if (k >= 1 && k <= n) append_phrase(res[static_cast<std::size_t>(k - 1)], m[3].str());
  }
  json out = json::object();
  for (int k = 1; k <= n; ++k) out[object_key(k)] = res[static_cast<std::size_t>(k - 1)];
  return out.dump();
}

double validate_extraction(const ReSet& predicted, const ReSet& gold) {
  if (predicted.size() != gold.size()) throw ExtractionError("predicted and gold basket sets differ");
  if (gold.empty()) throw ExtractionError("nothing to validate");
  double total = 0.0;
  for (const auto& [id, gold_re] : gold) {
    auto it = predicted.find(id);
    if (it == predicted.end()) throw ExtractionError("basket " + id + " missing from prediction");
    total += metrics::rouge_l_f1(gold_re, it->second);
  }
  return total / static_cast<double>(gold.size());
}

void export_res_jsonl(const std::filesystem::path& path, std::span<const ReRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : records) {
    out << json{{"pair_id", r.pair_id}, {"round", r.round_index}, {"res", r.res}}.dump() << '\n';
  }
}

std::vector<ReRecord> import_res_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<ReRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    out.push_back(ReRecord{j.at("pair_id").get<std::string>(), j.at("round").get<int>(),
                           j.at("res").get<ReSet>()});
  }
  return out;
}

}  // namespace refgame::corpus
