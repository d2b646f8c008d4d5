#include "refgame/agents/spec.hpp"

#include <stdexcept>

namespace refgame::agents {

std::string_view to_string(ParticipantKind kind) {
  switch (kind) {
    case ParticipantKind::Human: return "human";
    case ParticipantKind::Llm: return "llm";
    case ParticipantKind::Scripted: return "scripted";
  }
  return "scripted";
}

std::string_view to_string(ReasoningEffort effort) {
  switch (effort) {
    case ReasoningEffort::None: return "none";
    case ReasoningEffort::Low: return "low";
    case ReasoningEffort::Medium: return "medium";
    case ReasoningEffort::High: return "high";
  }
  return "none";
}

ParticipantKind parse_participant_kind(std::string_view text) {
  if (text == "human") return ParticipantKind::Human;
  if (text == "llm") return ParticipantKind::Llm;
  if (text == "scripted") return ParticipantKind::Scripted;
  throw std::invalid_argument("unknown participant kind: " + std::string(text));
}

ReasoningEffort parse_reasoning_effort(std::string_view text) {
  if (text == "none") return ReasoningEffort::None;
  if (text == "low") return ReasoningEffort::Low;
  if (text == "medium") return ReasoningEffort::Medium;
  if (text == "high") return ReasoningEffort::High;
  throw std::invalid_argument("unknown reasoning effort: " + std::string(text));
}

void ParticipantSpec::validate() const {
  if ((kind == ParticipantKind::Llm) != model_id.has_value()) {
    throw std::invalid_argument(std::string(refgame::to_string(role)) +
                                ": model_id must be set exactly when kind is llm");
  }
  if (behavior.p < 0.0 || behavior.p > 1.0) {
    throw std::invalid_argument("behavior probability must lie in [0, 1]");
  }
  if (mock_malformed_rate < 0.0 || mock_malformed_rate > 1.0) {
    throw std::invalid_argument("mock_malformed_rate must lie in [0, 1]");
  }
}

void to_json(nlohmann::json& j, const BehaviorProfile& b) {
  switch (b.kind) {
    case BehaviorProfile::Kind::Perfect: j = {{"profile", "perfect"}}; break;
    case BehaviorProfile::Kind::Noisy: j = {{"profile", "noisy"}, {"p", b.p}}; break;
    case BehaviorProfile::Kind::Terse: j = {{"profile", "terse"}}; break;
  }
}

void from_json(const nlohmann::json& j, BehaviorProfile& b) {
  const auto name = j.value("profile", std::string("perfect"));
  if (name == "perfect") {
    b = {BehaviorProfile::Kind::Perfect, 0.0};
  } else if (name == "noisy") {
    b = {BehaviorProfile::Kind::Noisy, j.at("p").get<double>()};
  } else if (name == "terse") {
    b = {BehaviorProfile::Kind::Terse, 0.0};
  } else {
    throw std::invalid_argument("unknown behavior profile: " + name);
  }
}

void to_json(nlohmann::json& j, const ParticipantSpec& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)}, {"role", refgame::to_string(s.role)}};
  if (s.model_id) j["model_id"] = *s.model_id;
  if (s.reasoning_effort) j["reasoning_effort"] = to_string(*s.reasoning_effort);
  j["behavior"] = s.behavior;
  if (s.mock_malformed_rate > 0.0) j["mock_malformed_rate"] = s.mock_malformed_rate;
}

void from_json(const nlohmann::json& j, ParticipantSpec& s) {
  s = ParticipantSpec{};
  s.kind = parse_participant_kind(j.value("kind", std::string("scripted")));
  if (j.contains("role")) s.role = parse_role(j.at("role").get<std::string>());
  if (j.contains("model_id")) s.model_id = j.at("model_id").get<std::string>();
  if (j.contains("reasoning_effort")) {
    s.reasoning_effort = parse_reasoning_effort(j.at("reasoning_effort").get<std::string>());
  }
  if (j.contains("behavior")) s.behavior = j.at("behavior").get<BehaviorProfile>();
  s.mock_malformed_rate = j.value("mock_malformed_rate", 0.0);
}

}  // namespace refgame::agents
