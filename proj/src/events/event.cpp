#include "refgame/events/event.hpp"

#include <stdexcept>

namespace refgame::events {

namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int int_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw EventFormatError(std::string("field '") + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

std::string string_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw EventFormatError(std::string("field '") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

void check_range(const char* name, int value, int lo, int hi) {
  if (value < lo || value > hi) {
    throw std::invalid_argument(std::string(name) + " must lie in " + std::to_string(lo) + "-" +
                                std::to_string(hi) + ", got " + std::to_string(value));
  }
}

}  // namespace

std::string_view to_string(Actor actor) {
  switch (actor) {
    case Actor::Director: return "director";
    case Actor::Matcher: return "matcher";
    case Actor::System: return "system";
  }
  return "system";
}

Actor parse_actor(std::string_view text) {
  if (text == "director") return Actor::Director;
  if (text == "matcher") return Actor::Matcher;
  if (text == "system") return Actor::System;
  throw EventFormatError("unknown actor: " + std::string(text));
}

Actor actor_for(Role role) { return role == Role::Director ? Actor::Director : Actor::Matcher; }

void SurveyResponse::validate() const {
  check_range("partner_capability", partner_capability, 1, 5);
  check_range("partner_helpfulness", partner_helpfulness, 1, 5);
  check_range("partner_understanding", partner_understanding, 1, 5);
  check_range("partner_adaptability", partner_adaptability, 1, 5);
  check_range("collaboration_improvement", collaboration_improvement, 1, 5);
  check_range("perceived_human_likeness", perceived_human_likeness, 0, 100);
  check_range("ai_familiarity", ai_familiarity, 1, 5);
  check_range("ai_usage_frequency", ai_usage_frequency, 1, 5);
}

void to_json(json& j, const SurveyResponse& s) {
  j = json{{"partner_capability", s.partner_capability},
           {"partner_helpfulness", s.partner_helpfulness},
           {"partner_understanding", s.partner_understanding},
           {"partner_adaptability", s.partner_adaptability},
           {"collaboration_improvement", s.collaboration_improvement},
           {"perceived_human_likeness", s.perceived_human_likeness},
           {"ai_familiarity", s.ai_familiarity},
           {"ai_usage_frequency", s.ai_usage_frequency},
           {"free_text", s.free_text}};
}

void from_json(const json& j, SurveyResponse& s) {
  s.partner_capability = int_field(j, "partner_capability");
  s.partner_helpfulness = int_field(j, "partner_helpfulness");
  s.partner_understanding = int_field(j, "partner_understanding");
  s.partner_adaptability = int_field(j, "partner_adaptability");
  s.collaboration_improvement = int_field(j, "collaboration_improvement");
  s.perceived_human_likeness = int_field(j, "perceived_human_likeness");
  s.ai_familiarity = int_field(j, "ai_familiarity");
  s.ai_usage_frequency = int_field(j, "ai_usage_frequency");
  s.free_text = j.contains("free_text") ? string_field(j, "free_text") : std::string();
}

std::string_view payload_type(const Payload& payload) {
  return std::visit(overloaded{
                        [](const ChatMessage&) { return "ChatMessage"; },
                        [](const TypingStart&) { return "TypingStart"; },
                        [](const TypingStop&) { return "TypingStop"; },
                        [](const Placement&) { return "Placement"; },
                        [](const Clear&) { return "Clear"; },
                        [](const Submit&) { return "Submit"; },
                        [](const RoundStart&) { return "RoundStart"; },
                        [](const RoundFeedback&) { return "RoundFeedback"; },
                        [](const AttentionAck&) { return "AttentionAck"; },
                        [](const SurveyResponse&) { return "SurveyResponse"; },
                        [](const Abort&) { return "Abort"; },
                    },
                    payload);
}

json payload_to_json(const Payload& payload) {
  json j = std::visit(
      overloaded{
          [](const ChatMessage& p) {
            json out{{"text", p.text}};
            if (!p.tags.empty()) {
              json tags = json::array();
              for (const auto& t : p.tags) tags.push_back({{"position", t.position}, {"phrase", t.phrase}});
              out["tags"] = tags;
            }
            return out;
          },
          [](const TypingStart&) { return json::object(); },
          [](const TypingStop&) { return json::object(); },
          [](const Placement& p) { return json{{"tile", p.tile}, {"position", p.position}}; },
          [](const Clear& p) { return json{{"position", p.position}}; },
          [](const Submit&) { return json::object(); },
          [](const RoundStart& p) { return json{{"round", p.round}}; },
          [](const RoundFeedback& p) { return json{{"round", p.round}, {"result", p.result}}; },
          [](const AttentionAck& p) { return json{{"round", p.round}}; },
          [](const SurveyResponse& p) { return json{{"response", p}}; },
          [](const Abort& p) { return json{{"round", p.round}, {"reason", p.reason}}; },
      },
      payload);
  j["type"] = payload_type(payload);
  return j;
}

Payload payload_from_json(const json& j) {
  if (!j.is_object()) throw EventFormatError("payload must be an object");
  const std::string type = string_field(j, "type");
  if (type == "ChatMessage") {
    ChatMessage m{string_field(j, "text"), {}};
    if (m.text.empty()) throw EventFormatError("chat text must be non-empty");
    if (j.contains("tags")) {
      if (!j.at("tags").is_array()) throw EventFormatError("tags must be an array");
      for (const auto& t : j.at("tags")) {
        m.tags.push_back({int_field(t, "position"), string_field(t, "phrase")});
      }
    }
    return m;
  }
  if (type == "TypingStart") return TypingStart{};
  if (type == "TypingStop") return TypingStop{};
  if (type == "Placement") return Placement{int_field(j, "tile"), int_field(j, "position")};
  if (type == "Clear") return Clear{int_field(j, "position")};
  if (type == "Submit") return Submit{};
  if (type == "RoundStart") return RoundStart{int_field(j, "round")};
  if (type == "RoundFeedback") {
    try {
      return RoundFeedback{int_field(j, "round"), j.at("result").get<game::RoundResult>()};
    } catch (const json::exception& e) {
      throw EventFormatError(std::string("bad feedback: ") + e.what());
    }
  }
  if (type == "AttentionAck") return AttentionAck{int_field(j, "round")};
  if (type == "SurveyResponse") {
    if (!j.contains("response") || !j.at("response").is_object()) {
      throw EventFormatError("field 'response' must be an object");
    }
    return j.at("response").get<SurveyResponse>();
  }
  if (type == "Abort") {
    return Abort{j.contains("round") ? int_field(j, "round") : 0, string_field(j, "reason")};
  }
  throw EventFormatError("unknown payload type: " + type);
}

json to_json(const TranscriptEvent& e) {
  return json{{"session_id", e.session_id},
              {"seq", e.seq},
              {"timestamp", e.timestamp_ms},
              {"actor", to_string(e.actor)},
              {"payload", payload_to_json(e.payload)}};
}

TranscriptEvent event_from_json(const json& j) {
  if (!j.is_object()) throw EventFormatError("event must be an object");
  TranscriptEvent e;
  e.session_id = string_field(j, "session_id");
  if (!j.contains("seq") || !j.at("seq").is_number_integer()) throw EventFormatError("bad seq");
  e.seq = j.at("seq").get<std::int64_t>();
  if (!j.contains("timestamp") || !j.at("timestamp").is_number_integer()) {
    throw EventFormatError("bad timestamp");
  }
  e.timestamp_ms = j.at("timestamp").get<std::int64_t>();
  e.actor = parse_actor(string_field(j, "actor"));
  if (!j.contains("payload")) throw EventFormatError("missing payload");
  e.payload = payload_from_json(j.at("payload"));
  return e;
}

std::string serialize(const TranscriptEvent& event) { return to_json(event).dump(); }

TranscriptEvent deserialize(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw EventFormatError(std::string("unparseable event: ") + e.what());
  }
  return event_from_json(j);
}

}  // namespace refgame::events
