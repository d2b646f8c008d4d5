#pragma once

#include "refgame/game/round.hpp"
#include "refgame/game/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace refgame::events {

enum class Actor { Director, Matcher, System };

std::string_view to_string(Actor actor);
Actor parse_actor(std::string_view text);
Actor actor_for(Role role);

/// Inline referring-expression tag emitted by scripted directors: `phrase`
/// occurs verbatim in the message text and describes grid `position`.
struct ReTag {
  int position = 0;
  std::string phrase;
  bool operator==(const ReTag&) const = default;
};

struct ChatMessage {
  std::string text;
  std::vector<ReTag> tags;
  bool operator==(const ChatMessage&) const = default;
};
struct TypingStart {
  bool operator==(const TypingStart&) const = default;
};
struct TypingStop {
  bool operator==(const TypingStop&) const = default;
};
struct Placement {
  int tile = 0;
  int position = 0;
  bool operator==(const Placement&) const = default;
};
struct Clear {
  int position = 0;
  bool operator==(const Clear&) const = default;
};
struct Submit {
  bool operator==(const Submit&) const = default;
};
struct RoundStart {
  int round = 0;
  bool operator==(const RoundStart&) const = default;
};
struct RoundFeedback {
  int round = 0;
  game::RoundResult result;
  bool operator==(const RoundFeedback&) const = default;
};
/// Inter-round attention check acknowledgment.
struct AttentionAck {
  int round = 0;
  bool operator==(const AttentionAck&) const = default;
};

/// Post-task questionnaire. Likert items are 1-5, human-likeness is 0-100.
struct SurveyResponse {
  int partner_capability = 0;
  int partner_helpfulness = 0;
  int partner_understanding = 0;
  int partner_adaptability = 0;
  int collaboration_improvement = 0;
  int perceived_human_likeness = 0;
  int ai_familiarity = 0;
  int ai_usage_frequency = 0;
  std::string free_text;

  /// Throws std::invalid_argument naming the first out-of-range item.
  void validate() const;
  bool operator==(const SurveyResponse&) const = default;
};

struct Abort {
  int round = 0;  // 0 when the whole session is abandoned
  std::string reason;
  bool operator==(const Abort&) const = default;
};

using Payload = std::variant<ChatMessage, TypingStart, TypingStop, Placement, Clear, Submit,
                             RoundStart, RoundFeedback, AttentionAck, SurveyResponse, Abort>;

std::string_view payload_type(const Payload& payload);

struct TranscriptEvent {
  std::string session_id;
  std::int64_t seq = 0;
  std::int64_t timestamp_ms = 0;
  Actor actor = Actor::System;
  Payload payload;

  bool operator==(const TranscriptEvent&) const = default;
};

class EventFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json payload_to_json(const Payload& payload);
/// Strict: unknown types, missing fields and wrong field types are rejected.
Payload payload_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TranscriptEvent& event);
TranscriptEvent event_from_json(const nlohmann::json& j);

/// One event per line, compact form. Stable across runs for identical events.
std::string serialize(const TranscriptEvent& event);
TranscriptEvent deserialize(const std::string& line);

void to_json(nlohmann::json& j, const SurveyResponse& s);
void from_json(const nlohmann::json& j, SurveyResponse& s);

}  // namespace refgame::events
