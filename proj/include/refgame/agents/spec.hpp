#pragma once

#include "refgame/game/types.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace refgame::agents {

enum class ParticipantKind { Human, Llm, Scripted };
enum class ReasoningEffort { None, Low, Medium, High };

std::string_view to_string(ParticipantKind kind);
std::string_view to_string(ReasoningEffort effort);
ParticipantKind parse_participant_kind(std::string_view text);
ReasoningEffort parse_reasoning_effort(std::string_view text);

/// Behaviour of a scripted agent, also used to drive mock LLM providers.
///  - perfect: always unique descriptions / always the matching tile
///  - noisy(p): director under-specifies first descriptions, matcher picks a
///    wrong tile, each with probability p
///  - terse: director shortens descriptions round over round
struct BehaviorProfile {
  enum class Kind { Perfect, Noisy, Terse };
  Kind kind = Kind::Perfect;
  double p = 0.0;

  bool operator==(const BehaviorProfile&) const = default;
};

struct ParticipantSpec {
  ParticipantKind kind = ParticipantKind::Scripted;
  Role role = Role::Director;
  std::optional<std::string> model_id;
  std::optional<ReasoningEffort> reasoning_effort;
  BehaviorProfile behavior;
  /// Mock mode only: probability that a mock LLM reply is corrupted and has
  /// to be retried.
  double mock_malformed_rate = 0.0;

  /// Throws std::invalid_argument when model_id presence disagrees with kind.
  void validate() const;

  bool operator==(const ParticipantSpec&) const = default;
};

void to_json(nlohmann::json& j, const BehaviorProfile& b);
void from_json(const nlohmann::json& j, BehaviorProfile& b);
void to_json(nlohmann::json& j, const ParticipantSpec& s);
void from_json(const nlohmann::json& j, ParticipantSpec& s);

}  // namespace refgame::agents
