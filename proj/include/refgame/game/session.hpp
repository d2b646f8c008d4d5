#pragma once

#include "refgame/agents/spec.hpp"
#include "refgame/events/event.hpp"
#include "refgame/game/catalog.hpp"
#include "refgame/game/round.hpp"
#include "refgame/game/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace refgame::game {

enum class PromptVariant { Default, Simple };

std::string_view to_string(PromptVariant variant);
PromptVariant parse_prompt_variant(std::string_view text);

struct SessionConfig {
  Condition condition = Condition::AA;
  int n_rounds = 4;
  std::uint64_t seed = 0;
  BasketCatalog catalog = default_catalog();
  int turn_cap = 60;
  agents::ParticipantSpec director{.role = Role::Director};
  agents::ParticipantSpec matcher{.role = Role::Matcher};
  PromptVariant prompt_variant = PromptVariant::Default;
  /// Total attempts per agent turn before the round is aborted.
  int max_attempts = 3;
  int provider_timeout_s = 120;
  /// Free-form label for sweep variants ("Default", "Low Reasoning", ...).
  std::string variant = "Default";

  void validate() const;
  const agents::ParticipantSpec& participant(Role role) const {
    return role == Role::Director ? director : matcher;
  }

  bool operator==(const SessionConfig&) const = default;
};

void to_json(nlohmann::json& j, const SessionConfig& c);
void from_json(const nlohmann::json& j, SessionConfig& c);

/// One pair's whole experiment.
struct Session {
  std::string id;
  SessionConfig config;
  std::vector<RoundState> rounds;  // started rounds, index k-1 for round k
  std::vector<events::TranscriptEvent> log;

  int pending_rounds() const { return config.n_rounds - static_cast<int>(rounds.size()); }
  bool has_current_round() const { return !rounds.empty(); }
  RoundState& current_round() { return rounds.back(); }
  const RoundState& current_round() const { return rounds.back(); }
  bool complete() const {
    return static_cast<int>(rounds.size()) == config.n_rounds && rounds.back().finished();
  }
};

Session new_session(SessionConfig config, std::string id = {});

/// Starts round `round_index` (1-based). Permutations are a pure function of
/// (seed, round_index).
const RoundState& start_round(Session& session, int round_index);

/// The permutations start_round would produce, without touching a session.
RoundState make_round(const SessionConfig& config, int round_index);

}  // namespace refgame::game
