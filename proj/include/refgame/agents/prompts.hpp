#pragma once

#include "refgame/game/session.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace refgame::agents {

struct ContextMessage {
  std::string text;
  std::optional<std::string> image_ref;
  bool operator==(const ContextMessage&) const = default;
};

struct ChatTurn {
  Role speaker;
  std::string text;
  bool operator==(const ChatTurn&) const = default;
};

/// Everything an LLM participant sees for one turn. `trailing_system` holds
/// per-turn system text placed after the chat history (the matcher's
/// sequence-state message).
struct PromptBundle {
  Role role = Role::Director;
  std::string system_text;
  std::vector<ContextMessage> context_messages;
  std::vector<ChatTurn> history;
  std::optional<std::string> trailing_system;

  bool operator==(const PromptBundle&) const = default;
};

struct SequenceSlot {
  int position = 0;
  std::optional<int> candidate_index;
  std::optional<std::string> image;
  std::optional<int> original_position;
};

/// Injected every matcher turn: the 12-slot sequence in two aligned forms.
struct SequenceStateMessage {
  std::vector<std::optional<int>> sequence_candidate_indices;
  std::vector<SequenceSlot> sequence_slots;

  nlohmann::json to_json() const;
};

SequenceStateMessage sequence_state(const game::RoundState& round, const game::BasketCatalog& catalog);

/// Image asset ids for the prebuilt composites of a round.
std::string director_composite_ref(int round_index);
std::string matcher_composite_ref(int round_index);

/// Chat messages of `round_index`, in log order.
std::vector<ChatTurn> round_history(const game::Session& session, int round_index);

PromptBundle build_director_prompt(const game::Session& session, int round_index,
                                   game::PromptVariant variant = game::PromptVariant::Default);
PromptBundle build_matcher_prompt(const game::Session& session, int round_index,
                                  game::PromptVariant variant = game::PromptVariant::Default);

/// Flattens a bundle into one deterministic string (used for hashing and
/// debugging).
std::string render(const PromptBundle& bundle);

}  // namespace refgame::agents
