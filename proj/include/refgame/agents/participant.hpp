#pragma once

#include "refgame/agents/spec.hpp"
#include "refgame/events/event.hpp"
#include "refgame/game/session.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace refgame::agents {

/// What a participant sees when asked to act: the live session (current
/// round included) and its own role.
struct Observation {
  const game::Session& session;
  Role role;

  const game::RoundState& round() const { return session.current_round(); }
};

struct PlacementAction {
  Tile tile;
  Position position;
  bool operator==(const PlacementAction&) const = default;
};

/// One agent turn: a chat message, optionally with a placement and/or a
/// submission (matcher only).
struct Action {
  enum class Kind { Say, SayAndPlace, SayAndSubmit };

  std::string utterance;
  std::vector<events::ReTag> tags;
  std::optional<PlacementAction> placement;
  bool submit = false;
  /// Validation errors of rejected attempts that preceded this action.
  std::vector<std::string> retry_errors;

  Kind kind() const {
    if (submit) return Kind::SayAndSubmit;
    return placement ? Kind::SayAndPlace : Kind::Say;
  }
};

class RetriesExhausted : public std::runtime_error {
 public:
  RetriesExhausted(int attempts, std::vector<std::string> errors)
      : std::runtime_error("retries exhausted after " + std::to_string(attempts) +
                           " attempts: " + (errors.empty() ? std::string() : errors.back())),
        attempts_(attempts),
        errors_(std::move(errors)) {}
  int attempts() const noexcept { return attempts_; }
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  int attempts_;
  std::vector<std::string> errors_;
};

class Participant {
 public:
  virtual ~Participant() = default;
  virtual const ParticipantSpec& spec() const = 0;
  /// Produces this participant's next turn. Must only be called on its turn.
  virtual Action act(const Observation& observation) = 0;
};

/// Single turn of the chat loop.
inline Action agent_turn(Participant& participant, const Observation& observation) {
  return participant.act(observation);
}

}  // namespace refgame::agents
