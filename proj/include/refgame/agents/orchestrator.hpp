#pragma once

#include "refgame/agents/participant.hpp"
#include "refgame/events/recorder.hpp"
#include "refgame/game/session.hpp"

#include <optional>
#include <string>

namespace refgame::agents {

struct RoundOutcome {
  int round_index = 0;
  std::optional<game::RoundResult> result;
  bool aborted = false;
  std::string abort_reason;
  /// Chat messages exchanged in the round.
  int turns = 0;
  /// Agent replies rejected and retried during the round.
  int retries = 0;
};

/// Plays one round between two agents. Starts the round if the session's
/// current round is not `round_index`. The director opens; turns strictly
/// alternate. At the turn cap a complete sequence is submitted by the system
/// and an incomplete one aborts the round. Exhausted retries and provider
/// failures abort the round too; every outcome is recorded as events.
RoundOutcome run_ai_round(game::Session& session, events::EventRecorder& recorder, Participant& director,
                          Participant& matcher, int round_index);

/// Plays all pending rounds, with both agents acknowledging the attention
/// check between rounds.
std::vector<RoundOutcome> run_session(game::Session& session, events::EventRecorder& recorder,
                                      Participant& director, Participant& matcher);

}  // namespace refgame::agents
