#pragma once

#include "refgame/events/event.hpp"
#include "refgame/game/session.hpp"

#include <span>

namespace refgame::events {

/// True when `actor` may emit `payload`: only the matcher places, clears and
/// submits; round control and feedback come from the system.
bool authorized(Actor actor, const Payload& payload);

/// Applies the game-state effect of one event. Chat, typing, survey and
/// attention events leave the game state untouched. Throws GameError on
/// illegal transitions.
void apply(game::Session& session, const TranscriptEvent& event);

/// Reconstructs game state by folding `log` over a fresh session. The
/// returned session's log is `log`.
game::Session rebuild(const game::SessionConfig& config, const std::string& session_id,
                      std::span<const TranscriptEvent> log);

}  // namespace refgame::events
