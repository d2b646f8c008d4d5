#pragma once

#include "refgame/game/session.hpp"
#include "refgame/server/session_manager.hpp"

#include <nlohmann/json.hpp>

namespace refgame::server {

/// What `role` is shown in round `k`: the director gets the target grid, the
/// matcher the candidate pool. Image refs only; basket ids stay server-side
/// for the matcher.
nlohmann::json round_view(const game::SessionConfig& config, int k, Role role);

/// Greeting frame sent before any event on a new connection.
nlohmann::json hello_frame(const game::Session& session, Role role, Phase phase);

nlohmann::json error_frame(std::string_view code, std::string_view message);

/// The client frame carries one payload in TranscriptEvent payload form.
/// Throws events::EventFormatError.
events::Payload parse_client_frame(std::string_view text);

}  // namespace refgame::server
