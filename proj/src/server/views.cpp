#include "refgame/server/views.hpp"

namespace refgame::server {

using nlohmann::json;

json round_view(const game::SessionConfig& config, int k, Role role) {
  const auto round = game::make_round(config, k);
  json view{{"frame", "round"}, {"round", k}, {"role", refgame::to_string(role)}};
  if (role == Role::Director) {
    json grid = json::array();
    for (std::size_t i = 0; i < round.director_order.size(); ++i) {
      grid.push_back({{"position", i + 1}, {"image", config.catalog.at(round.director_order[i]).image_ref}});
    }
    view["grid"] = std::move(grid);
  } else {
    json pool = json::array();
    for (std::size_t i = 0; i < round.pool_order.size(); ++i) {
      pool.push_back({{"tile", i + 1}, {"image", config.catalog.at(round.pool_order[i]).image_ref}});
    }
    view["pool"] = std::move(pool);
  }
  return view;
}

json hello_frame(const game::Session& session, Role role, Phase phase) {
  return {{"frame", "hello"},
          {"session_id", session.id},
          {"role", refgame::to_string(role)},
          {"phase", to_string(phase)},
          {"condition", refgame::to_string(session.config.condition)},
          {"n_rounds", session.config.n_rounds}};
}

json error_frame(std::string_view code, std::string_view message) {
  return {{"frame", "error"}, {"code", code}, {"message", message}};
}

events::Payload parse_client_frame(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw events::EventFormatError(std::string("frame is not JSON: ") + e.what());
  }
  return events::payload_from_json(j);
}

}  // namespace refgame::server
