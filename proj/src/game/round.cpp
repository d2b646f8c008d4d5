#include "refgame/game/round.hpp"

#include <algorithm>

namespace refgame::game {

namespace {

void require_open(const RoundState& round) {
  if (round.submitted) {
    throw GameError(GameError::Code::AlreadySubmitted,
                    "round " + std::to_string(round.round_index) + " already submitted");
  }
  if (round.aborted) {
    throw GameError(GameError::Code::AlreadySubmitted,
                    "round " + std::to_string(round.round_index) + " was aborted");
  }
}

void require_position(Position position) {
  if (position.index < 1 || position.index > kPositions) {
    throw GameError(GameError::Code::OutOfRange,
                    "position " + std::to_string(position.index) + " outside 1-12");
  }
}

void require_tile(const RoundState& round, Tile tile) {
  if (tile.index < 1 || tile.index > round.tile_count()) {
    throw GameError(GameError::Code::OutOfRange, "tile " + std::to_string(tile.index) +
                                                     " outside 1-" +
                                                     std::to_string(round.tile_count()));
  }
}

}  // namespace

int RoundResult::n_correct() const {
  return static_cast<int>(
      std::count(per_position_correct.begin(), per_position_correct.end(), true));
}

int RoundState::filled_count() const {
  return static_cast<int>(
      std::count_if(slots.begin(), slots.end(), [](const auto& s) { return s.has_value(); }));
}

std::optional<Position> RoundState::first_empty() const {
  for (int i = 0; i < kPositions; ++i) {
    if (!slots[i]) return Position{i + 1};
  }
  return std::nullopt;
}

std::optional<Position> RoundState::position_of(Tile tile) const {
  for (int i = 0; i < kPositions; ++i) {
    if (slots[i] == tile.index) return Position{i + 1};
  }
  return std::nullopt;
}

const std::string& RoundState::basket_at_tile(Tile tile) const {
  require_tile(*this, tile);
  return pool_order[tile.index - 1];
}

Tile RoundState::tile_of(const std::string& basket_id) const {
  auto it = std::find(pool_order.begin(), pool_order.end(), basket_id);
  if (it == pool_order.end()) {
    throw GameError(GameError::Code::OutOfRange, "basket not in pool: " + basket_id);
  }
  return Tile{static_cast<int>(it - pool_order.begin()) + 1};
}

void apply_placement(RoundState& round, Tile tile, Position position) {
  require_open(round);
  require_tile(round, tile);
  require_position(position);
  for (auto& slot : round.slots) {
    if (slot == tile.index) slot.reset();
  }
  round.slots[position.index - 1] = tile.index;
}

void clear_position(RoundState& round, Position position) {
  require_open(round);
  require_position(position);
  round.slots[position.index - 1].reset();
}

bool can_submit(const RoundState& round) {
  return !round.finished() && round.filled_count() == kPositions;
}

RoundResult score_round(RoundState& round) {
  require_open(round);
  if (round.filled_count() != kPositions) {
    throw GameError(GameError::Code::IncompleteSequence,
                    "cannot score round " + std::to_string(round.round_index) + ": only " +
                        std::to_string(round.filled_count()) + " of 12 positions filled");
  }
  RoundResult result;
  for (int i = 0; i < kPositions; ++i) {
    const auto& placed = round.pool_order[*round.slots[i] - 1];
    result.per_position_correct[i] = placed == round.director_order[i];
  }
  result.accuracy_pct = 100.0 * result.n_correct() / kPositions;
  round.submitted = true;
  round.result = result;
  return result;
}

void abort_round(RoundState& round, std::string reason) {
  require_open(round);
  round.aborted = true;
  round.abort_reason = std::move(reason);
}

void to_json(nlohmann::json& j, const RoundResult& r) {
  j = nlohmann::json{{"per_position_correct", r.per_position_correct},
                     {"accuracy_pct", r.accuracy_pct}};
}

void from_json(const nlohmann::json& j, RoundResult& r) {
  const auto& flags = j.at("per_position_correct");
  if (!flags.is_array() || flags.size() != static_cast<std::size_t>(kPositions)) {
    throw nlohmann::json::type_error::create(302, "per_position_correct must have 12 entries",
                                             &j);
  }
  for (int i = 0; i < kPositions; ++i) r.per_position_correct[i] = flags[i].get<bool>();
  j.at("accuracy_pct").get_to(r.accuracy_pct);
}

void to_json(nlohmann::json& j, const RoundState& r) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& s : r.slots) slots.push_back(s ? nlohmann::json(*s) : nlohmann::json());
  j = nlohmann::json{{"round_index", r.round_index},
                     {"director_order", r.director_order},
                     {"pool_order", r.pool_order},
                     {"slots", slots},
                     {"submitted", r.submitted},
                     {"aborted", r.aborted}};
  if (r.result) j["result"] = *r.result;
}

}  // namespace refgame::game
