#pragma once

#include "refgame/game/types.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace refgame::game {

struct RoundResult {
  std::array<bool, kPositions> per_position_correct{};
  double accuracy_pct = 0.0;

  int n_correct() const;
  bool operator==(const RoundResult&) const = default;
};

/// State of one round. Slot i holds the candidate tile placed at position
/// i + 1, or nullopt while empty.
struct RoundState {
  int round_index = 0;
  std::vector<std::string> director_order;  // basket ids at grid positions 1..12
  std::vector<std::string> pool_order;      // basket ids at candidate tiles 1..N
  std::array<std::optional<int>, kPositions> slots{};
  bool submitted = false;
  bool aborted = false;
  std::string abort_reason;
  std::optional<RoundResult> result;

  int tile_count() const { return static_cast<int>(pool_order.size()); }
  int filled_count() const;
  /// Lowest-numbered empty position, if any.
  std::optional<Position> first_empty() const;
  std::optional<Position> position_of(Tile tile) const;
  const std::string& basket_at_tile(Tile tile) const;
  /// Candidate tile index showing `basket_id` in the matcher's pool.
  Tile tile_of(const std::string& basket_id) const;
  /// Candidate index per position, nullopt for EMPTY.
  std::array<std::optional<int>, kPositions> sequence() const { return slots; }
  bool finished() const { return submitted || aborted; }

  bool operator==(const RoundState&) const = default;
};

/// Moves `tile` into `position`. A tile already elsewhere in the sequence
/// leaves its old slot empty; a tile previously occupying `position` goes
/// back to the pool.
void apply_placement(RoundState& round, Tile tile, Position position);

/// Empties `position`. Clearing an empty slot is a no-op.
void clear_position(RoundState& round, Position position);

bool can_submit(const RoundState& round);

/// Scores the final sequence and marks the round submitted.
RoundResult score_round(RoundState& round);

void abort_round(RoundState& round, std::string reason);

void to_json(nlohmann::json& j, const RoundResult& r);
void from_json(const nlohmann::json& j, RoundResult& r);
void to_json(nlohmann::json& j, const RoundState& r);

}  // namespace refgame::game
