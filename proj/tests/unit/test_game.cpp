#include "doctest.h"

#include "refgame/game/catalog.hpp"
#include "refgame/game/rng.hpp"
#include "refgame/game/round.hpp"
#include "refgame/game/session.hpp"

#include <algorithm>
#include <set>

using namespace refgame;
using namespace refgame::game;

namespace {

SessionConfig scripted_config(std::uint64_t seed) {
  SessionConfig c;
  c.condition = Condition::AA;
  c.seed = seed;
  c.director.kind = agents::ParticipantKind::Scripted;
  c.matcher = agents::ParticipantSpec{.kind = agents::ParticipantKind::Scripted, .role = Role::Matcher};
  return c;
}

RoundState fill_correct(RoundState r) {
  for (int p = 1; p <= kPositions; ++p) apply_placement(r, r.tile_of(r.director_order[p - 1]), Position{p});
  return r;
}

}  // namespace

TEST_CASE("condition strings round-trip and name the director first") {
  for (auto c : {Condition::HH, Condition::HA, Condition::AH, Condition::AA}) {
    CHECK(parse_condition(to_string(c)) == c);
  }
  CHECK(director_is_human(Condition::HA));
  CHECK_FALSE(matcher_is_human(Condition::HA));
  CHECK_FALSE(director_is_human(Condition::AH));
  CHECK(matcher_is_human(Condition::AH));
  CHECK_THROWS(parse_condition("XX"));
}

TEST_CASE("default catalog has 12 targets, 6 distractors and unique feature sets") {
  const auto c = default_catalog();
  CHECK_NOTHROW(c.validate(true));
  CHECK(c.targets.size() == 12);
  CHECK(c.tile_count() == 18);
  std::set<std::set<std::string>> sets;
  for (const auto& b : c.all()) sets.insert(std::set<std::string>(b.features.begin(), b.features.end()));
  CHECK(sets.size() == 18);
}

TEST_CASE("catalog validation rejects bad shapes") {
  auto c = default_catalog();
  c.targets.pop_back();
  CHECK_THROWS_AS(c.validate(false), GameError);
  c = default_catalog();
  c.distractors.clear();
  CHECK_THROWS_AS(c.validate(false), GameError);
  c = default_catalog();
  c.distractors[0].id = c.targets[0].id;
  CHECK_THROWS_AS(c.validate(false), GameError);
}

TEST_CASE("shuffle is a permutation and reproducible") {
  std::vector<int> a(18), b(18);
  for (int i = 0; i < 18; ++i) a[i] = b[i] = i;
  Rng r1(derive_seed(42, 1, 1)), r2(derive_seed(42, 1, 1));
  r1.shuffle(std::span(a));
  r2.shuffle(std::span(b));
  CHECK(a == b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 18; ++i) CHECK(sorted[i] == i);
  CHECK(derive_seed(42, 1, 1) != derive_seed(42, 1, 2));
  CHECK(derive_seed(42, 1, 1) != derive_seed(42, 2, 1));
}

TEST_CASE("rounds are a pure function of seed and round index") {
  const auto cfg = scripted_config(7);
  const auto r1 = make_round(cfg, 1);
  CHECK(r1 == make_round(cfg, 1));
  CHECK(r1.director_order.size() == 12);
  CHECK(r1.pool_order.size() == 18);
  std::set<std::string> targets(r1.director_order.begin(), r1.director_order.end());
  for (const auto& t : cfg.catalog.targets) CHECK(targets.count(t.id) == 1);
  CHECK_FALSE(r1.director_order == make_round(cfg, 2).director_order);
  CHECK_FALSE(r1.director_order == make_round(scripted_config(8), 1).director_order);
}

TEST_CASE("placement moves tiles and overwrites return the old tile to the pool") {
  auto r = make_round(scripted_config(1), 1);
  apply_placement(r, Tile{5}, Position{1});
  CHECK(r.slots[0] == 5);
  apply_placement(r, Tile{5}, Position{2});
  CHECK_FALSE(r.slots[0].has_value());
  CHECK(r.slots[1] == 5);
  apply_placement(r, Tile{6}, Position{2});
  CHECK(r.slots[1] == 6);
  CHECK_FALSE(r.position_of(Tile{5}).has_value());
  clear_position(r, Position{2});
  CHECK(r.filled_count() == 0);
  CHECK_THROWS_AS(apply_placement(r, Tile{19}, Position{1}), GameError);
  CHECK_THROWS_AS(apply_placement(r, Tile{0}, Position{1}), GameError);
  CHECK_THROWS_AS(apply_placement(r, Tile{1}, Position{13}), GameError);
}

TEST_CASE("submission requires a full sequence and scoring is exact") {
  auto r = make_round(scripted_config(3), 1);
  CHECK_FALSE(can_submit(r));
  CHECK_THROWS_AS(score_round(r), GameError);
  r = fill_correct(r);
  CHECK(can_submit(r));
  auto done = r;
  CHECK(score_round(done).accuracy_pct == doctest::Approx(100.0));
  CHECK_THROWS_AS(score_round(done), GameError);
  CHECK_THROWS_AS(apply_placement(done, Tile{1}, Position{1}), GameError);

  // swap two positions: exactly 10 of 12 correct
  auto swapped = r;
  const int a = *swapped.slots[0], b = *swapped.slots[1];
  swapped.slots[0] = b;
  swapped.slots[1] = a;
  const auto result = score_round(swapped);
  CHECK(result.n_correct() == 10);
  CHECK(result.accuracy_pct == doctest::Approx(100.0 * 10 / 12));
  CHECK_FALSE(result.per_position_correct[0]);
  CHECK(result.per_position_correct[2]);
}

TEST_CASE("session rounds must be started in order") {
  auto s = new_session(scripted_config(5), "s1");
  CHECK_THROWS_AS(start_round(s, 2), GameError);
  start_round(s, 1);
  CHECK_THROWS_AS(start_round(s, 2), GameError);
  auto& r = s.current_round();
  r = fill_correct(r);
  score_round(r);
  CHECK_NOTHROW(start_round(s, 2));
  CHECK_THROWS_AS(start_round(s, 5), GameError);
}

TEST_CASE("session config validation") {
  auto c = scripted_config(1);
  CHECK_NOTHROW(c.validate());
  c.turn_cap = 23;
  CHECK_THROWS_AS(c.validate(), GameError);
  c = scripted_config(1);
  c.n_rounds = 0;
  CHECK_THROWS_AS(c.validate(), GameError);
  c = scripted_config(1);
  c.condition = Condition::HA;
  CHECK_THROWS_AS(c.validate(), GameError);
  c.director.kind = agents::ParticipantKind::Human;
  CHECK_NOTHROW(c.validate());
  const nlohmann::json j = c;
  CHECK(j.get<SessionConfig>() == c);
}
