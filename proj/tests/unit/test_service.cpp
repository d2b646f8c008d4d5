#include "doctest.h"

#include "refgame/server/session_manager.hpp"

#include <atomic>
#include <filesystem>

using namespace refgame;
using namespace refgame::server;
using Code = ServiceError::Code;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("refgame-svc-" + random_hex(6));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

game::SessionConfig config_for(Condition condition, int rounds = 2) {
  game::SessionConfig c;
  c.condition = condition;
  c.seed = 7;
  c.n_rounds = rounds;
  c.director.kind = is_human(condition, Role::Director) ? agents::ParticipantKind::Human
                                                        : agents::ParticipantKind::Scripted;
  c.matcher.kind = is_human(condition, Role::Matcher) ? agents::ParticipantKind::Human
                                                      : agents::ParticipantKind::Scripted;
  return c;
}

Code code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.code();
  }
  FAIL("no ServiceError thrown");
  return Code::Invalid;
}

/// Matcher moves that solve the current round.
void solve_round(SessionManager& m, const std::string& id) {
  const auto round = m.snapshot(id).current_round();
  for (int p = 1; p <= kPositions; ++p) {
    const Tile t = round.tile_of(round.director_order[static_cast<std::size_t>(p - 1)]);
    m.ingest(id, Role::Matcher, events::Placement{t.index, p});
  }
}

events::SurveyResponse survey() {
  return {.partner_capability = 4,
          .partner_helpfulness = 5,
          .partner_understanding = 4,
          .partner_adaptability = 3,
          .collaboration_improvement = 4,
          .perceived_human_likeness = 80,
          .ai_familiarity = 3,
          .ai_usage_frequency = 2};
}

auto noop_sink = [](const events::TranscriptEvent&) {};

}  // namespace

TEST_CASE("agent-only sessions run to completion on the worker pool") {
  TempDir dir;
  events::MockClock clock;
  SessionManager m(dir.path, clock);
  const auto created = m.create(config_for(Condition::AA));
  CHECK(created.tokens.empty());
  m.drain();
  CHECK(m.phase(created.id) == Phase::Finished);
  const auto s = m.snapshot(created.id);
  REQUIRE(s.rounds.size() == 2);
  for (const auto& r : s.rounds) CHECK(r.result->accuracy_pct == 100.0);
  CHECK(std::filesystem::exists(dir.path / created.id / "events.jsonl"));
}

TEST_CASE("human pair: pairing, role checks, round flow and survey") {
  TempDir dir;
  events::MockClock clock;
  SessionManager m(dir.path, clock);
  const auto created = m.create(config_for(Condition::HH));
  const auto& id = created.id;
  const auto director_token = created.tokens.at(Role::Director);
  const auto matcher_token = created.tokens.at(Role::Matcher);
  CHECK(director_token != matcher_token);
  CHECK(code_of([&] { m.attach("nope", 0, noop_sink); }) == Code::UnknownToken);

  std::vector<events::TranscriptEvent> seen;
  const auto d = m.attach(director_token, 0, [&](const auto& e) { seen.push_back(e); });
  CHECK(m.phase(id) == Phase::WaitingForPlayers);
  CHECK(code_of([&] { m.attach(director_token, 0, noop_sink); }) == Code::AlreadyConnected);
  const auto mt = m.attach(matcher_token, 0, noop_sink);
  CHECK(m.phase(id) == Phase::Playing);
  REQUIRE(seen.size() == 1);
  CHECK(std::holds_alternative<events::RoundStart>(seen[0].payload));

  CHECK(code_of([&] { m.ingest(id, Role::Director, events::Placement{1, 1}); }) == Code::Unauthorized);
  CHECK(code_of([&] { m.ingest(id, Role::Matcher, events::RoundStart{2}); }) == Code::Unauthorized);
  CHECK(code_of([&] { m.ingest(id, Role::Director, events::ChatMessage{"  ", {}}); }) == Code::Invalid);
  CHECK(code_of([&] { m.ingest(id, Role::Matcher, events::Submit{}); }) == Code::Rejected);
  CHECK(code_of([&] { m.ingest(id, Role::Matcher, events::Placement{99, 1}); }) == Code::Rejected);
  CHECK(code_of([&] { m.ingest(id, Role::Matcher, events::AttentionAck{1}); }) == Code::Rejected);

  m.ingest(id, Role::Director, events::ChatMessage{"Basket 1 is the tall wicker one", {}});
  solve_round(m, id);
  m.ingest(id, Role::Matcher, events::Submit{});
  CHECK(std::holds_alternative<events::RoundFeedback>(seen.back().payload));
  CHECK(m.snapshot(id).rounds.size() == 1);
  CHECK(code_of([&] { m.ingest(id, Role::Director, events::ChatMessage{"hi", {}}); }) == Code::Rejected);

  m.ingest(id, Role::Director, events::AttentionAck{1});
  CHECK(m.snapshot(id).rounds.size() == 1);
  m.ingest(id, Role::Matcher, events::AttentionAck{1});
  CHECK(m.snapshot(id).rounds.size() == 2);
  CHECK(std::get<events::RoundStart>(seen.back().payload).round == 2);

  CHECK(code_of([&] { m.submit_survey(director_token, survey()); }) == Code::NotLive);
  solve_round(m, id);
  m.ingest(id, Role::Matcher, events::Submit{});
  CHECK(m.phase(id) == Phase::Survey);
  CHECK(code_of([&] { m.ingest(id, Role::Matcher, events::AttentionAck{2}); }) == Code::NotLive);

  auto bad = survey();
  bad.perceived_human_likeness = 101;
  CHECK(code_of([&] { m.submit_survey(director_token, bad); }) == Code::Invalid);
  m.submit_survey(director_token, survey());
  CHECK(code_of([&] { m.submit_survey(director_token, survey()); }) == Code::Rejected);
  CHECK(m.phase(id) == Phase::Survey);
  m.submit_survey(matcher_token, survey());
  CHECK(m.phase(id) == Phase::Finished);

  m.detach(d);
  m.detach(mt);
  const auto again = m.attach(director_token, static_cast<std::int64_t>(seen.size()), noop_sink);
  CHECK(again.role == Role::Director);
  for (const auto& r : m.snapshot(id).rounds) CHECK(r.result->accuracy_pct == 100.0);
}

TEST_CASE("attach replays events after last_seq before live ones") {
  TempDir dir;
  events::MockClock clock;
  SessionManager m(dir.path, clock);
  const auto created = m.create(config_for(Condition::HH));
  const auto a = m.attach(created.tokens.at(Role::Director), 0, noop_sink);
  m.attach(created.tokens.at(Role::Matcher), 0, noop_sink);
  m.ingest(created.id, Role::Director, events::ChatMessage{"one", {}});
  m.ingest(created.id, Role::Director, events::ChatMessage{"two", {}});
  m.detach(a);

  std::vector<std::int64_t> seqs;
  m.attach(created.tokens.at(Role::Director), 1, [&](const auto& e) { seqs.push_back(e.seq); });
  m.ingest(created.id, Role::Director, events::ChatMessage{"three", {}});
  CHECK(seqs == std::vector<std::int64_t>{2, 3, 4});
}

TEST_CASE("human director with an agent matcher alternates turns") {
  TempDir dir;
  events::MockClock clock;
  SessionManager m(dir.path, clock);
  const auto created = m.create(config_for(Condition::HA, 1));
  REQUIRE(created.tokens.size() == 1);
  CHECK(code_of([&] { m.ingest(created.id, Role::Matcher, events::ChatMessage{"x", {}}); }) ==
        Code::Unauthorized);
  std::atomic<int> matcher_messages{0};
  m.attach(created.tokens.at(Role::Director), 0, [&](const events::TranscriptEvent& e) {
    if (e.actor == events::Actor::Matcher && std::holds_alternative<events::ChatMessage>(e.payload)) ++matcher_messages;
  });
  m.drain();
  CHECK(matcher_messages == 0);
  m.ingest(created.id, Role::Director, events::ChatMessage{"Basket 1: the small round basket", {}});
  m.drain();
  CHECK(matcher_messages == 1);
}

TEST_CASE("sessions survive a restart and unpaired sessions expire") {
  TempDir dir;
  events::MockClock clock;
  std::string id, token;
  std::vector<events::TranscriptEvent> before;
  std::string waiting_id;
  {
    SessionManager m(dir.path, clock);
    const auto created = m.create(config_for(Condition::HH));
    id = created.id;
    token = created.tokens.at(Role::Matcher);
    m.attach(created.tokens.at(Role::Director), 0, noop_sink);
    m.attach(token, 0, noop_sink);
    m.ingest(id, Role::Director, events::ChatMessage{"Basket 1 has a lid", {}});
    m.ingest(id, Role::Matcher, events::Placement{3, 1});
    before = m.replay(id);
    waiting_id = m.create(config_for(Condition::HH)).id;
  }
  SessionManager m(dir.path, clock);
  CHECK(m.replay(id) == before);
  CHECK(m.snapshot(id).current_round().slots[0] == 3);
  CHECK(m.phase(id) == Phase::Playing);
  CHECK(m.resolve(token) == std::pair<std::string, Role>{id, Role::Matcher});
  m.ingest(id, Role::Matcher, events::Clear{1});
  CHECK(m.replay(id).back().seq == static_cast<std::int64_t>(before.size()) + 1);

  CHECK(m.expire_stale().empty());
  clock.elapse(std::chrono::minutes(31));
  CHECK(m.expire_stale() == std::vector<std::string>{waiting_id});
  CHECK(m.phase(waiting_id) == Phase::Expired);
  CHECK(m.phase(id) == Phase::Playing);
}

TEST_CASE("lobby fills both seats of one session before opening another") {
  TempDir dir;
  events::MockClock clock;
  SessionManager m(dir.path, clock);
  const auto cfg = config_for(Condition::HH);
  const auto [s1, t1] = m.lobby_join(cfg);
  const auto [s2, t2] = m.lobby_join(cfg);
  const auto [s3, t3] = m.lobby_join(cfg);
  CHECK(s1 == s2);
  CHECK(t1 != t2);
  CHECK(s3 != s1);
  CHECK(m.resolve(t1).second == Role::Director);
  CHECK(m.resolve(t2).second == Role::Matcher);
}
