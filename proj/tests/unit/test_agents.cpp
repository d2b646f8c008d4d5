#include "doctest.h"

#include "refgame/agents/llm.hpp"
#include "refgame/agents/orchestrator.hpp"
#include "refgame/agents/prompts.hpp"
#include "refgame/agents/replies.hpp"
#include "refgame/agents/scripted.hpp"
#include "refgame/events/reducer.hpp"

using namespace refgame;
using namespace refgame::agents;
using nlohmann::json;

namespace {

game::SessionConfig pair_config(std::uint64_t seed, ParticipantKind kind = ParticipantKind::Scripted) {
  game::SessionConfig c;
  c.condition = Condition::AA;
  c.seed = seed;
  c.director = ParticipantSpec{.kind = kind, .role = Role::Director};
  c.matcher = ParticipantSpec{.kind = kind, .role = Role::Matcher};
  if (kind == ParticipantKind::Llm) {
    c.director.model_id = "mock-director";
    c.matcher.model_id = "mock-matcher";
  }
  return c;
}

struct Harness {
  game::Session session;
  events::MockClock clock;
  events::EventRecorder recorder{clock};
  std::unique_ptr<Participant> director;
  std::unique_ptr<Participant> matcher;

  explicit Harness(const game::SessionConfig& config) : session(game::new_session(config, "pair")) {
    const auto providers = mock_providers(config);
    director = make_participant(config, Role::Director, providers);
    matcher = make_participant(config, Role::Matcher, providers);
  }
  RoundOutcome round(int k) { return run_ai_round(session, recorder, *director, *matcher, k); }
};

json director_json(int target, std::string utterance, std::vector<int> confusions = {}) {
  return {{"reasoning",
           {{"target_position", target},
            {"shared_features", json::array()},
            {"distinctive_features", {"tall"}},
            {"likely_confusions", confusions},
            {"discriminative_strategy", "contrast height"}}},
          {"utterance", std::move(utterance)}};
}

json matcher_json(json candidate, json position, bool ready, json best_guess, int target = 1,
                  std::vector<int> confusions = {}) {
  return {{"reasoning",
           {{"target_position", target},
            {"shared_features", json::array()},
            {"distinctive_features", json::array()},
            {"best_guess_candidate_index", best_guess},
            {"likely_confusions", confusions},
            {"discriminative_question", "Is it tall?"}}},
          {"utterance", "Got it."},
          {"selection", {{"candidate_index", candidate}, {"position", position}, {"ready_to_submit", ready}}}};
}

ReplyError::Kind director_error(const std::string& raw, DirectorReplyContext ctx = {}) {
  try {
    parse_director_reply(raw, ctx);
  } catch (const ReplyError& e) {
    return e.kind();
  }
  FAIL("reply was accepted");
  return ReplyError::Kind::Malformed;
}

ReplyError::Kind matcher_error(const std::string& raw, const game::RoundState& round) {
  try {
    parse_matcher_reply(raw, round);
  } catch (const ReplyError& e) {
    return e.kind();
  }
  FAIL("reply was accepted");
  return ReplyError::Kind::Malformed;
}

/// Always returns the same text.
class FixedProvider final : public CompletionProvider {
 public:
  explicit FixedProvider(std::string text) : text_(std::move(text)) {}
  std::string complete(const CompletionRequest& request) override {
    requests.push_back(request.messages);
    return text_;
  }
  std::vector<std::vector<ProviderMessage>> requests;

 private:
  std::string text_;
};

}  // namespace

TEST_CASE("director reply validation vectors") {
  using K = ReplyError::Kind;
  CHECK(parse_director_reply(director_json(1, "Basket 1: tall one.").dump()).utterance == "Basket 1: tall one.");
  CHECK(director_error(director_json(3, "Basket 3", {3}).dump()) == K::SchemaViolation);
  CHECK(director_error("Here you go: " + director_json(1, "x").dump()) == K::Malformed);
  CHECK(director_error(director_json(1, "x").dump() + " thanks") == K::Malformed);
  CHECK(director_error("[1,2]") == K::Malformed);
  auto extra = director_json(1, "x");
  extra["confidence"] = 1;
  CHECK(director_error(extra.dump()) == K::Malformed);
  auto missing = director_json(1, "x");
  missing["reasoning"].erase("discriminative_strategy");
  CHECK(director_error(missing.dump()) == K::Malformed);
  auto wrong_type = director_json(1, "x");
  wrong_type["reasoning"]["target_position"] = "1";
  CHECK(director_error(wrong_type.dump()) == K::Malformed);
  CHECK(director_error(director_json(13, "x").dump()) == K::SchemaViolation);
  CHECK(director_error(director_json(0, "x").dump()) == K::SchemaViolation);
  CHECK(director_error(director_json(1, "x", {13}).dump()) == K::SchemaViolation);
  CHECK(director_error(director_json(1, "   ").dump()) == K::SchemaViolation);
  CHECK(director_error(director_json(2, "Basket 2 is tall, basket 3 is short").dump()) == K::SchemaViolation);
  CHECK(director_error(director_json(2, "Basket 2: tall").dump(), {.round_opening = true}) == K::SchemaViolation);
  CHECK(director_error(director_json(1, "Basket 2: tall").dump(), {.round_opening = true}) == K::SchemaViolation);
  CHECK_NOTHROW(parse_director_reply(director_json(1, "Basket 1: tall").dump(), {.round_opening = true}));
  // Simple variant: only the utterance
  CHECK_NOTHROW(parse_director_reply(R"({"utterance":"Basket 1: tall"})", {}, game::PromptVariant::Simple));
  try {
    parse_director_reply(director_json(1, "x").dump(), {}, game::PromptVariant::Simple);
    FAIL("reasoning accepted in simple variant");
  } catch (const ReplyError& e) {
    CHECK(e.kind() == K::Malformed);
  }
}

TEST_CASE("matcher reply validation vectors") {
  using K = ReplyError::Kind;
  auto round = game::make_round(pair_config(1), 1);
  const auto ok = parse_matcher_reply(matcher_json(5, 1, false, 5).dump(), round);
  CHECK(ok.selection.candidate_index == 5);
  CHECK(target_of(ok.selection, round) == Position{1});
  CHECK(matcher_error(matcher_json(5, 1, false, 7).dump(), round) == K::SchemaViolation);
  CHECK(matcher_error(matcher_json(5, 2, false, 5, 1).dump(), round) == K::SchemaViolation);
  CHECK(matcher_error(matcher_json(5, 1, false, 5, 1, {5}).dump(), round) == K::SchemaViolation);
  CHECK(matcher_error(matcher_json(19, 1, false, 19).dump(), round) == K::SchemaViolation);
  CHECK(matcher_error(matcher_json(0, 1, false, 0).dump(), round) == K::SchemaViolation);
  CHECK(matcher_error(matcher_json(5, 13, false, 5, 13).dump(), round) == K::SchemaViolation);
  CHECK(matcher_error(matcher_json(nullptr, nullptr, false, 3, 1, {3}).dump(), round) == K::SchemaViolation);
  auto bad_ready = matcher_json(nullptr, nullptr, false, nullptr);
  bad_ready["selection"]["ready_to_submit"] = "yes";
  CHECK(matcher_error(bad_ready.dump(), round) == K::Malformed);
  auto no_selection = matcher_json(nullptr, nullptr, false, nullptr);
  no_selection.erase("selection");
  CHECK(matcher_error(no_selection.dump(), round) == K::Malformed);

  // eleven slots filled: submit alone is illegal, submit with the last placement is fine
  for (int p = 1; p <= 11; ++p) game::apply_placement(round, Tile{p}, Position{p});
  CHECK(matcher_error(matcher_json(nullptr, nullptr, true, nullptr).dump(), round) == K::IllegalSubmit);
  CHECK_NOTHROW(parse_matcher_reply(matcher_json(12, nullptr, true, 12, 12).dump(), round));
  CHECK(matcher_error(matcher_json(1, nullptr, true, 1, 12).dump(), round) == K::IllegalSubmit);
  CHECK_NOTHROW(parse_matcher_reply(
      R"({"utterance":"placing","selection":{"candidate_index":12,"position":null,"ready_to_submit":true}})", round,
      game::PromptVariant::Simple));
}

TEST_CASE("scripted perfect director opens with a unique description of basket 1") {
  auto session = game::new_session(pair_config(11), "s");
  game::start_round(session, 1);
  ScriptedDirector director(session.config.director, 11);
  const auto action = director.act(Observation{session, Role::Director});
  const auto& basket = session.config.catalog.at(session.current_round().director_order[0]);
  CHECK(action.kind() == Action::Kind::Say);
  REQUIRE(action.tags.size() == 1);
  CHECK(action.tags[0].position == 1);
  CHECK(action.utterance.rfind("Basket 1: ", 0) == 0);
  for (const auto& f : basket.features) CHECK(action.utterance.find(f) != std::string::npos);
}

TEST_CASE("scripted perfect matcher places the described basket at position 1") {
  auto session = game::new_session(pair_config(12), "s");
  events::MockClock clock;
  events::EventRecorder rec(clock);
  rec.record(session, events::Actor::System, events::RoundStart{1});
  ScriptedDirector director(session.config.director, 12);
  const auto said = director.act(Observation{session, Role::Director});
  rec.record(session, events::Actor::Director, events::ChatMessage{said.utterance, said.tags});
  ScriptedMatcher matcher(session.config.matcher, 12);
  const auto action = matcher.act(Observation{session, Role::Matcher});
  const auto& round = session.current_round();
  REQUIRE(action.kind() == Action::Kind::SayAndPlace);
  CHECK(action.placement->position == Position{1});
  CHECK(round.basket_at_tile(action.placement->tile) == round.director_order[0]);
}

TEST_CASE("terse director shortens descriptions over rounds but stays unique") {
  const auto catalog = game::default_catalog();
  BehaviorProfile terse{BehaviorProfile::Kind::Terse, 0.0};
  for (const auto& b : catalog.targets) {
    const auto r1 = scripted::description(catalog, b, terse, 1);
    const auto r4 = scripted::description(catalog, b, terse, 4);
    CHECK(r4.size() <= r1.size());
    std::vector<std::string> vocabulary;
    for (const auto& e : catalog.all()) vocabulary.insert(vocabulary.end(), e.features.begin(), e.features.end());
    const auto mentioned = scripted::mentioned_features(r4, vocabulary);
    int matches = 0;
    for (const auto& e : catalog.all()) {
      matches += std::all_of(mentioned.begin(), mentioned.end(), [&](const auto& f) {
        return std::find(e.features.begin(), e.features.end(), f) != e.features.end();
      });
    }
    CHECK(matches == 1);
  }
}

TEST_CASE("perfect scripted pair finishes every round at 100% within 26 turns") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Harness h(pair_config(seed));
    const auto outcomes = run_session(h.session, h.recorder, *h.director, *h.matcher);
    REQUIRE(outcomes.size() == 4);
    for (const auto& o : outcomes) {
      REQUIRE(o.result.has_value());
      CHECK(o.result->accuracy_pct == doctest::Approx(100.0));
      CHECK(o.turns <= 26);
    }
    CHECK(h.session.complete());
    const auto rebuilt = events::rebuild(h.session.config, h.session.id, h.session.log);
    CHECK(rebuilt.rounds == h.session.rounds);
  }
}

TEST_CASE("turn cap aborts an incomplete round") {
  Harness h(pair_config(3));
  h.session.config.turn_cap = 4;
  const auto o = h.round(1);
  CHECK(o.aborted);
  CHECK_FALSE(o.result.has_value());
  CHECK(h.session.current_round().aborted);
  CHECK(std::holds_alternative<events::Abort>(h.session.log.back().payload));
}

TEST_CASE("noisy matcher with p = 1 scores zero") {
  auto c = pair_config(4);
  c.matcher.behavior = {BehaviorProfile::Kind::Noisy, 1.0};
  Harness h(c);
  const auto o = h.round(1);
  REQUIRE(o.result.has_value());
  CHECK(o.result->accuracy_pct == doctest::Approx(0.0));
}

TEST_CASE("noisy director triggers clarification and still succeeds") {
  auto c = pair_config(5);
  c.director.behavior = {BehaviorProfile::Kind::Noisy, 1.0};
  Harness h(c);
  const auto o = h.round(1);
  REQUIRE(o.result.has_value());
  CHECK(o.result->accuracy_pct == doctest::Approx(100.0));
  CHECK(o.turns > 26);
}

TEST_CASE("mock LLM pair plays like the scripted pair") {
  for (auto variant : {game::PromptVariant::Default, game::PromptVariant::Simple}) {
    auto c = pair_config(21, ParticipantKind::Llm);
    c.prompt_variant = variant;
    Harness h(c);
    const auto outcomes = run_session(h.session, h.recorder, *h.director, *h.matcher);
    for (const auto& o : outcomes) {
      REQUIRE(o.result.has_value());
      CHECK(o.result->accuracy_pct == doctest::Approx(100.0));
    }
  }
}

TEST_CASE("malformed mock replies are retried with a corrective notice") {
  auto c = pair_config(22, ParticipantKind::Llm);
  c.director.mock_malformed_rate = 0.3;
  c.matcher.mock_malformed_rate = 0.3;
  c.max_attempts = 10;
  Harness h(c);
  const auto o = h.round(1);
  REQUIRE(o.result.has_value());
  CHECK(o.result->accuracy_pct == doctest::Approx(100.0));
  CHECK(o.retries > 0);
}

TEST_CASE("three malformed replies exhaust the retries") {
  auto c = pair_config(23, ParticipantKind::Llm);
  auto session = game::new_session(c, "s");
  game::start_round(session, 1);
  auto provider = std::make_shared<FixedProvider>("Sure! {\"utterance\": \"hi\"}");
  LlmParticipant matcher(c.matcher, provider, LlmOptions{});
  try {
    matcher.act(Observation{session, Role::Matcher});
    FAIL("expected RetriesExhausted");
  } catch (const RetriesExhausted& e) {
    CHECK(e.attempts() == 3);
    CHECK(e.errors().size() == 3);
  }
  REQUIRE(provider->requests.size() == 3);
  const auto& last = provider->requests.back();
  CHECK(last.size() == provider->requests.front().size() + 4);
  CHECK(last.back().role == "user");
  CHECK(last.back().text.find("not a single JSON object") != std::string::npos);
}

TEST_CASE("exhausted retries abort the round in the transcript") {
  auto c = pair_config(24, ParticipantKind::Llm);
  c.director.mock_malformed_rate = 1.0;
  Harness h(c);
  const auto o = h.round(1);
  CHECK(o.aborted);
  CHECK(o.abort_reason.find("retries exhausted") != std::string::npos);
}

TEST_CASE("prompt assembly is pure and carries the sequence state") {
  auto session = game::new_session(pair_config(30, ParticipantKind::Llm), "s");
  game::start_round(session, 1);
  const auto a = build_matcher_prompt(session, 1);
  CHECK(a == build_matcher_prompt(session, 1));
  REQUIRE(a.trailing_system.has_value());
  CHECK(a.trailing_system->find("CURRENT STATE") != std::string::npos);
  const auto d = build_director_prompt(session, 1);
  CHECK(d == build_director_prompt(session, 1));
  CHECK(render(d) != render(a));
  bool has_image = false;
  for (const auto& m : d.context_messages) has_image |= m.image_ref == director_composite_ref(1);
  CHECK(has_image);
  const auto simple = build_director_prompt(session, 1, game::PromptVariant::Simple);
  CHECK(simple.system_text != d.system_text);
}
