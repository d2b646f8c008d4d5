#include "doctest.h"

#include "refgame/sim/simulate.hpp"

using namespace refgame;
using nlohmann::json;

TEST_CASE("plan_from_json applies sweep entries as merge patches") {
  const json j = {{"pairs", 3},
                  {"seed", 40},
                  {"n_rounds", 2},
                  {"director", {{"kind", "llm"}, {"model_id", "d"}, {"reasoning_effort", "high"}}},
                  {"matcher", {{"kind", "llm"}, {"model_id", "m"}}},
                  {"sweep",
                   {{{"variant", "Default"}},
                    {{"variant", "Low Reasoning"}, {"director", {{"reasoning_effort", "low"}}}}}}};
  const auto plan = sim::plan_from_json(j);
  CHECK(plan.pairs == 3);
  CHECK(plan.seed == 40);
  REQUIRE(plan.variants.size() == 2);
  CHECK(plan.variants[0].variant == "Default");
  CHECK(plan.variants[0].director.reasoning_effort == agents::ReasoningEffort::High);
  CHECK(plan.variants[1].variant == "Low Reasoning");
  CHECK(plan.variants[1].director.reasoning_effort == agents::ReasoningEffort::Low);
  CHECK(plan.variants[1].director.model_id == "d");
  CHECK(plan.variants[1].n_rounds == 2);
}

TEST_CASE("plan_from_json rejects invalid plans") {
  CHECK_THROWS(sim::plan_from_json(json::array()));
  CHECK_THROWS(sim::plan_from_json({{"pairs", 0}}));
  CHECK_THROWS(sim::plan_from_json({{"condition", "HA"}}));
  CHECK_THROWS(sim::plan_from_json({{"sweep", json::array()}}));
  CHECK_THROWS(sim::plan_from_json({{"sweep", {{{"prompt_variant", "simple"}}}}}));
  CHECK_THROWS(sim::plan_from_json({{"n_rounds", 0}}));
}

TEST_CASE("slug") {
  CHECK(sim::slug("Low Reasoning") == "low-reasoning");
  CHECK(sim::slug("  GPT-5.2 vs Claude ") == "gpt-5-2-vs-claude");
  CHECK(sim::slug("!!") == "pair");
}

TEST_CASE("simulate numbers pairs per variant, seeds them in order and is thread-count invariant") {
  sim::SimulationPlan plan = sim::plan_from_json({{"pairs", 3}, {"seed", 9}, {"n_rounds", 2}});
  const auto serial = sim::simulate(plan, {}, 1);
  const auto parallel = sim::simulate(plan, {}, 3);
  REQUIRE(serial.size() == 3);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].session.id == "default-00" + std::to_string(i + 1));
    CHECK(serial[i].session.config.seed == 9 + i);
    CHECK(serial[i].session.log == parallel[i].session.log);
    CHECK_FALSE(serial[i].failed());
  }
}

TEST_CASE("write_corpus writes the corpus layout and tagged REs") {
  const auto dir = std::filesystem::temp_directory_path() / "refgame-sim-corpus";
  std::filesystem::remove_all(dir);
  const auto runs = sim::simulate(sim::plan_from_json({{"pairs", 2}, {"n_rounds", 3}}), {}, 1);
  const auto summary = sim::write_corpus(dir, runs);
  CHECK(summary.sessions == 2);
  CHECK(summary.dialogues == 6);
  CHECK(summary.failed_sessions == 0);
  CHECK(summary.mean_accuracy == 100.0);
  CHECK(corpus::import_jsonl(dir / "dialogues.jsonl").size() == 6);
  CHECK(corpus::import_res_jsonl(dir / "res.jsonl").size() == 6);
  CHECK(std::filesystem::exists(dir / "sessions" / "default-001" / "events.jsonl"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a session whose every round aborts counts as failed") {
  auto plan = sim::plan_from_json({{"pairs", 1},
                                   {"n_rounds", 2},
                                   {"director", {{"kind", "llm"}, {"model_id", "d"}, {"mock_malformed_rate", 1.0}}},
                                   {"matcher", {{"kind", "llm"}, {"model_id", "m"}}}});
  const auto runs = sim::simulate(plan, {}, 1);
  REQUIRE(runs.size() == 1);
  CHECK(runs[0].failed());
  CHECK(runs[0].outcomes.size() == 2);
  for (const auto& o : runs[0].outcomes) CHECK(o.aborted);
}
