#pragma once

#include "refgame/agents/llm.hpp"
#include "refgame/agents/orchestrator.hpp"
#include "refgame/corpus/dialogue.hpp"
#include "refgame/corpus/extraction.hpp"
#include "refgame/game/session.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace refgame::sim {

/// A batch of AI-AI pairs. `variants` holds one config per sweep entry (a
/// single "Default" entry when the file has no sweep).
struct SimulationPlan {
  std::vector<game::SessionConfig> variants;
  int pairs = 1;
  std::uint64_t seed = 1;
};

/// Reads the config file format:
///   { <SessionConfig fields>, "pairs": N, "seed": S,
///     "sweep": [ {"variant": "Low Reasoning", <fields merged over the base>}, ... ] }
/// Each sweep entry is applied to the base object as a JSON merge patch.
/// Throws std::invalid_argument (or GameError) on an invalid plan.
SimulationPlan plan_from_json(const nlohmann::json& j);

struct SessionRun {
  game::Session session;
  std::vector<agents::RoundOutcome> outcomes;
  /// Set when the session could not run at all.
  std::optional<std::string> error;

  bool failed() const;
};

/// Pair i of variant v uses seed `plan.seed + i` and id "<variant>-<i+1>"
/// (variant slugged). Sessions run on up to `jobs` threads, each with its own
/// mock clock; results come back in plan order.
std::vector<SessionRun> simulate(const SimulationPlan& plan, const agents::ProviderFactory& providers, int jobs = 1);

std::string slug(std::string_view text);

struct CorpusSummary {
  int sessions = 0;
  int failed_sessions = 0;
  int dialogues = 0;
  int aborted_rounds = 0;
  double mean_accuracy = 0.0;
};

/// Writes dialogues.jsonl, res.jsonl (tagged REs, when every director is
/// scripted), sessions/<id>/{config.json,events.jsonl} and summary.json.
CorpusSummary write_corpus(const std::filesystem::path& out_dir, const std::vector<SessionRun>& runs);

}  // namespace refgame::sim
