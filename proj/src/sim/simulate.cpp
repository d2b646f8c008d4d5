#include "refgame/sim/simulate.hpp"

#include "refgame/events/recorder.hpp"

#include <atomic>
#include <cctype>
#include <fstream>
#include <thread>

namespace refgame::sim {

using nlohmann::json;

SimulationPlan plan_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  SimulationPlan plan;
  plan.pairs = j.value("pairs", 1);
  plan.seed = j.value("seed", std::uint64_t{1});
  if (plan.pairs < 1) throw std::invalid_argument("pairs must be >= 1");

  json base = j;
  for (const char* key : {"pairs", "seed", "sweep"}) base.erase(key);
  std::vector<json> entries;
  if (j.contains("sweep")) {
    if (!j.at("sweep").is_array() || j.at("sweep").empty()) {
      throw std::invalid_argument("sweep must be a non-empty array");
    }
    for (const auto& patch : j.at("sweep")) {
      if (!patch.is_object() || !patch.contains("variant")) {
        throw std::invalid_argument("every sweep entry needs a \"variant\" label");
      }
      json merged = base;
      merged.merge_patch(patch);
      entries.push_back(std::move(merged));
    }
  } else {
    entries.push_back(base);
  }
  for (const auto& e : entries) {
    auto config = e.get<game::SessionConfig>();
    config.seed = plan.seed;
    config.validate();
    if (refgame::is_human(config.condition, Role::Director) || refgame::is_human(config.condition, Role::Matcher)) {
      throw std::invalid_argument("simulation needs an AA condition");
    }
    plan.variants.push_back(std::move(config));
  }
  return plan;
}

bool SessionRun::failed() const {
  if (error) return true;
  for (const auto& o : outcomes) {
    if (!o.aborted) return false;
  }
  return true;
}

std::string slug(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "pair" : out;
}

namespace {

SessionRun run_one(game::SessionConfig config, std::string id, const agents::ProviderFactory& providers) {
  SessionRun run;
  try {
    run.session = game::new_session(std::move(config), std::move(id));
    events::MockClock clock;
    events::EventRecorder recorder(clock);
    auto director = agents::make_participant(run.session.config, Role::Director, providers);
    auto matcher = agents::make_participant(run.session.config, Role::Matcher, providers);
    run.outcomes = agents::run_session(run.session, recorder, *director, *matcher);
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  return run;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string pad(int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", n);
  return buf;
}

}  // namespace

std::vector<SessionRun> simulate(const SimulationPlan& plan, const agents::ProviderFactory& providers, int jobs) {
  struct Job {
    game::SessionConfig config;
    std::string id;
  };
  std::vector<Job> work;
  for (const auto& variant : plan.variants) {
    for (int i = 0; i < plan.pairs; ++i) {
      auto config = variant;
      config.seed = plan.seed + static_cast<std::uint64_t>(i);
      work.push_back({std::move(config), slug(variant.variant) + "-" + pad(i + 1)});
    }
  }
  std::vector<SessionRun> runs(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      const auto factory = providers ? providers : agents::mock_providers(work[i].config);
      runs[i] = run_one(work[i].config, work[i].id, factory);
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(work.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  }
  return runs;
}

CorpusSummary write_corpus(const std::filesystem::path& out_dir, const std::vector<SessionRun>& runs) {
  std::filesystem::create_directories(out_dir / "sessions");
  CorpusSummary summary;
  std::vector<corpus::Dialogue> dialogues;
  std::vector<corpus::ReRecord> res;
  bool all_tagged = true;
  double accuracy_sum = 0.0;
  int scored = 0;
  json failures = json::array();

  for (const auto& run : runs) {
    ++summary.sessions;
    if (run.failed()) ++summary.failed_sessions;
    if (run.error) {
      failures.push_back({{"pair_id", run.session.id}, {"error", *run.error}});
      continue;
    }
    const auto dir = out_dir / "sessions" / run.session.id;
    std::filesystem::create_directories(dir);
    write_text(dir / "config.json", json(run.session.config).dump(2) + "\n");
    std::string log;
    for (const auto& e : run.session.log) log += events::serialize(e) + "\n";
    write_text(dir / "events.jsonl", log);

    for (auto& d : corpus::dialogues_from_session(run.session)) {
      if (d.aborted) {
        ++summary.aborted_rounds;
        failures.push_back({{"pair_id", d.pair_id}, {"round", d.round_index}, {"error", d.abort_reason}});
      }
      if (d.result) {
        accuracy_sum += d.result->accuracy_pct;
        ++scored;
      }
      if (all_tagged && run.session.config.director.kind == agents::ParticipantKind::Scripted) {
        try {
          res.push_back({d.pair_id, d.round_index, corpus::extract_res_tagged(d)});
        } catch (const corpus::ExtractionError&) {
          all_tagged = false;
        }
      } else {
        all_tagged = false;
      }
      dialogues.push_back(std::move(d));
    }
  }
  summary.dialogues = static_cast<int>(dialogues.size());
  summary.mean_accuracy = scored ? accuracy_sum / scored : 0.0;
  corpus::export_jsonl(out_dir / "dialogues.jsonl", dialogues);
  if (all_tagged && !res.empty()) {
    corpus::export_res_jsonl(out_dir / "res.jsonl", res);
  } else {
    std::filesystem::remove(out_dir / "res.jsonl");
  }
  const json j{{"sessions", summary.sessions},
               {"failed_sessions", summary.failed_sessions},
               {"dialogues", summary.dialogues},
               {"aborted_rounds", summary.aborted_rounds},
               {"mean_accuracy", summary.mean_accuracy},
               {"failures", failures}};
  write_text(out_dir / "summary.json", j.dump(2) + "\n");
  return summary;
}

}  // namespace refgame::sim
