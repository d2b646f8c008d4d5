#include "refgame/cli/cli.hpp"

#include "refgame/agents/http_provider.hpp"
#include "refgame/corpus/extraction.hpp"
#include "refgame/metrics/report.hpp"
#include "refgame/server/http_server.hpp"
#include "refgame/sim/simulate.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

namespace refgame::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulateArgs {
  std::string config;
  std::optional<int> pairs;
  std::optional<std::uint64_t> seed;
  bool mock = false;
  int jobs = 1;
  std::string out;
  std::string record;
  std::string replay;
};

struct MetricsArgs {
  std::string corpus;
  std::string out;
  std::string res;
};

struct ExtractArgs {
  std::string corpus;
  std::string provider = "tagged";
  std::string model = "extractor";
  std::string validate;
  std::string out;
  std::string record;
  std::string replay;
  int jobs = 1;
  int max_attempts = 3;
};

struct ServeArgs {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;
  std::string data_dir = "data/sessions";
  int expiry_min = 30;
  std::string assets = "assets";
  bool mock = false;
};

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

/// Providers shared by every participant of a run: live HTTP, recorded
/// replay, or live with recording. Owns the inner providers.
struct ProviderSet {
  std::shared_ptr<agents::CompletionProvider> base;
  std::shared_ptr<agents::CompletionProvider> recorder;

  agents::ProviderFactory factory() const {
    auto p = recorder ? recorder : base;
    return [p](const agents::ParticipantSpec&) { return p; };
  }
};

ProviderSet live_providers(const std::string& record, const std::string& replay) {
  ProviderSet set;
  if (!replay.empty()) {
    if (!fs::exists(replay)) throw UsageError("no replay file " + replay);
    set.base = std::make_shared<agents::ReplayProvider>(fs::path(replay));
  } else {
    set.base = std::make_shared<agents::ChatCompletionsProvider>(agents::HttpProviderOptions::from_environment());
  }
  if (!record.empty()) set.recorder = std::make_shared<agents::RecordingProvider>(*set.base, record);
  return set;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  json config = a.config.empty() ? json::object() : read_json_file(a.config);
  if (a.pairs) config["pairs"] = *a.pairs;
  if (a.seed) config["seed"] = *a.seed;
  sim::SimulationPlan plan;
  try {
    plan = sim::plan_from_json(config);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
  if (a.mock && (!a.record.empty() || !a.replay.empty())) {
    throw UsageError("--mock cannot be combined with --record or --replay");
  }
  ProviderSet providers;
  bool uses_llm = false;
  for (const auto& v : plan.variants) {
    uses_llm |= v.director.kind == agents::ParticipantKind::Llm || v.matcher.kind == agents::ParticipantKind::Llm;
  }
  if (uses_llm && !a.mock) providers = live_providers(a.record, a.replay);

  const auto runs = sim::simulate(plan, providers.base ? providers.factory() : agents::ProviderFactory{}, a.jobs);
  const auto summary = sim::write_corpus(a.out, runs);
  out << "sessions " << summary.sessions << ", dialogues " << summary.dialogues << ", aborted rounds "
      << summary.aborted_rounds << ", failed sessions " << summary.failed_sessions << ", mean accuracy "
      << summary.mean_accuracy << "\n";
  for (const auto& run : runs) {
    if (run.error) err << run.session.id << ": " << *run.error << "\n";
    for (const auto& o : run.outcomes) {
      if (o.aborted) err << run.session.id << " round " << o.round_index << ": " << o.abort_reason << "\n";
    }
  }
  return summary.failed_sessions > 0 ? kFailure : kOk;
}

std::vector<corpus::Dialogue> load_corpus(const fs::path& dir) {
  const auto path = fs::is_directory(dir) ? dir / "dialogues.jsonl" : dir;
  if (!fs::exists(path)) throw UsageError("no dialogues at " + path.string());
  return corpus::import_jsonl(path);
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out, std::ostream& err) {
  const auto dialogues = load_corpus(a.corpus);
  if (dialogues.empty()) {
    err << "error: empty corpus\n";
    return kFailure;
  }
  fs::path res_path = a.res;
  if (res_path.empty() && fs::is_directory(a.corpus)) res_path = fs::path(a.corpus) / "res.jsonl";
  std::vector<corpus::ReRecord> res;
  if (!res_path.empty() && fs::exists(res_path)) {
    res = corpus::import_res_jsonl(res_path);
  } else {
    err << "warning: no RE sets found; RE metrics skipped\n";
  }
  const auto rows = metrics::metrics_rows(dialogues, res);
  const fs::path out_dir = a.out.empty() ? fs::path(a.corpus) / "report" : fs::path(a.out);
  for (const auto& p : metrics::emit_reports(rows, out_dir)) out << "wrote " << p.string() << "\n";
  out << metrics::table1_csv(metrics::aggregate(rows));
  return kOk;
}

int cmd_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  const auto dialogues = load_corpus(a.corpus);
  std::vector<corpus::ReRecord> records(dialogues.size());
  std::shared_ptr<agents::CompletionProvider> provider;
  std::shared_ptr<agents::CompletionProvider> base;

  if (a.provider == "mock") {
    base = std::make_shared<corpus::ScriptedExtractionProvider>();
  } else if (a.provider == "http" || a.provider == "replay") {
    if (a.provider == "replay" && a.replay.empty()) throw UsageError("--provider replay needs --replay FILE");
    auto set = live_providers("", a.provider == "replay" ? a.replay : "");
    base = set.base;
  } else if (a.provider != "tagged") {
    throw UsageError("unknown provider " + a.provider);
  }
  if (base) provider = a.record.empty() ? base : std::make_shared<agents::RecordingProvider>(*base, a.record);

  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex err_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < dialogues.size(); i = next++) {
      const auto& d = dialogues[i];
      records[i] = {d.pair_id, d.round_index, {}};
      try {
        records[i].res = provider ? corpus::extract_res_llm(d, static_cast<int>(d.targets.size()), *provider, a.model,
                                                            a.max_attempts)
                                  : corpus::extract_res_tagged(d);
      } catch (const std::exception& e) {
        ++failures;
        std::lock_guard lock(err_mutex);
        err << d.pair_id << " round " << d.round_index << ": " << e.what() << "\n";
      }
    }
  };
  const int n = std::max(1, std::min<int>(a.jobs, static_cast<int>(dialogues.size())));
  {
    std::vector<std::jthread> threads;
    for (int t = 1; t < n; ++t) threads.emplace_back(worker);
    worker();
  }

  const fs::path out_path = a.out.empty() ? fs::path(a.corpus) / "res.jsonl" : fs::path(a.out);
  corpus::export_res_jsonl(out_path, records);
  out << "extracted " << records.size() - static_cast<std::size_t>(failures) << " of " << records.size()
      << " dialogues to " << out_path.string() << "\n";

  if (!a.validate.empty()) {
    std::map<std::pair<std::string, int>, corpus::ReSet> gold;
    for (auto& r : corpus::import_res_jsonl(a.validate)) gold[{r.pair_id, r.round_index}] = std::move(r.res);
    double sum = 0.0;
    int n_scored = 0;
    for (const auto& r : records) {
      auto it = gold.find({r.pair_id, r.round_index});
      if (it == gold.end() || r.res.empty()) continue;
      sum += corpus::validate_extraction(r.res, it->second);
      ++n_scored;
    }
    if (n_scored == 0) {
      err << "error: no dialogue in common with " << a.validate << "\n";
      return kFailure;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", sum / n_scored);
    out << "mean ROUGE-L F1 " << buf << " over " << n_scored << " dialogues\n";
  }
  if (failures == static_cast<int>(records.size())) return kFailure;
  return failures > 0 ? kFailure : kOk;
}

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  events::SystemClock clock;
  server::ManagerOptions options;
  options.session_expiry = std::chrono::minutes(a.expiry_min);
  if (!a.mock) {
    auto live = std::make_shared<agents::ChatCompletionsProvider>(agents::HttpProviderOptions::from_environment());
    options.providers = [live](const agents::ParticipantSpec&) { return live; };
  }
  server::SessionManager manager(a.data_dir, clock, options);
  server::Server srv(manager, {.address = a.address, .port = a.port, .asset_dir = a.assets});
  srv.start();
  srv.stop_on_signals();
  out << "listening on " << a.address << ":" << srv.port() << "\n" << std::flush;
  srv.wait();
  srv.stop();
  manager.shutdown();
  out << "stopped; sessions flushed\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference game simulation, analysis and session service", "refgame"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run AI-AI pairs and write a corpus");
  simulate->add_option("--config", sim_args.config, "Session config JSON (optionally with a sweep)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--pairs", sim_args.pairs, "Pairs per variant (overrides the config)")
      ->check(CLI::Range(1, 1000000));
  simulate->add_option("--seed", sim_args.seed, "Base seed (overrides the config)");
  simulate->add_flag("--mock", sim_args.mock, "Serve LLM participants from in-process mock providers");
  simulate->add_option("--jobs", sim_args.jobs, "Concurrent sessions")->check(CLI::Range(1, 1000000));
  simulate->add_option("--out", sim_args.out, "Corpus directory")->required();
  simulate->add_option("--record", sim_args.record, "Append provider exchanges to this JSONL file");
  simulate->add_option("--replay", sim_args.replay, "Serve provider replies from a recording");

  MetricsArgs metrics_args;
  auto* metrics = app.add_subcommand("metrics", "Compute per-dialogue metrics and aggregate reports");
  metrics->add_option("corpus", metrics_args.corpus, "Corpus directory or dialogues.jsonl")->required();
  metrics->add_option("--out", metrics_args.out, "Report directory (default <corpus>/report)");
  metrics->add_option("--res", metrics_args.res, "RE sets JSONL (default <corpus>/res.jsonl)");

  ExtractArgs ex_args;
  auto* extract = app.add_subcommand("extract", "Extract referring expressions per dialogue");
  extract->add_option("corpus", ex_args.corpus, "Corpus directory or dialogues.jsonl")->required();
  extract->add_option("--provider", ex_args.provider, "tagged, mock, http or replay")
      ->check(CLI::IsMember({"tagged", "mock", "http", "replay"}));
  extract->add_option("--model", ex_args.model, "Extractor model id");
  extract->add_option("--validate", ex_args.validate, "Gold RE sets JSONL; prints mean ROUGE-L F1")
      ->check(CLI::ExistingFile);
  extract->add_option("--out", ex_args.out, "Output JSONL (default <corpus>/res.jsonl)");
  extract->add_option("--record", ex_args.record, "Append provider exchanges to this JSONL file");
  extract->add_option("--replay", ex_args.replay, "Recording served by --provider replay");
  extract->add_option("--jobs", ex_args.jobs, "Concurrent extractions")->check(CLI::Range(1, 1000000));
  extract->add_option("--max-attempts", ex_args.max_attempts, "Attempts per dialogue")->check(CLI::Range(1, 1000000));

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the session service");
  serve->add_option("--address", serve_args.address, "Bind address");
  serve->add_option("--port", serve_args.port, "TCP port (0 picks one)");
  serve->add_option("--data-dir", serve_args.data_dir, "Session storage directory");
  serve->add_option("--session-expiry-min", serve_args.expiry_min, "Minutes before unpaired sessions expire")
      ->check(CLI::Range(1, 1000000));
  serve->add_option("--assets", serve_args.assets, "Directory served under /assets");
  serve->add_flag("--mock", serve_args.mock, "Serve LLM participants from in-process mock providers");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim_args, out, err);
    if (metrics->parsed()) return cmd_metrics(metrics_args, out, err);
    if (extract->parsed()) return cmd_extract(ex_args, out, err);
    return cmd_serve(serve_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace refgame::cli
