#pragma once

#include "refgame/corpus/dialogue.hpp"
#include "refgame/corpus/extraction.hpp"
#include "refgame/metrics/stats.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace refgame::metrics {

struct Effort {
  int n_words = 0;
  int n_turns = 0;
  int n_utterances = 0;
  double duration_s = 0.0;
  bool operator==(const Effort&) const = default;
};

/// Whitespace words over all chat messages, turns and utterances by
/// segmentation, and the dialogue's duration.
Effort effort_row(const corpus::Dialogue& dialogue);

struct Entrainment {
  int n_re_words = 0;      // content words summed over baskets
  int n_re_words_raw = 0;  // whitespace words summed over baskets
  /// Mean over baskets against the same basket's previous-round RE. Round 1
  /// is 1.0 by convention. Baskets with an empty current RE are skipped; the
  /// value is absent when no basket qualifies.
  std::optional<double> rlo;
  std::optional<double> jaccard;
  std::optional<double> rouge_l;
};

/// One entry per round of `re_sets` (round 1 first). Throws
/// std::invalid_argument when a basket of a later round is missing from the
/// round before.
std::vector<Entrainment> entrainment_rows(std::span<const corpus::ReSet> re_sets);

struct MetricsRow {
  std::string pair_id;
  Condition condition = Condition::AA;
  std::string variant;
  int round = 0;
  bool aborted = false;
  std::optional<double> accuracy_pct;
  Effort effort;
  std::optional<Entrainment> entrainment;
};

/// Rows for every dialogue, ordered by pair then round. RE-based columns
/// are filled for pairs whose every round has an RE record.
std::vector<MetricsRow> metrics_rows(std::span<const corpus::Dialogue> dialogues,
                                     std::span<const corpus::ReRecord> res);

/// The five headline metrics in report order.
enum class Metric { Accuracy, Words, Turns, ReWords, Overlap };
inline constexpr Metric kHeadlineMetrics[] = {Metric::Accuracy, Metric::Words, Metric::Turns, Metric::ReWords,
                                              Metric::Overlap};

std::string_view label(Metric metric);      // "Accuracy", "# Words", ...
std::string_view column_key(Metric metric); // "accuracy", "n_words", ...
std::optional<double> value(const MetricsRow& row, Metric metric);

struct CellKey {
  std::string group;
  int round = 0;
  Metric metric = Metric::Accuracy;
  auto operator<=>(const CellKey&) const = default;
};

struct Aggregates {
  /// Groups in report order (conditions HH, AA, AH, HA first, then others).
  std::vector<std::string> groups;
  std::map<CellKey, MeanCi> cells;
  /// OLS over all pair-round points of a group, per metric.
  std::map<std::pair<std::string, Metric>, OlsFit> trends;
};

enum class GroupBy { Condition, Variant };

/// Throws DegenerateInput on an empty row set.
Aggregates aggregate(std::span<const MetricsRow> rows, GroupBy by = GroupBy::Condition);

/// Slope with one decimal and significance stars, "" for an absent fit.
std::string slope_cell(const OlsFit* fit);

/// Headline grid: metric rows x group columns of slope cells.
std::string table1_csv(const Aggregates& aggregates);
/// Same grid with slope, intercept, p-value and point count per cell.
std::string trends_csv(const Aggregates& aggregates);
/// Figure 2 data: one line per group x round x metric with mean and CI.
std::string figure2_csv(const Aggregates& aggregates);
/// Follow-up layout: one line per group with mean accuracy per round and the
/// change from the round before.
std::string followup_csv(const Aggregates& aggregates, Metric metric = Metric::Accuracy);
std::string rows_csv(std::span<const MetricsRow> rows);

/// Writes metrics_rows.csv, table1.csv, trends.csv, figure2.csv and, when
/// the rows carry more than one variant, followup_by_variant.csv. Returns
/// the paths written.
std::vector<std::filesystem::path> emit_reports(std::span<const MetricsRow> rows,
                                                const std::filesystem::path& out_dir);

}  // namespace refgame::metrics
