#include "refgame/metrics/report.hpp"

#include "refgame/metrics/text.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace refgame::metrics {

namespace {

int whitespace_words(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string w;
  int n = 0;
  while (in >> w) ++n;
  return n;
}

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    if (s.front() == '-') s.erase(0, 1);
  }
  return s;
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? full(*v) : ""; }

std::string group_of(const MetricsRow& row, GroupBy by) {
  return by == GroupBy::Condition ? std::string(to_string(row.condition)) : row.variant;
}

int group_rank(const std::string& g) {
  static const std::vector<std::string> order{"HH", "AA", "AH", "HA"};
  auto it = std::find(order.begin(), order.end(), g);
  return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Effort effort_row(const corpus::Dialogue& dialogue) {
  Effort e;
  for (const auto& u : dialogue.utterances) e.n_words += whitespace_words(u.text);
  e.n_utterances = static_cast<int>(dialogue.utterances.size());
  e.n_turns = static_cast<int>(corpus::segment_turns(dialogue.utterances).size());
  e.duration_s = dialogue.duration_s;
  return e;
}

std::vector<Entrainment> entrainment_rows(std::span<const corpus::ReSet> re_sets) {
  std::vector<Entrainment> out;
  for (std::size_t k = 0; k < re_sets.size(); ++k) {
    Entrainment e;
    for (const auto& [_, re] : re_sets[k]) {
      e.n_re_words += static_cast<int>(content_tokens(re).size());
      e.n_re_words_raw += whitespace_words(re);
    }
    if (k == 0) {
      e.rlo = e.jaccard = e.rouge_l = 1.0;
      out.push_back(e);
      continue;
    }
    double sum_rlo = 0.0, sum_jac = 0.0, sum_rouge = 0.0;
    int n = 0;
    for (const auto& [basket, re] : re_sets[k]) {
      auto prev = re_sets[k - 1].find(basket);
      if (prev == re_sets[k - 1].end()) {
        throw std::invalid_argument("basket " + basket + " has no referring expression in round " +
                                    std::to_string(k));
      }
      const auto curr_tokens = tokenize_content(re);
      if (size(curr_tokens) == 0) continue;
      const auto prev_tokens = tokenize_content(prev->second);
      sum_rlo += rlo(prev_tokens, curr_tokens);
      sum_jac += jaccard(prev_tokens, curr_tokens);
      sum_rouge += rouge_l_f1(word_tokens(prev->second), word_tokens(re));
      ++n;
    }
    if (n > 0) {
      e.rlo = sum_rlo / n;
      e.jaccard = sum_jac / n;
      e.rouge_l = sum_rouge / n;
    }
    out.push_back(e);
  }
  return out;
}

std::vector<MetricsRow> metrics_rows(std::span<const corpus::Dialogue> dialogues,
                                     std::span<const corpus::ReRecord> res) {
  std::map<std::pair<std::string, int>, const corpus::ReSet*> by_key;
  for (const auto& r : res) by_key[{r.pair_id, r.round_index}] = &r.res;

  std::map<std::string, std::vector<const corpus::Dialogue*>> pairs;
  for (const auto& d : dialogues) pairs[d.pair_id].push_back(&d);

  std::vector<MetricsRow> rows;
  for (auto& [pair_id, ds] : pairs) {
    std::sort(ds.begin(), ds.end(), [](auto* a, auto* b) { return a->round_index < b->round_index; });
    std::vector<corpus::ReSet> sets;
    for (const auto* d : ds) {
      auto it = by_key.find({pair_id, d->round_index});
      if (it == by_key.end()) break;
      sets.push_back(*it->second);
    }
    std::vector<Entrainment> entrainment;
    if (sets.size() == ds.size()) entrainment = entrainment_rows(sets);

    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto& d = *ds[i];
      MetricsRow row{d.pair_id, d.condition, d.variant, d.round_index, d.aborted, std::nullopt, effort_row(d),
                     std::nullopt};
      if (d.result) row.accuracy_pct = d.result->accuracy_pct;
      if (!entrainment.empty()) row.entrainment = entrainment[i];
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string_view label(Metric metric) {
  switch (metric) {
    case Metric::Accuracy: return "Accuracy";
    case Metric::Words: return "# Words";
    case Metric::Turns: return "# Turns";
    case Metric::ReWords: return "# RE Words";
    case Metric::Overlap: return "L Overlap";
  }
  return "";
}

std::string_view column_key(Metric metric) {
  switch (metric) {
    case Metric::Accuracy: return "accuracy";
    case Metric::Words: return "n_words";
    case Metric::Turns: return "n_turns";
    case Metric::ReWords: return "n_re_words";
    case Metric::Overlap: return "rlo";
  }
  return "";
}

std::optional<double> value(const MetricsRow& row, Metric metric) {
  switch (metric) {
    case Metric::Accuracy: return row.accuracy_pct;
    case Metric::Words: return row.effort.n_words;
    case Metric::Turns: return row.effort.n_turns;
    case Metric::ReWords:
      if (!row.entrainment) return std::nullopt;
      return row.entrainment->n_re_words;
    case Metric::Overlap:
      if (!row.entrainment) return std::nullopt;
      return row.entrainment->rlo;
  }
  return std::nullopt;
}

Aggregates aggregate(std::span<const MetricsRow> rows, GroupBy by) {
  if (rows.empty()) throw DegenerateInput("no metrics rows to aggregate");
  Aggregates out;
  std::map<CellKey, std::vector<double>> samples;
  std::map<std::pair<std::string, Metric>, std::vector<std::pair<double, double>>> points;
  std::set<std::string> groups;
  for (const auto& row : rows) {
    const auto g = group_of(row, by);
    groups.insert(g);
    for (Metric m : kHeadlineMetrics) {
      const auto v = value(row, m);
      if (!v) continue;
      samples[{g, row.round, m}].push_back(*v);
      points[{g, m}].emplace_back(row.round, *v);
    }
  }
  out.groups.assign(groups.begin(), groups.end());
  std::stable_sort(out.groups.begin(), out.groups.end(),
                   [](const auto& a, const auto& b) { return group_rank(a) < group_rank(b); });
  for (const auto& [key, values] : samples) out.cells[key] = mean_ci(values);
  for (const auto& [key, pts] : points) {
    try {
      out.trends[key] = ols_fit(pts);
    } catch (const DegenerateInput&) {
      // a group observed in a single round has no trend
    }
  }
  return out;
}

std::string slope_cell(const OlsFit* fit) {
  if (fit == nullptr) return "";
  return fmt(fit->slope, 1) + stars(fit->p_value);
}

std::string table1_csv(const Aggregates& a) {
  std::string out = "metric";
  for (const auto& g : a.groups) out += "," + csv_escape(g);
  out += '\n';
  for (Metric m : kHeadlineMetrics) {
    out += std::string(label(m));
    for (const auto& g : a.groups) {
      auto it = a.trends.find({g, m});
      out += "," + slope_cell(it == a.trends.end() ? nullptr : &it->second);
    }
    out += '\n';
  }
  return out;
}

std::string trends_csv(const Aggregates& a) {
  std::string out = "group,metric,slope,intercept,t_stat,p_value,stars,n_points\n";
  for (const auto& g : a.groups) {
    for (Metric m : kHeadlineMetrics) {
      auto it = a.trends.find({g, m});
      if (it == a.trends.end()) continue;
      const auto& f = it->second;
      out += csv_escape(g) + "," + std::string(column_key(m)) + "," + full(f.slope) + "," + full(f.intercept) +
             "," + opt(f.t_stat) + "," + opt(f.p_value) + "," + stars(f.p_value) + "," +
             std::to_string(f.n_points) + "\n";
    }
  }
  return out;
}

std::string figure2_csv(const Aggregates& a) {
  std::string out = "group,round,metric,n,mean,ci_low,ci_high\n";
  for (const auto& g : a.groups) {
    for (Metric m : kHeadlineMetrics) {
      for (const auto& [key, cell] : a.cells) {
        if (key.group != g || key.metric != m) continue;
        out += csv_escape(g) + "," + std::to_string(key.round) + "," + std::string(column_key(m)) + "," +
               std::to_string(cell.n) + "," + full(cell.mean) + "," + opt(cell.low) + "," + opt(cell.high) + "\n";
      }
    }
  }
  return out;
}

std::string followup_csv(const Aggregates& a, Metric metric) {
  int max_round = 0;
  for (const auto& [key, _] : a.cells) max_round = std::max(max_round, key.round);
  std::string out = "group";
  for (int r = 1; r <= max_round; ++r) out += ",round_" + std::to_string(r);
  for (int r = 2; r <= max_round; ++r) out += ",change_" + std::to_string(r);
  out += '\n';
  for (const auto& g : a.groups) {
    std::vector<std::optional<double>> means(static_cast<std::size_t>(max_round) + 1);
    for (int r = 1; r <= max_round; ++r) {
      auto it = a.cells.find({g, r, metric});
      if (it != a.cells.end()) means[r] = it->second.mean;
    }
    out += csv_escape(g);
    for (int r = 1; r <= max_round; ++r) out += "," + (means[r] ? fmt(*means[r], 1) : "");
    for (int r = 2; r <= max_round; ++r) {
      out += ",";
      if (means[r] && means[r - 1]) {
        const double d = *means[r] - *means[r - 1];
        out += (d > 0 ? "+" : "") + fmt(d, 1);
      }
    }
    out += '\n';
  }
  return out;
}

std::string rows_csv(std::span<const MetricsRow> rows) {
  std::string out =
      "pair_id,condition,variant,round,aborted,accuracy_pct,n_words,n_turns,n_utterances,duration_s,"
      "n_re_words,n_re_words_raw,rlo,jaccard,rouge_l\n";
  for (const auto& r : rows) {
    out += csv_escape(r.pair_id) + "," + std::string(to_string(r.condition)) + "," + csv_escape(r.variant) + "," +
           std::to_string(r.round) + "," + (r.aborted ? "1" : "0") + "," + opt(r.accuracy_pct) + "," +
           std::to_string(r.effort.n_words) + "," + std::to_string(r.effort.n_turns) + "," +
           std::to_string(r.effort.n_utterances) + "," + full(r.effort.duration_s) + ",";
    if (r.entrainment) {
      const auto& e = *r.entrainment;
      out += std::to_string(e.n_re_words) + "," + std::to_string(e.n_re_words_raw) + "," + opt(e.rlo) + "," +
             opt(e.jaccard) + "," + opt(e.rouge_l);
    } else {
      out += ",,,,";
    }
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> emit_reports(std::span<const MetricsRow> rows,
                                                const std::filesystem::path& out_dir) {
  const auto by_condition = aggregate(rows, GroupBy::Condition);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, const std::string& content) {
    write_file(out_dir / name, content);
    written.push_back(out_dir / name);
  };
  emit("metrics_rows.csv", rows_csv(rows));
  emit("table1.csv", table1_csv(by_condition));
  emit("trends.csv", trends_csv(by_condition));
  emit("figure2.csv", figure2_csv(by_condition));
  const auto by_variant = aggregate(rows, GroupBy::Variant);
  if (by_variant.groups.size() > 1) emit("followup_by_variant.csv", followup_csv(by_variant));
  return written;
}

}  // namespace refgame::metrics
