#include "doctest.h"

#include "refgame/metrics/report.hpp"
#include "refgame/metrics/stats.hpp"
#include "refgame/metrics/text.hpp"

#include <cmath>
#include <functional>

using namespace refgame;
using namespace refgame::metrics;

namespace {

// Exponential-time LCS over all subsequences of the shorter side.
std::size_t brute_lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const auto& s = a.size() <= b.size() ? a : b;
  const auto& t = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  for (unsigned mask = 0; mask < (1u << s.size()); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(s[i]);
    }
    std::size_t j = 0;
    for (const auto& w : t) {
      if (j < sub.size() && sub[j] == w) ++j;
    }
    if (j == sub.size()) best = std::max(best, sub.size());
  }
  return best;
}

}  // namespace

TEST_CASE("content tokenization") {
  CHECK(tokenize_content("the tall, tall hamper") == TokenMultiset{{"tall", 2}, {"hamper", 1}});
  CHECK(tokenize_content("").empty());
  CHECK(tokenize_content("Scary rodent!") == TokenMultiset{{"scary", 1}, {"rodent", 1}});
  CHECK(tokenize_content("It doesn't have a handle") == TokenMultiset{{"handle", 1}});
  CHECK(stopwords().size() == 179);
  CHECK(word_tokens("Half-circle, NO handles") == std::vector<std::string>{"half", "circle", "no", "handles"});
}

TEST_CASE("rlo and jaccard examples") {
  CHECK(rlo("tall hamper", "tall hamper") == 1.0);
  CHECK(rlo("red box", "tall hamper") == 0.0);
  CHECK(rlo("tall wicker hamper loop handles", "tall hamper") == 1.0);
  CHECK(rlo("tall hamper", "tall tall hamper") == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(rlo("tall", "the"), EmptyInput);
  CHECK(jaccard("a1 b1", "b1 c1") == doctest::Approx(1.0 / 3.0));
  CHECK(jaccard("b1 a1", "a1 b1") == 1.0);
  CHECK(jaccard("a1", "c1") == 0.0);
  CHECK_THROWS_AS(jaccard("the", "a"), EmptyInput);
}

TEST_CASE("rouge-l examples") {
  const auto r = rouge_l(word_tokens("x y z"), word_tokens("x z"));
  CHECK(r.precision == 1.0);
  CHECK(r.recall == doctest::Approx(2.0 / 3.0));
  CHECK(r.f1 == doctest::Approx(0.8));
  CHECK(rouge_l_f1("the tall hamper", "tall wicker hamper") == doctest::Approx(2.0 / 3.0));
  CHECK(rouge_l_f1("a b", "a b") == 1.0);
  CHECK(rouge_l_f1("a b", "c d") == 0.0);
  CHECK(rouge_l_f1("", "c d") == 0.0);
}

TEST_CASE("lcs matches brute force on all strings over a 3-letter alphabet up to length 5") {
  const std::vector<std::string> alphabet{"a", "b", "c"};
  std::vector<std::vector<std::string>> all{{}};
  for (int len = 1; len <= 5; ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto& s : all) {
      if (static_cast<int>(s.size()) != len - 1) continue;
      for (const auto& c : alphabet) {
        auto t = s;
        t.push_back(c);
        next.push_back(t);
      }
    }
    all.insert(all.end(), next.begin(), next.end());
  }
  for (std::size_t i = 0; i < all.size(); i += 7) {
    for (std::size_t j = 0; j < all.size(); j += 5) CHECK(lcs_length(all[i], all[j]) == brute_lcs(all[i], all[j]));
  }
}

TEST_CASE("ols fit examples") {
  const std::vector<std::pair<double, double>> line{{1, 2}, {2, 4}, {3, 6}, {4, 8}};
  auto f = ols_fit(line);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(0.0));
  REQUIRE(f.p_value);
  CHECK(*f.p_value < 1e-9);

  const std::vector<std::pair<double, double>> flat{{1, 3}, {2, 3}, {3, 3}};
  f = ols_fit(flat);
  CHECK(f.slope == 0.0);
  CHECK(*f.p_value == 1.0);

  const std::vector<std::pair<double, double>> zigzag{{1, 0}, {2, 1}, {3, 0}, {4, 1}};
  CHECK(ols_fit(zigzag).slope == doctest::Approx(0.2));

  const std::vector<std::pair<double, double>> same_x{{1, 0}, {1, 1}};
  CHECK_THROWS_AS(ols_fit(same_x), DegenerateInput);
  const std::vector<std::pair<double, double>> two{{1, 0}, {2, 1}};
  CHECK_FALSE(ols_fit(two).p_value.has_value());
}

TEST_CASE("default AA accuracy trend gives a significant negative slope") {
  const std::vector<std::pair<double, double>> pts{{1, 92.2}, {2, 90.1}, {3, 84.4}, {4, 76.6}};
  const auto f = ols_fit(pts);
  CHECK(f.slope == doctest::Approx(-5.25));
  CHECK(f.intercept == doctest::Approx(98.95));
  CHECK(f.sse == doctest::Approx(8.235));
  CHECK(*f.t_stat == doctest::Approx(-5.785).epsilon(1e-3));
  CHECK(*f.p_value == doctest::Approx(0.0286).epsilon(1e-2));
  CHECK(stars(f.p_value) == "*");
  CHECK(slope_cell(&f) == "-5.3*");
}

TEST_CASE("t distribution values") {
  CHECK(t_quantile(0.975, 1) == doctest::Approx(12.7062).epsilon(1e-4));
  CHECK(t_quantile(0.975, 10) == doctest::Approx(2.2281).epsilon(1e-4));
  CHECK(t_two_sided_p(2.2281388519649, 10) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("mean and confidence interval") {
  const std::vector<double> one{5.0};
  auto m = mean_ci(one);
  CHECK(m.mean == 5.0);
  CHECK_FALSE(m.low.has_value());
  const std::vector<double> two{1.0, 3.0};
  m = mean_ci(two);
  CHECK(m.mean == 2.0);
  CHECK(*m.high - m.mean == doctest::Approx(12.7062047 * std::sqrt(2.0) / std::sqrt(2.0)));
  CHECK_THROWS_AS(mean_ci(std::vector<double>{}), DegenerateInput);
}

TEST_CASE("stars thresholds") {
  CHECK(stars(0.0005) == "***");
  CHECK(stars(0.004) == "**");
  CHECK(stars(0.03) == "*");
  CHECK(stars(0.05) == "");
  CHECK(stars(std::nullopt) == "");
}

TEST_CASE("spearman") {
  const std::vector<double> x{1, 2, 3, 4}, y{10, 20, 30, 40}, z{4, 3, 2, 1};
  CHECK(spearman(x, y) == doctest::Approx(1.0));
  CHECK(spearman(x, z) == doctest::Approx(-1.0));
  const std::vector<double> tied{1, 1, 2, 3};
  CHECK(spearman(tied, y) == doctest::Approx(0.9486833));
}

TEST_CASE("effort counts") {
  corpus::Dialogue d;
  d.utterances = {{Role::Director, "a b", 0, {}}, {Role::Matcher, "c", 0, {}}};
  auto e = effort_row(d);
  CHECK(e.n_words == 3);
  CHECK(e.n_turns == 2);
  CHECK(e.n_utterances == 2);
  d.utterances = {{Role::Director, "a", 0, {}}, {Role::Director, "b", 0, {}}, {Role::Matcher, "c", 0, {}}};
  e = effort_row(d);
  CHECK(e.n_turns == 2);
  CHECK(e.n_utterances == 3);
  CHECK(effort_row(corpus::Dialogue{}) == Effort{});
}

TEST_CASE("entrainment rows on a two-basket toy set") {
  const std::vector<corpus::ReSet> sets{
      {{"b1", "tall wicker hamper"}, {"b2", "the red box with handles"}},
      {{"b1", "tall hamper"}, {"b2", "red crate"}},
  };
  const auto rows = entrainment_rows(sets);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n_re_words == 3 + 3);
  CHECK(rows[0].n_re_words_raw == 3 + 5);
  CHECK(*rows[0].rlo == 1.0);
  CHECK(rows[1].n_re_words == 2 + 2);
  // b1: 2/2, b2: 1/2
  CHECK(*rows[1].rlo == doctest::Approx(0.75));
  // b1: {tall,hamper} vs {tall,wicker,hamper} = 2/3; b2: {red} of {red,box,handles,crate} = 1/4
  CHECK(*rows[1].jaccard == doctest::Approx((2.0 / 3.0 + 0.25) / 2));
  const std::vector<corpus::ReSet> missing{{{"b1", "x"}}, {{"b2", "y"}}};
  CHECK_THROWS_AS(entrainment_rows(missing), std::invalid_argument);
}

TEST_CASE("table 1 grid shape") {
  std::vector<MetricsRow> rows;
  const double acc[] = {92.2, 90.1, 84.4, 76.6};
  for (int r = 1; r <= 4; ++r) {
    MetricsRow row;
    row.pair_id = "p";
    row.condition = Condition::AA;
    row.round = r;
    row.accuracy_pct = acc[r - 1];
    row.effort = Effort{10 * r, r, r, 1.0};
    rows.push_back(row);
  }
  const auto a = aggregate(rows);
  const auto csv = table1_csv(a);
  CHECK(csv == "metric,AA\nAccuracy,-5.3*\n# Words,10.0***\n# Turns,1.0***\n# RE Words,\nL Overlap,\n");
  CHECK_THROWS_AS(aggregate(std::vector<MetricsRow>{}), DegenerateInput);
}
