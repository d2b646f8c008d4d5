#include "refgame/metrics/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace refgame::metrics {

OlsFit ols_fit(std::span<const std::pair<double, double>> points) {
  const auto n = static_cast<double>(points.size());
  if (points.size() < 2) throw DegenerateInput("need at least two points for a trend");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw DegenerateInput("all points share one x value");

  OlsFit fit;
  fit.n_points = static_cast<int>(points.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [x, y] : points) {
    const double r = y - (fit.intercept + fit.slope * x);
    fit.sse += r * r;
  }
  if (fit.n_points < 3) return fit;

  const double df = n - 2.0;
  const double se = std::sqrt(fit.sse / df / sxx);
  if (se == 0.0) {
    fit.t_stat = fit.slope == 0.0 ? 0.0 : std::copysign(INFINITY, fit.slope);
    fit.p_value = fit.slope == 0.0 ? 1.0 : 0.0;
    return fit;
  }
  fit.t_stat = fit.slope / se;
  fit.p_value = t_two_sided_p(*fit.t_stat, df);
  return fit;
}

double t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double t_quantile(double p, double df) {
  const boost::math::students_t dist(df);
  return boost::math::quantile(dist, p);
}

MeanCi mean_ci(std::span<const double> values) {
  if (values.empty()) throw DegenerateInput("empty sample");
  MeanCi out;
  out.n = static_cast<int>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / out.n;
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(ss / (out.n - 1));
  const double half = t_quantile(0.975, out.n - 1) * out.sd / std::sqrt(static_cast<double>(out.n));
  out.low = out.mean - half;
  out.high = out.mean + half;
  return out;
}

std::string stars(std::optional<double> p) {
  if (!p) return "";
  if (*p < 0.001) return "***";
  if (*p < 0.01) return "**";
  if (*p < 0.05) return "*";
  return "";
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DegenerateInput("spearman needs two equal-length samples");
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("spearman undefined for a constant sample");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace refgame::metrics
