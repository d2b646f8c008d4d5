#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace refgame::metrics {

class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  int n_points = 0;
  /// Residual sum of squares.
  double sse = 0.0;
  /// Slope t statistic and its two-sided p-value with n-2 degrees of
  /// freedom; both absent below three points.
  std::optional<double> t_stat;
  std::optional<double> p_value;
};

/// Least squares line through (x, y) points. Throws DegenerateInput when
/// fewer than two points or all x are equal. A perfect fit has p = 0 for a
/// nonzero slope and p = 1 for a flat line.
OlsFit ols_fit(std::span<const std::pair<double, double>> points);

/// Two-sided p-value of a Student t statistic.
double t_two_sided_p(double t, double df);

/// Quantile of Student's t distribution.
double t_quantile(double p, double df);

struct MeanCi {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
  /// 95% interval mean +/- t(0.975, n-1) * sd / sqrt(n); absent for n = 1.
  std::optional<double> low;
  std::optional<double> high;
};

/// Throws DegenerateInput on an empty sample.
MeanCi mean_ci(std::span<const double> values);

/// "***" below 0.001, "**" below 0.01, "*" below 0.05, else "".
std::string stars(std::optional<double> p_value);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace refgame::metrics
