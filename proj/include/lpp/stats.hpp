#ifndef LPP_STATS_HPP
#define LPP_STATS_HPP

#include <span>
#include <vector>

namespace lpp {

/// Mean / sample stdev / standard error / 95% half-width over the non-NaN
/// entries of a series. Undefined quantities (count < 2) report 0.
struct SeriesStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stdev = 0.0;
  double stderr_val = 0.0;
  double ci_half = 0.0;
};

SeriesStats summarize(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::vector<double> residuals;
};

/// Ordinary least squares y ~ slope*x + intercept. Needs >= 2 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct RatioEstimate {
  double ratio = 0.0;    // mean(N^2) / mean(N)^2
  double ci_half = 0.0;  // 95%, delta method
};

/// Second-moment ratio from per-replication log-counts (-inf for zero counts).
/// Shift-invariant: computed on counts rescaled by the largest sample.
RatioEstimate moment_ratio_from_logs(std::span<const double> log_counts);

}  // namespace lpp

#endif
