#include "lpp/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lpp {

SeriesStats summarize(std::span<const double> values) {
  SeriesStats s;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    ++s.count;
    sum += v;
  }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count >= 2) {
    double ss = 0.0;
    for (double v : values) {
      if (std::isnan(v)) continue;
      const double dv = v - s.mean;
      ss += dv * dv;
    }
    s.stdev = std::sqrt(ss / static_cast<double>(s.count - 1));
    s.stderr_val = s.stdev / std::sqrt(static_cast<double>(s.count));
    s.ci_half = 1.96 * s.stderr_val;
  }
  return s;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate x values");

  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.residuals.resize(n);
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f.residuals[i] = y[i] - (f.slope * x[i] + f.intercept);
    sse += f.residuals[i] * f.residuals[i];
  }
  if (n > 2) f.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  return f;
}

RatioEstimate moment_ratio_from_logs(std::span<const double> log_counts) {
  const std::size_t n = log_counts.size();
  if (n < 2) throw std::invalid_argument("moment_ratio_from_logs: need >= 2 replications");

  double top = -std::numeric_limits<double>::infinity();
  for (double lg : log_counts) top = std::max(top, lg);
  if (top == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("moment_ratio_from_logs: all counts are zero");

  // w_i = N_i / max N; the ratio m2/m1^2 is invariant under the rescaling.
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double lg : log_counts) {
    const double w = std::exp(lg - top);
    const double w2 = w * w;
    m1 += w;
    m2 += w2;
    m3 += w2 * w;
    m4 += w2 * w2;
  }
  const double dn = static_cast<double>(n);
  m1 /= dn;
  m2 /= dn;
  m3 /= dn;
  m4 /= dn;
  if (m1 == 0.0) throw std::invalid_argument("moment_ratio_from_logs: zero mean");

  RatioEstimate r;
  r.ratio = m2 / (m1 * m1);

  // Delta method for g(m1,m2) = m2/m1^2 with sample moment covariances.
  const double var1 = (m2 - m1 * m1) / dn;
  const double var2 = (m4 - m2 * m2) / dn;
  const double cov12 = (m3 - m1 * m2) / dn;
  const double g1 = -2.0 * m2 / (m1 * m1 * m1);
  const double g2 = 1.0 / (m1 * m1);
  const double var = g1 * g1 * var1 + g2 * g2 * var2 + 2.0 * g1 * g2 * cov12;
  r.ci_half = var > 0.0 ? 1.96 * std::sqrt(var) : 0.0;
  return r;
}

}  // namespace lpp
