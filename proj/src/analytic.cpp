#include "lpp/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "lpp/counting.hpp"
#include "lpp/rng.hpp"

namespace lpp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

double log_binom_pmf(int n, int k, double p) {
  double log_choose = 0.0;
  if (k > 0 && k < n)
    log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return log_choose + k * std::log(p) + (n - k) * std::log1p(-p);
}

}  // namespace

AnnealedParams::AnnealedParams(double p_, GraphMode mode_) : p(p_), mode(mode_) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("AnnealedParams: p must lie strictly in (0,1)");
  if (mode.d < 1) throw std::invalid_argument("AnnealedParams: d must be positive");
}

double log_binomial_upper_tail(int n, int kmin, double p) {
  if (n < 0) throw std::invalid_argument("log_binomial_upper_tail: n negative");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("log_binomial_upper_tail: bad p");
  if (kmin <= 0) return 0.0;
  if (kmin > n) return kNegInf;
  if (p == 0.0) return kNegInf;  // kmin >= 1 here
  if (p == 1.0) return 0.0;

  // Sum whichever tail carries less mass; the complement of a mass <= 1/2 is
  // safe to take through log1p.
  const double mean = n * p;
  if (kmin > mean) {
    double acc = kNegInf;
    for (int k = kmin; k <= n; ++k) acc = log_add(acc, log_binom_pmf(n, k, p));
    return std::min(acc, 0.0);
  }
  double lower = kNegInf;
  for (int k = 0; k < kmin; ++k) lower = log_add(lower, log_binom_pmf(n, k, p));
  const double l = std::exp(std::min(lower, 0.0));
  if (l >= 1.0) return kNegInf;
  return std::log1p(-l);
}

double annealed_growth_rate(double alpha, const AnnealedParams& params) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("annealed_growth_rate: alpha must be in [0,1]");
  const double deg = params.out_degree();
  const double p = params.p;
  if (alpha <= p) return deg;
  if (alpha >= 1.0) return deg * p;
  const double lg = std::log(deg) + alpha * (std::log(p) - std::log(alpha)) +
                    (1.0 - alpha) * (std::log1p(-p) - std::log1p(-alpha));
  return std::exp(lg);
}

double log_expected_count(int n, double alpha, const AnnealedParams& params) {
  if (n < 0) throw std::invalid_argument("log_expected_count: n negative");
  const int thr = weight_threshold(alpha, n);
  return n * std::log(static_cast<double>(params.out_degree())) +
         log_binomial_upper_tail(n, thr, params.p);
}

double vanishing_alpha_heuristic(const AnnealedParams& params) {
  const double denom = std::log(1.0 / params.p);
  if (!(denom > 0.0)) throw std::domain_error("vanishing_alpha_heuristic: log(1/p) must be positive");
  return std::log(static_cast<double>(params.out_degree())) / denom;
}

UnitRoot annealed_unit_root(const AnnealedParams& params) {
  const double at_one = annealed_growth_rate(1.0, params);
  if (at_one >= 1.0) return UnitRoot{1.0, false};
  // Rate is outDegree >= 2 at alpha = p and strictly decreasing on [p,1].
  double lo = params.p, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (annealed_growth_rate(mid, params) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return UnitRoot{0.5 * (lo + hi), true};
}

namespace {

// One-step distribution of the spatial difference of two independent uniform
// oriented walks.
std::vector<std::pair<std::vector<int>, double>> difference_kernel(const GraphMode& mode) {
  const auto steps = step_set(mode);
  const double w = 1.0 / (static_cast<double>(steps.size()) * static_cast<double>(steps.size()));
  std::map<std::vector<int>, double> acc;
  for (const Step& a : steps) {
    for (const Step& b : steps) {
      std::vector<int> delta(static_cast<std::size_t>(mode.d), 0);
      if (a.axis <= mode.d) delta[static_cast<std::size_t>(a.axis - 1)] += a.sign;
      if (b.axis <= mode.d) delta[static_cast<std::size_t>(b.axis - 1)] -= b.sign;
      acc[delta] += w;
    }
  }
  return {acc.begin(), acc.end()};
}

// Exact P{difference walk first hits 0 within T steps}, by propagating the
// full distribution over a dense box and absorbing the mass at the origin.
double exact_meet_probability(const GraphMode& mode, int T) {
  const int d = mode.d;
  const auto kernel = difference_kernel(mode);
  int maxd = 0;
  for (const auto& [delta, prob] : kernel)
    for (int c : delta) maxd = std::max(maxd, std::abs(c));

  const long long R = static_cast<long long>(maxd) * T;
  const long long side = 2 * R + 1;
  double cells = 1.0;
  for (int i = 0; i < d; ++i) cells *= static_cast<double>(side);
  if (cells > 5e7)
    throw ResourceError("collision DP refused: state box of " + std::to_string(cells) +
                        " cells at truncation " + std::to_string(T) +
                        "; lower the truncation for d=" + std::to_string(d));

  std::vector<long long> stride(static_cast<std::size_t>(d));
  long long total = 1;
  for (int i = d - 1; i >= 0; --i) {
    stride[static_cast<std::size_t>(i)] = total;
    total *= side;
  }
  const long long center = (total - 1) / 2;  // all coordinates at offset R

  std::vector<long long> offsets;
  std::vector<double> probs;
  for (const auto& [delta, prob] : kernel) {
    long long off = 0;
    for (int i = 0; i < d; ++i) off += delta[static_cast<std::size_t>(i)] * stride[static_cast<std::size_t>(i)];
    offsets.push_back(off);
    probs.push_back(prob);
  }

  std::vector<double> cur(static_cast<std::size_t>(total), 0.0);
  std::vector<double> nxt(static_cast<std::size_t>(total), 0.0);
  cur[static_cast<std::size_t>(center)] = 1.0;

  // Walk the subbox of radius r: recurse over leading axes, linear inner loop.
  auto sweep = [&](int radius, auto&& cell_fn) {
    auto rec = [&](auto&& self, int axis, long long base) -> void {
      if (axis == d - 1) {
        const long long lo = base + (R - radius) * stride[static_cast<std::size_t>(axis)];
        for (long long c = -radius; c <= radius; ++c)
          cell_fn(lo + (c + radius) * stride[static_cast<std::size_t>(axis)]);
        return;
      }
      for (long long c = -radius; c <= radius; ++c)
        self(self, axis + 1, base + (c + R) * stride[static_cast<std::size_t>(axis)]);
    };
    rec(rec, 0, 0);
  };

  double rho = 0.0;
  const std::size_t kn = offsets.size();
  for (int t = 1; t <= T; ++t) {
    const int r_prev = maxd * (t - 1);
    const int r_next = maxd * t;
    sweep(r_next, [&](long long idx) { nxt[static_cast<std::size_t>(idx)] = 0.0; });
    sweep(r_prev, [&](long long idx) {
      const double m = cur[static_cast<std::size_t>(idx)];
      if (m == 0.0) return;
      for (std::size_t j = 0; j < kn; ++j)
        nxt[static_cast<std::size_t>(idx + offsets[j])] += m * probs[j];
    });
    rho += nxt[static_cast<std::size_t>(center)];
    nxt[static_cast<std::size_t>(center)] = 0.0;
    cur.swap(nxt);
  }
  return rho;
}

}  // namespace

CollisionEstimate walk_collision_probability(const AnnealedParams& params, int truncation,
                                             long mc_samples, long mc_horizon,
                                             std::uint64_t seed) {
  if (truncation < 1) throw std::invalid_argument("walk_collision_probability: truncation < 1");
  if (mc_samples < 0) throw std::invalid_argument("walk_collision_probability: negative samples");

  CollisionEstimate est;
  est.truncation = truncation;
  est.lower_bound = exact_meet_probability(params.mode, truncation);
  est.mc_samples = mc_samples;
  est.mc_horizon = mc_horizon > 0 ? mc_horizon : std::max<long>(2L * truncation, 1000);

  if (mc_samples > 0) {
    const auto steps = step_set(params.mode);
    const int deg = static_cast<int>(steps.size());
    const int d = params.mode.d;
    long met = 0;
    std::vector<int> diff(static_cast<std::size_t>(d));
    for (long i = 0; i < mc_samples; ++i) {
      SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
      std::fill(diff.begin(), diff.end(), 0);
      for (long t = 0; t < est.mc_horizon; ++t) {
        const Step& a = steps[rng.next_below(static_cast<std::uint64_t>(deg))];
        const Step& b = steps[rng.next_below(static_cast<std::uint64_t>(deg))];
        if (a.axis <= d) diff[static_cast<std::size_t>(a.axis - 1)] += a.sign;
        if (b.axis <= d) diff[static_cast<std::size_t>(b.axis - 1)] -= b.sign;
        bool zero = true;
        for (int c : diff)
          if (c != 0) {
            zero = false;
            break;
          }
        if (zero) {
          ++met;
          break;
        }
      }
    }
    est.mc_frequency = static_cast<double>(met) / static_cast<double>(mc_samples);
    est.mc_stderr =
        std::sqrt(est.mc_frequency * (1.0 - est.mc_frequency) / static_cast<double>(mc_samples));
    // The exact mass by T is proven; the sampler cannot honestly report less.
    est.point_estimate = std::max(est.mc_frequency, est.lower_bound);
  } else {
    est.point_estimate = est.lower_bound;
  }
  return est;
}

double second_moment_overlap_sum(int n, double alpha, double beta, double rho,
                                 const AnnealedParams& params) {
  if (n < 1) throw std::invalid_argument("second_moment_overlap_sum: n must be positive");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("second_moment_overlap_sum: beta must be in (0,1]");
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("second_moment_overlap_sum: rho must be in [0,1)");
  if (rho == 0.0) return 0.0;

  const int kmax = std::min(static_cast<int>(std::floor(beta * n + 1e-9)), n);
  const int thr = weight_threshold(alpha, n);
  const double log_denom = log_binomial_upper_tail(n, thr, params.p);
  const double log_rho = std::log(rho);

  double sum = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double log_num = log_binomial_upper_tail(n - k, thr - k, params.p);
    sum += std::exp(k * log_rho + log_num - log_denom);
  }
  return sum;
}

}  // namespace lpp
