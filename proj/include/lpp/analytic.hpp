#ifndef LPP_ANALYTIC_HPP
#define LPP_ANALYTIC_HPP

#include <cstdint>

#include "lpp/lattice.hpp"

namespace lpp {

/// Parameters of the averaged (annealed) counting problem.
struct AnnealedParams {
  double p = 0.5;
  GraphMode mode;

  AnnealedParams() = default;
  AnnealedParams(double p_, GraphMode mode_);

  int out_degree() const { return mode.out_degree(); }
};

/// log of the upper binomial tail sum_{k>=kmin} C(n,k) p^k (1-p)^(n-k).
/// kmin <= 0 gives 0 (probability one); kmin = n+1 gives -inf.
double log_binomial_upper_tail(int n, int kmin, double p);

/// Closed-form limit of (expected count)^(1/n): outDegree for alpha <= p, and
/// outDegree * (p/alpha)^alpha * ((1-p)/(1-alpha))^(1-alpha) above p.
/// alpha = 1 returns the limit value outDegree * p.
double annealed_growth_rate(double alpha, const AnnealedParams& params);

/// log E[count of length-n paths with weight >= ceil(alpha*n)]:
/// n log(outDegree) plus the binomial tail at the integer threshold.
double log_expected_count(int n, double alpha, const AnnealedParams& params);

/// Small-p heuristic for where expected counts start vanishing:
/// log(outDegree) / log(1/p).
double vanishing_alpha_heuristic(const AnnealedParams& params);

/// Root of annealed_growth_rate(alpha) = 1 on [p, 1], by bisection to 1e-10.
/// When the rate never drops below 1 on the interval there is no root;
/// alpha = 1 is returned with bracketed = false.
struct UnitRoot {
  double alpha = 1.0;
  bool bracketed = false;
};
UnitRoot annealed_unit_root(const AnnealedParams& params);

/// Probability that two independent uniform oriented walks from the origin
/// ever occupy the same vertex at the same time.
///
/// lower_bound is exact: a first-passage sweep of the difference walk's
/// distribution up to `truncation` steps. point_estimate adds Monte Carlo
/// mass over a longer horizon; since the exact mass by T is proven, the
/// point estimate never reports below it.
struct CollisionEstimate {
  double lower_bound = 0.0;
  double point_estimate = 0.0;
  int truncation = 0;
  long mc_samples = 0;
  long mc_horizon = 0;
  double mc_frequency = 0.0;
  double mc_stderr = 0.0;
};

CollisionEstimate walk_collision_probability(const AnnealedParams& params, int truncation,
                                             long mc_samples, long mc_horizon = 0,
                                             std::uint64_t seed = 1);

/// Truncated overlap sum sum_{1<=k<=beta*n} rho^k * T(n-k, thr-k) / T(n, thr)
/// with T the upper binomial tail and thr = ceil(alpha*n). Numerical probe for
/// where the second-moment ratio stays bounded in n.
double second_moment_overlap_sum(int n, double alpha, double beta, double rho,
                                 const AnnealedParams& params);

}  // namespace lpp

#endif
