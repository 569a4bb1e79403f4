#ifndef LPP_ESTIMATORS_HPP
#define LPP_ESTIMATORS_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lpp/analytic.hpp"
#include "lpp/counting.hpp"
#include "lpp/environment.hpp"
#include "lpp/interchange.hpp"
#include "lpp/stats.hpp"

namespace lpp {

using json = nlohmann::ordered_json;

/// Shared experiment setup. Replication r runs in the environment seeded by
/// derive_seed(master_seed, r), a pure function of (master_seed, r), so
/// results are bit-identical for any worker count and any scheduling.
struct ExperimentConfig {
  double p = 0.5;  // [0,1]; the closed endpoints are degenerate fixtures
  GraphMode mode;
  double b = 1.0;
  std::vector<int> n_grid;         // ascending lengths; the last is primary
  std::vector<double> alpha_grid;  // ascending thresholds (empty if unused)
  int reps = 1;
  std::uint64_t master_seed = 1;
  BackendChoice backend = BackendChoice::Auto;
  std::size_t memory_budget_bytes = std::size_t{2} << 30;
  int threads = 1;

  int primary_n() const;
  Environment env_for_rep(int rep) const;
  AnnealedParams annealed() const;  // requires p strictly inside (0,1)
  DpOptions dp_options() const;
  void validate(bool need_alpha) const;
};

json to_json(const ExperimentConfig& cfg);

/// One per-replication statistic at a fixed (n, alpha) cell.
struct Series {
  std::string statistic;
  int n = 0;
  std::optional<double> alpha;
  std::vector<double> per_rep;  // NaN marks replications where it is undefined
  SeriesStats stats;            // over the defined entries
  std::optional<double> zero_fraction;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<Series> series;
  double wall_seconds = 0.0;
  std::string code_version;

  const Series& find(const std::string& statistic, int n,
                     std::optional<double> alpha = std::nullopt) const;
  json to_json() const;
  /// One row per (n, alpha, statistic).
  void write_csv(std::ostream& os) const;
};

/// Per replication the best path weight divided by n, for every n in n_grid.
/// Statistic "max_density".
ExperimentResult estimate_max_density(const ExperimentConfig& cfg);

/// Per replication and per (n, alpha): the count of length-n paths with
/// weight >= ceil(alpha*n), reported as
///   "growth"           count^(1/n), 0 when the count is zero,
///   "log_count_over_n" (1/n) log count, NaN when zero (conditional statistic),
///   "log_count"        log count, NaN when zero,
/// plus the fraction of replications with a zero count.
ExperimentResult estimate_count_growth(const ExperimentConfig& cfg);

/// Empirical P{count = 0} across the length grid at alpha_grid[0], with a
/// log-linear decay fit over the strictly positive frequencies. The margin
/// check alpha < m_hat - 0.05*m_hat follows the estimated maximal density
/// m_hat from the same replications.
struct ZeroProbeResult {
  ExperimentConfig config;
  double alpha = 0.0;
  std::vector<int> t_grid;
  std::vector<double> freq;
  std::vector<double> ci_half;
  double m_hat = 0.0;
  bool margin_ok = false;
  bool slope_defined = false;
  double slope = 0.0;
  double intercept = 0.0;
  double wall_seconds = 0.0;
  std::string code_version;

  json to_json() const;
};

ZeroProbeResult estimate_zero_probability(const ExperimentConfig& cfg);

/// Monte Carlo E[N^2]/(E[N])^2 per (alpha, n) cell, both moments from the same
/// replications, delta-method confidence interval. Sweeping alpha upward from
/// p locates where the ratio stops being flat in n.
struct MomentRatioCell {
  double alpha = 0.0;
  int n = 0;
  double ratio = 0.0;
  double ci_half = 0.0;
  std::size_t zero_count = 0;
};

struct MomentRatioResult {
  ExperimentConfig config;
  std::vector<MomentRatioCell> cells;  // alpha-major, n ascending within
  double wall_seconds = 0.0;
  std::string code_version;

  const MomentRatioCell& cell(double alpha, int n) const;
  json to_json() const;
};

MomentRatioResult second_moment_ratio_experiment(const ExperimentConfig& cfg);

/// Least-squares fit of log m_hat(p) = gamma log p + c over a p grid.
struct ScalingPoint {
  double p = 0.0;
  double m_hat = 0.0;
  double ci_half = 0.0;
  bool used = false;  // only points with ci_half < 10% of m_hat enter the fit
};

struct ScalingFit {
  std::vector<ScalingPoint> points;
  bool fit_ok = false;
  double gamma = 0.0;
  double gamma_ci_half = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;  // over used points
  ExperimentConfig base_config;
  double wall_seconds = 0.0;
  std::string code_version;

  json to_json() const;
};

/// The pure fit step, separated so it can be exercised on synthetic points.
ScalingFit fit_scaling_points(const std::vector<ScalingPoint>& points);

/// Runs estimate_max_density at every p in p_grid (same master seed, so the
/// per-vertex uniforms are shared and estimates are coupled across p).
ScalingFit fit_small_p_scaling(const std::vector<double>& p_grid, const ExperimentConfig& base);

/// Per replication: reconstruct the best path, count its direction changes,
/// form the 2^selected family bound at the reduced threshold, verify it
/// against the exact count, and record whether the count growth at
/// alpha_grid[0] exceeds one.
struct InterchangeProbeRep {
  int base_weight = 0;
  int changes = 0;
  int selected = 0;
  int reduced_threshold = 0;
  bool bound_ok = false;
  bool degenerate = false;  // no direction changes: bound collapses to 1
  double growth = 0.0;
  double log_count = 0.0;
};

struct InterchangeProbeResult {
  ExperimentConfig config;
  double alpha = 0.0;
  std::vector<InterchangeProbeRep> reps;
  double fraction_growth_above_one = 0.0;
  bool all_bounds_ok = false;
  std::size_t degenerate_count = 0;
  double wall_seconds = 0.0;
  std::string code_version;

  json to_json() const;
};

InterchangeProbeResult interchange_growth_probe(const ExperimentConfig& cfg);

}  // namespace lpp

#endif
