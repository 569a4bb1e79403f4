#include "lpp/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "lpp/parallel.hpp"
#include "lpp/rng.hpp"
#include "lpp/version.hpp"

namespace lpp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json stats_json(const SeriesStats& s) {
  return json{{"count", s.count},
              {"mean", s.mean},
              {"stdev", s.stdev},
              {"stderr", s.stderr_val},
              {"ciHalf", s.ci_half}};
}

json series_json(const Series& s) {
  json j{{"statistic", s.statistic}, {"n", s.n}};
  if (s.alpha)
    j["alpha"] = *s.alpha;
  else
    j["alpha"] = nullptr;
  j["perRep"] = s.per_rep;
  j["aggregates"] = stats_json(s.stats);
  if (s.zero_fraction)
    j["zeroFraction"] = *s.zero_fraction;
  else
    j["zeroFraction"] = nullptr;
  return j;
}

}  // namespace

int ExperimentConfig::primary_n() const {
  if (n_grid.empty()) throw std::invalid_argument("ExperimentConfig: empty n grid");
  return n_grid.back();
}

Environment ExperimentConfig::env_for_rep(int rep) const {
  return Environment(derive_seed(master_seed, static_cast<std::uint64_t>(rep)), p, b, mode);
}

AnnealedParams ExperimentConfig::annealed() const { return AnnealedParams(p, mode); }

DpOptions ExperimentConfig::dp_options() const {
  DpOptions opts;
  opts.backend = backend;
  opts.memory_budget_bytes = memory_budget_bytes;
  return opts;
}

void ExperimentConfig::validate(bool need_alpha) const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("config: p must be in [0,1]");
  if (!(b > 0.0)) throw std::invalid_argument("config: b must be positive");
  if (mode.d < 1) throw std::invalid_argument("config: d must be positive");
  if (reps < 1) throw std::invalid_argument("config: reps must be at least 1");
  if (n_grid.empty()) throw std::invalid_argument("config: n grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw std::invalid_argument("config: lengths must be >= 1");
    if (i && n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("config: n grid must ascend strictly");
  }
  if (need_alpha) {
    if (alpha_grid.empty()) throw std::invalid_argument("config: alpha grid is empty");
    for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
      if (!(alpha_grid[i] >= 0.0 && alpha_grid[i] <= 1.0))
        throw std::invalid_argument("config: alpha must be in [0,1]");
      if (i && alpha_grid[i] <= alpha_grid[i - 1])
        throw std::invalid_argument("config: alpha grid must ascend strictly");
    }
  }
}

json to_json(const ExperimentConfig& cfg) {
  // threads is an execution knob, not an experiment parameter: results are
  // identical for every worker count, and so must be the persisted config.
  return json{{"p", cfg.p},
              {"d", cfg.mode.d},
              {"mode", cfg.mode.semi_oriented() ? "semi" : "full"},
              {"b", cfg.b},
              {"nGrid", cfg.n_grid},
              {"alphaGrid", cfg.alpha_grid},
              {"reps", cfg.reps},
              {"masterSeed", cfg.master_seed},
              {"backend", cfg.backend == BackendChoice::Auto
                              ? "auto"
                              : (cfg.backend == BackendChoice::Exact ? "exact" : "log")},
              {"memoryBudgetBytes", cfg.memory_budget_bytes}};
}

const Series& ExperimentResult::find(const std::string& statistic, int n,
                                     std::optional<double> alpha) const {
  for (const Series& s : series) {
    if (s.statistic != statistic || s.n != n) continue;
    if (alpha.has_value() != s.alpha.has_value()) continue;
    if (alpha && *alpha != *s.alpha) continue;
    return s;
  }
  throw std::out_of_range("ExperimentResult::find: no such series: " + statistic);
}

json ExperimentResult::to_json() const {
  json j{{"config", lpp::to_json(config)}};
  json arr = json::array();
  for (const Series& s : series) arr.push_back(series_json(s));
  j["series"] = arr;
  j["wallClock"] = wall_seconds;
  j["codeVersion"] = code_version;
  return j;
}

void ExperimentResult::write_csv(std::ostream& os) const {
  os << "n,alpha,statistic,count,mean,stdev,stderr,ci_half,zero_fraction\n";
  for (const Series& s : series) {
    os << s.n << ',';
    if (s.alpha) os << format_double(*s.alpha);
    os << ',' << s.statistic << ',' << s.stats.count << ',' << format_double(s.stats.mean) << ','
       << format_double(s.stats.stdev) << ',' << format_double(s.stats.stderr_val) << ','
       << format_double(s.stats.ci_half) << ',';
    if (s.zero_fraction) os << format_double(*s.zero_fraction);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------

ExperimentResult estimate_max_density(const ExperimentConfig& cfg) {
  cfg.validate(false);
  const auto t0 = Clock::now();
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);
  const std::size_t gn = cfg.n_grid.size();
  const int n_max = cfg.n_grid.back();

  std::vector<std::vector<double>> vals(gn, std::vector<double>(reps, kNaN));

  parallel_for_index(reps, cfg.threads, [&](std::size_t r) {
    const Environment env = cfg.env_for_rep(static_cast<int>(r));
    MaxWeightTable t(env, n_max, cfg.dp_options());
    std::size_t gi = 0;
    while (t.top_level() < t.final_level()) {
      t.advance();
      const int rel = t.top_level() - t.base_level();
      if (gi < gn && cfg.n_grid[gi] == rel) {
        vals[gi][r] = static_cast<double>(t.max_weight(t.top_level())) / rel;
        ++gi;
      }
    }
  });

  ExperimentResult res;
  res.config = cfg;
  res.code_version = kCodeVersion;
  for (std::size_t gi = 0; gi < gn; ++gi) {
    Series s;
    s.statistic = "max_density";
    s.n = cfg.n_grid[gi];
    s.per_rep = std::move(vals[gi]);
    s.stats = summarize(s.per_rep);
    res.series.push_back(std::move(s));
  }
  res.wall_seconds = seconds_since(t0);
  return res;
}

ExperimentResult estimate_count_growth(const ExperimentConfig& cfg) {
  cfg.validate(true);
  const auto t0 = Clock::now();
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);
  const std::size_t gn = cfg.n_grid.size();
  const std::size_t ga = cfg.alpha_grid.size();
  const int n_max = cfg.n_grid.back();

  // log N per (n, alpha, rep); -inf marks a zero count.
  std::vector<std::vector<double>> logs(gn * ga, std::vector<double>(reps, kNaN));

  parallel_for_index(reps, cfg.threads, [&](std::size_t r) {
    const Environment env = cfg.env_for_rep(static_cast<int>(r));
    CountTable t(env, n_max, cfg.dp_options());
    std::size_t gi = 0;
    while (t.top_level() < t.final_level()) {
      t.advance();
      const int rel = t.top_level() - t.base_level();
      if (gi < gn && cfg.n_grid[gi] == rel) {
        for (std::size_t ai = 0; ai < ga; ++ai) {
          const int thr = weight_threshold(cfg.alpha_grid[ai], rel);
          logs[gi * ga + ai][r] = t.count_at_least(t.top_level(), thr).log();
        }
        ++gi;
      }
    }
  });

  ExperimentResult res;
  res.config = cfg;
  res.code_version = kCodeVersion;
  for (std::size_t gi = 0; gi < gn; ++gi) {
    const int n = cfg.n_grid[gi];
    for (std::size_t ai = 0; ai < ga; ++ai) {
      const double alpha = cfg.alpha_grid[ai];
      const std::vector<double>& lg = logs[gi * ga + ai];

      std::size_t zeros = 0;
      Series growth, cond, raw;
      growth.statistic = "growth";
      cond.statistic = "log_count_over_n";
      raw.statistic = "log_count";
      growth.n = cond.n = raw.n = n;
      growth.alpha = cond.alpha = raw.alpha = alpha;
      growth.per_rep.resize(reps);
      cond.per_rep.resize(reps);
      raw.per_rep.resize(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        const double l = lg[r];
        if (l == -std::numeric_limits<double>::infinity()) {
          ++zeros;
          growth.per_rep[r] = 0.0;
          cond.per_rep[r] = kNaN;
          raw.per_rep[r] = kNaN;
        } else {
          growth.per_rep[r] = std::exp(l / n);
          cond.per_rep[r] = l / n;
          raw.per_rep[r] = l;
        }
      }
      const double zf = static_cast<double>(zeros) / static_cast<double>(reps);
      growth.zero_fraction = cond.zero_fraction = raw.zero_fraction = zf;
      growth.stats = summarize(growth.per_rep);
      cond.stats = summarize(cond.per_rep);
      raw.stats = summarize(raw.per_rep);
      res.series.push_back(std::move(growth));
      res.series.push_back(std::move(cond));
      res.series.push_back(std::move(raw));
    }
  }
  res.wall_seconds = seconds_since(t0);
  return res;
}

ZeroProbeResult estimate_zero_probability(const ExperimentConfig& cfg) {
  cfg.validate(false);
  if (cfg.alpha_grid.empty())
    throw std::invalid_argument("estimate_zero_probability: alpha_grid[0] required");
  const auto t0 = Clock::now();
  const double alpha = cfg.alpha_grid.front();
  if (!(alpha >= 0.0)) throw std::invalid_argument("estimate_zero_probability: alpha negative");

  const std::size_t reps = static_cast<std::size_t>(cfg.reps);
  const std::size_t gn = cfg.n_grid.size();
  const int t_max = cfg.n_grid.back();

  std::vector<std::vector<std::uint8_t>> zero(gn, std::vector<std::uint8_t>(reps, 0));
  std::vector<double> density(reps, 0.0);

  parallel_for_index(reps, cfg.threads, [&](std::size_t r) {
    const Environment env = cfg.env_for_rep(static_cast<int>(r));
    MaxWeightTable t(env, t_max, cfg.dp_options());
    std::size_t gi = 0;
    while (t.top_level() < t.final_level()) {
      t.advance();
      const int rel = t.top_level() - t.base_level();
      if (gi < gn && cfg.n_grid[gi] == rel) {
        // N_t(alpha) = 0 exactly when the best weight misses the threshold.
        const int thr = weight_threshold(alpha, rel);
        zero[gi][r] = t.max_weight(t.top_level()) < thr ? 1 : 0;
        ++gi;
      }
    }
    density[r] = static_cast<double>(t.max_weight(t.final_level())) / t_max;
  });

  ZeroProbeResult res;
  res.config = cfg;
  res.alpha = alpha;
  res.t_grid = cfg.n_grid;
  res.code_version = kCodeVersion;
  for (std::size_t gi = 0; gi < gn; ++gi) {
    std::size_t z = 0;
    for (std::uint8_t f : zero[gi]) z += f;
    const double f = static_cast<double>(z) / static_cast<double>(reps);
    res.freq.push_back(f);
    res.ci_half.push_back(1.96 * std::sqrt(f * (1.0 - f) / static_cast<double>(reps)));
  }
  res.m_hat = summarize(density).mean;
  res.margin_ok = alpha < res.m_hat * 0.95;  // margin of 0.05 * m_hat

  std::vector<double> xs, ys;
  for (std::size_t gi = 0; gi < gn; ++gi) {
    if (res.freq[gi] > 0.0) {
      xs.push_back(static_cast<double>(res.t_grid[gi]));
      ys.push_back(std::log(res.freq[gi]));
    }
  }
  if (xs.size() >= 2) {
    const LineFit f = fit_line(xs, ys);
    res.slope = f.slope;
    res.intercept = f.intercept;
    res.slope_defined = true;
  }
  res.wall_seconds = seconds_since(t0);
  return res;
}

json ZeroProbeResult::to_json() const {
  return json{{"config", lpp::to_json(config)},
              {"alpha", alpha},
              {"tGrid", t_grid},
              {"freq", freq},
              {"ciHalf", ci_half},
              {"mHat", m_hat},
              {"marginOk", margin_ok},
              {"slopeDefined", slope_defined},
              {"slope", slope},
              {"intercept", intercept},
              {"wallClock", wall_seconds},
              {"codeVersion", code_version}};
}

MomentRatioResult second_moment_ratio_experiment(const ExperimentConfig& cfg) {
  cfg.validate(true);
  const auto t0 = Clock::now();
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);
  const std::size_t gn = cfg.n_grid.size();
  const std::size_t ga = cfg.alpha_grid.size();
  const int n_max = cfg.n_grid.back();

  std::vector<std::vector<double>> logs(gn * ga, std::vector<double>(reps, kNaN));

  parallel_for_index(reps, cfg.threads, [&](std::size_t r) {
    const Environment env = cfg.env_for_rep(static_cast<int>(r));
    CountTable t(env, n_max, cfg.dp_options());
    std::size_t gi = 0;
    while (t.top_level() < t.final_level()) {
      t.advance();
      const int rel = t.top_level() - t.base_level();
      if (gi < gn && cfg.n_grid[gi] == rel) {
        for (std::size_t ai = 0; ai < ga; ++ai) {
          const int thr = weight_threshold(cfg.alpha_grid[ai], rel);
          logs[gi * ga + ai][r] = t.count_at_least(t.top_level(), thr).log();
        }
        ++gi;
      }
    }
  });

  MomentRatioResult res;
  res.config = cfg;
  res.code_version = kCodeVersion;
  for (std::size_t ai = 0; ai < ga; ++ai) {
    for (std::size_t gi = 0; gi < gn; ++gi) {
      const std::vector<double>& lg = logs[gi * ga + ai];
      MomentRatioCell cell;
      cell.alpha = cfg.alpha_grid[ai];
      cell.n = cfg.n_grid[gi];
      for (double l : lg)
        if (l == -std::numeric_limits<double>::infinity()) ++cell.zero_count;
      const RatioEstimate re = moment_ratio_from_logs(lg);
      cell.ratio = re.ratio;
      cell.ci_half = re.ci_half;
      res.cells.push_back(cell);
    }
  }
  res.wall_seconds = seconds_since(t0);
  return res;
}

const MomentRatioCell& MomentRatioResult::cell(double alpha, int n) const {
  for (const auto& c : cells)
    if (c.alpha == alpha && c.n == n) return c;
  throw std::out_of_range("MomentRatioResult::cell: no such cell");
}

json MomentRatioResult::to_json() const {
  json arr = json::array();
  for (const auto& c : cells)
    arr.push_back(json{{"alpha", c.alpha},
                       {"n", c.n},
                       {"ratio", c.ratio},
                       {"ciHalf", c.ci_half},
                       {"zeroCount", c.zero_count}});
  return json{{"config", lpp::to_json(config)},
              {"cells", arr},
              {"wallClock", wall_seconds},
              {"codeVersion", code_version}};
}

ScalingFit fit_scaling_points(const std::vector<ScalingPoint>& points) {
  ScalingFit fit;
  fit.points = points;
  std::vector<double> xs, ys;
  for (auto& pt : fit.points) {
    pt.used = pt.m_hat > 0.0 && pt.ci_half < 0.1 * pt.m_hat;
    if (pt.used) {
      xs.push_back(std::log(pt.p));
      ys.push_back(std::log(pt.m_hat));
    }
  }
  if (xs.size() >= 2) {
    const LineFit f = fit_line(xs, ys);
    fit.gamma = f.slope;
    fit.gamma_ci_half = 1.96 * f.slope_stderr;
    fit.intercept = f.intercept;
    fit.residuals = f.residuals;
    fit.fit_ok = true;
  }
  return fit;
}

ScalingFit fit_small_p_scaling(const std::vector<double>& p_grid, const ExperimentConfig& base) {
  if (p_grid.empty()) throw std::invalid_argument("fit_small_p_scaling: empty p grid");
  for (double p : p_grid)
    if (!(p > 0.0 && p <= 0.2))
      throw std::invalid_argument("fit_small_p_scaling: p grid must lie in (0, 0.2]");
  const auto t0 = Clock::now();

  std::vector<ScalingPoint> points;
  for (double p : p_grid) {
    ExperimentConfig cfg = base;
    cfg.p = p;
    const ExperimentResult res = estimate_max_density(cfg);
    const Series& s = res.find("max_density", cfg.primary_n());
    points.push_back(ScalingPoint{p, s.stats.mean, s.stats.ci_half, false});
  }

  ScalingFit fit = fit_scaling_points(points);
  fit.base_config = base;
  fit.code_version = kCodeVersion;
  fit.wall_seconds = seconds_since(t0);
  return fit;
}

json ScalingFit::to_json() const {
  json arr = json::array();
  for (const auto& pt : points)
    arr.push_back(
        json{{"p", pt.p}, {"mHat", pt.m_hat}, {"ciHalf", pt.ci_half}, {"used", pt.used}});
  return json{{"config", lpp::to_json(base_config)},
              {"points", arr},
              {"fitOk", fit_ok},
              {"gamma", gamma},
              {"gammaCiHalf", gamma_ci_half},
              {"intercept", intercept},
              {"residuals", residuals},
              {"wallClock", wall_seconds},
              {"codeVersion", code_version}};
}

InterchangeProbeResult interchange_growth_probe(const ExperimentConfig& cfg) {
  cfg.validate(true);
  const auto t0 = Clock::now();
  const double alpha = cfg.alpha_grid.front();
  const int n = cfg.primary_n();
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);

  InterchangeProbeResult res;
  res.config = cfg;
  res.alpha = alpha;
  res.reps.resize(reps);
  res.code_version = kCodeVersion;

  parallel_for_index(reps, cfg.threads, [&](std::size_t r) {
    const Environment env = cfg.env_for_rep(static_cast<int>(r));
    InterchangeProbeRep& rec = res.reps[r];

    DpOptions mopts = cfg.dp_options();
    mopts.keep_history = true;
    MaxWeightTable mt(env, n, mopts);
    mt.advance_to(mt.final_level());
    rec.base_weight = mt.max_weight(mt.final_level());

    const PathRecord path = max_weight_path(mt, env);
    const InterchangeFamily fam =
        interchange_family(env, path, 0, derive_seed(cfg.master_seed, 1'000'000 + r));
    rec.changes = static_cast<int>(fam.report.qualifying.size());
    rec.selected = static_cast<int>(fam.report.selected.size());
    rec.degenerate = rec.changes == 0;
    rec.reduced_threshold = std::max(0, rec.base_weight - rec.selected);

    CountTable ct(env, n, cfg.dp_options());
    ct.advance_to(ct.final_level());
    const CountValue at_floor = ct.count_at_least(ct.final_level(), rec.reduced_threshold);
    if (at_floor.is_exact)
      rec.bound_ok = at_floor.exact >= (BigCount(1) << rec.selected);
    else
      rec.bound_ok = at_floor.log() >= rec.selected * std::log(2.0) - 1e-6;

    const CountValue at_alpha =
        ct.count_at_least(ct.final_level(), weight_threshold(alpha, n));
    rec.log_count = at_alpha.log();
    rec.growth = at_alpha.root(n);
  });

  std::size_t above = 0;
  res.all_bounds_ok = true;
  for (const auto& rec : res.reps) {
    if (rec.growth > 1.0) ++above;
    if (!rec.bound_ok) res.all_bounds_ok = false;
    if (rec.degenerate) ++res.degenerate_count;
  }
  res.fraction_growth_above_one = static_cast<double>(above) / static_cast<double>(reps);
  res.wall_seconds = seconds_since(t0);
  return res;
}

json InterchangeProbeResult::to_json() const {
  json arr = json::array();
  for (const auto& r : reps)
    arr.push_back(json{{"baseWeight", r.base_weight},
                       {"changes", r.changes},
                       {"selected", r.selected},
                       {"reducedThreshold", r.reduced_threshold},
                       {"boundOk", r.bound_ok},
                       {"degenerate", r.degenerate},
                       {"growth", r.growth},
                       {"logCount", r.log_count}});
  return json{{"config", lpp::to_json(config)},
              {"alpha", alpha},
              {"perRep", arr},
              {"fractionGrowthAboveOne", fraction_growth_above_one},
              {"allBoundsOk", all_bounds_ok},
              {"degenerateCount", degenerate_count},
              {"wallClock", wall_seconds},
              {"codeVersion", code_version}};
}

}  // namespace lpp
