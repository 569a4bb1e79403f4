// lpplab: exact counting and Monte Carlo experiments for oriented lattice
// paths in a seeded Bernoulli site environment.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lpp/analytic.hpp"
#include "lpp/counting.hpp"
#include "lpp/enumeration.hpp"
#include "lpp/estimators.hpp"
#include "lpp/interchange.hpp"
#include "lpp/rng.hpp"
#include "lpp/version.hpp"

namespace {

using lpp::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;

std::string iso_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct CommonOpts {
  int d = 1;
  std::string mode = "semi";
  double p = 0.5;
  double b = 1.0;
  double alpha = -1.0;
  std::vector<double> alpha_grid;
  int n = -1;
  std::vector<int> n_grid;
  int reps = 100;
  std::uint64_t seed = 1;
  std::string backend = "auto";
  int threads = 1;
  std::string out;
  bool force = false;
  bool dry_run = false;
  std::size_t memory_mib = 2048;
};

void add_lattice_flags(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--d", o.d, "Spatial dimension")->check(CLI::PositiveNumber);
  sub->add_option("--mode", o.mode, "Graph mode: semi|full")
      ->check(CLI::IsMember({"semi", "full"}));
  sub->add_option("--p", o.p, "Good-site probability, strictly in (0,1)");
  sub->add_option("--b", o.b, "Weight parameter carried in configs (unused by counting)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "Master seed");
}

void add_run_flags(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--threads", o.threads, "Worker threads (output identical for any value)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "Output directory (manifest + results); omit to print only");
  sub->add_flag("--force", o.force, "Allow overwriting existing output files");
  sub->add_flag("--dry-run", o.dry_run,
                "Print the resolved config and estimated memory, then exit");
  sub->add_option("--memory-mib", o.memory_mib, "Layer memory budget in MiB");
  sub->add_option("--backend", o.backend, "Count backend")
      ->check(CLI::IsMember({"auto", "exact", "log"}));
}

void add_alpha_flags(CLI::App* sub, CommonOpts& o) {
  auto* single = sub->add_option("--alpha", o.alpha, "Weight-density threshold in [0,1]");
  sub->add_option("--alpha-grid", o.alpha_grid, "Comma-separated thresholds")
      ->delimiter(',')
      ->excludes(single);
}

void add_n_flags(CLI::App* sub, CommonOpts& o) {
  auto* single = sub->add_option("--n", o.n, "Path length");
  sub->add_option("--n-grid", o.n_grid, "Comma-separated ascending lengths")
      ->delimiter(',')
      ->excludes(single);
}

lpp::GraphMode mode_of(const CommonOpts& o) {
  return o.mode == "semi" ? lpp::GraphMode::semi(o.d) : lpp::GraphMode::fully(o.d);
}

lpp::BackendChoice backend_of(const CommonOpts& o) {
  if (o.backend == "exact") return lpp::BackendChoice::Exact;
  if (o.backend == "log") return lpp::BackendChoice::Log;
  return lpp::BackendChoice::Auto;
}

void require_p_open_interval(const CommonOpts& o) {
  if (!(o.p > 0.0 && o.p < 1.0)) throw std::invalid_argument("--p must lie strictly in (0,1)");
}

lpp::ExperimentConfig make_config(const CommonOpts& o, bool need_alpha) {
  require_p_open_interval(o);
  lpp::ExperimentConfig cfg;
  cfg.p = o.p;
  cfg.mode = mode_of(o);
  cfg.b = o.b;
  if (!o.n_grid.empty())
    cfg.n_grid = o.n_grid;
  else if (o.n > 0)
    cfg.n_grid = {o.n};
  if (!o.alpha_grid.empty())
    cfg.alpha_grid = o.alpha_grid;
  else if (o.alpha >= 0.0)
    cfg.alpha_grid = {o.alpha};
  cfg.reps = o.reps;
  cfg.master_seed = o.seed;
  cfg.backend = backend_of(o);
  cfg.memory_budget_bytes = o.memory_mib << 20;
  cfg.threads = o.threads;
  cfg.validate(need_alpha);
  return cfg;
}

double estimate_layer_mib(const lpp::ExperimentConfig& cfg, bool history) {
  const int n = cfg.n_grid.empty() ? 0 : cfg.n_grid.back();
  const double bits = n * std::log2(static_cast<double>(cfg.mode.out_degree()));
  const double entry = cfg.backend == lpp::BackendChoice::Log ? 8.0
                       : bits <= 62.0                         ? 8.0
                                                              : 48.0 + bits / 8.0;
  double total = 0.0, last = 0.0;
  for (int t = 1; t <= n; ++t) {
    const double endpoints = std::pow(t + 1.0, cfg.mode.d);
    last = endpoints * (8.0 + (t + 2.0) * entry);
    total += last;
  }
  return (history ? total : 2.0 * last) / (1 << 20);
}

// Persists manifest + named outputs under --out. Existing files are refused
// up front unless --force; the run then owns its freshly planned files.
class OutputSink {
 public:
  OutputSink(const CommonOpts& o, std::string subcommand)
      : enabled_(!o.out.empty()), dir_(o.out), force_(o.force) {
    manifest_["subcommand"] = std::move(subcommand);
    manifest_["codeVersion"] = lpp::kCodeVersion;
  }

  bool enabled() const { return enabled_; }

  void plan(const std::vector<std::string>& names, const json& config) {
    if (!enabled_) return;
    std::filesystem::create_directories(dir_);
    std::vector<std::string> all = names;
    all.push_back("manifest.json");
    for (const auto& name : all) {
      const auto path = dir_ / name;
      if (std::filesystem::exists(path) && !force_)
        throw std::invalid_argument("refusing to overwrite " + path.string() +
                                    " (pass --force to allow)");
    }
    manifest_["config"] = config;
    json outputs = json::array();
    for (const auto& name : names) outputs.push_back((dir_ / name).string());
    manifest_["outputs"] = outputs;
    manifest_["startedAt"] = iso_now();
    manifest_["finishedAt"] = nullptr;
    flush_manifest();
  }

  void write_text(const std::string& name, const std::string& content) {
    if (!enabled_) return;
    std::ofstream f(dir_ / name, std::ios::trunc);
    f << content;
    if (!f) throw std::runtime_error("failed writing " + (dir_ / name).string());
  }

  // Result files must be bit-identical across reruns; wall time is runtime
  // metadata and lives in the manifest with the other timestamps.
  void write_result_json(const std::string& name, json j) {
    if (!enabled_) return;
    if (j.contains("wallClock")) {
      manifest_["wallClockSeconds"] = j["wallClock"];
      j["wallClock"] = nullptr;
    }
    write_text(name, j.dump(2) + "\n");
  }

  void finish() {
    if (!enabled_) return;
    manifest_["finishedAt"] = iso_now();
    flush_manifest();
  }

 private:
  void flush_manifest() {
    std::ofstream f(dir_ / "manifest.json", std::ios::trunc);
    f << manifest_.dump(2) << '\n';
  }

  bool enabled_;
  std::filesystem::path dir_;
  bool force_;
  json manifest_;
};

bool handle_dry_run(const CommonOpts& o, const json& config, bool history) {
  if (!o.dry_run) return false;
  std::cout << config.dump(2) << '\n';
  try {
    const lpp::ExperimentConfig cfg = make_config(o, false);
    std::printf("estimated layer memory: %.1f MiB (budget %zu MiB)\n",
                estimate_layer_mib(cfg, history), o.memory_mib);
  } catch (...) {
  }
  return true;
}

// ---------------------------------------------------------------------------

int cmd_count(const CommonOpts& o) {
  require_p_open_interval(o);
  const lpp::GraphMode mode = mode_of(o);
  const int n = o.n >= 0 ? o.n : (o.n_grid.empty() ? -1 : o.n_grid.back());
  if (n < 0) throw std::invalid_argument("count: --n required");
  const double alpha = o.alpha >= 0 ? o.alpha : 0.0;
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("count: --alpha must be in [0,1]");

  json config{{"p", o.p},           {"d", o.d},        {"mode", o.mode},
              {"b", o.b},           {"n", n},          {"alpha", alpha},
              {"seed", o.seed},     {"backend", o.backend}, {"threads", o.threads},
              {"memoryMiB", o.memory_mib}};
  if (o.dry_run) {
    std::cout << config.dump(2) << '\n';
    lpp::ExperimentConfig cfg;
    cfg.p = o.p;
    cfg.mode = mode;
    cfg.n_grid = {std::max(n, 1)};
    cfg.backend = backend_of(o);
    std::printf("estimated layer memory: %.1f MiB (budget %zu MiB)\n",
                estimate_layer_mib(cfg, true), o.memory_mib);
    return kExitOk;
  }

  OutputSink sink(o, "count");
  sink.plan({"table.csv", "summary.json"}, config);

  const lpp::Environment env(o.seed, o.p, o.b, mode);
  lpp::DpOptions opts;
  opts.backend = backend_of(o);
  opts.keep_history = true;
  opts.memory_budget_bytes = o.memory_mib << 20;
  const lpp::CountTable table = lpp::build_count_layers(env, n, opts);
  const lpp::MaxWeightTable maxes = lpp::build_max_layers(env, n, opts);

  const lpp::CountValue count = lpp::count_paths_at_least(table, n, alpha);
  const lpp::CountValue total = table.total(table.final_level());
  const int mw = maxes.max_weight(maxes.final_level());

  lpp::BigCount expected_total = 1;
  for (int i = 0; i < n; ++i) expected_total *= mode.out_degree();
  const bool conserved =
      table.backend() == lpp::CountBackend::ExactBigInt
          ? total.exact == expected_total
          : std::abs(total.log() - n * std::log(double(mode.out_degree()))) <=
                std::log1p(n * std::pow(2.0, -45));

  std::printf("N_%d(%g) = %s\n", n, alpha, count.to_string().c_str());
  std::printf("max_weight(%d) = %d\n", n, mw);
  std::printf("conservation: total %s expected %s -> %s\n", total.to_string().c_str(),
              expected_total.str().c_str(), conserved ? "ok" : "MISMATCH");

  if (sink.enabled()) {
    json summary{{"config", config},
                 {"count", count.to_string()},
                 {"countLog", count.log()},
                 {"maxWeight", mw},
                 {"conservation", conserved},
                 {"backend", table.backend() == lpp::CountBackend::ExactBigInt ? "exact" : "log"},
                 {"codeVersion", lpp::kCodeVersion}};
    std::ostringstream csv;
    lpp::dump_count_csv(csv, table);
    sink.write_text("table.csv", csv.str());
    sink.write_text("summary.json", summary.dump(2) + "\n");
    sink.finish();
  }
  return conserved ? kExitOk : kExitRuntime;
}

int run_experiment(const CommonOpts& o, const std::string& name, bool need_alpha,
                   const std::function<lpp::ExperimentResult(const lpp::ExperimentConfig&)>& op) {
  const lpp::ExperimentConfig cfg = make_config(o, need_alpha);
  if (handle_dry_run(o, lpp::to_json(cfg), false)) return kExitOk;

  OutputSink sink(o, name);
  sink.plan({"result.json", "result.csv"}, lpp::to_json(cfg));
  const lpp::ExperimentResult res = op(cfg);

  for (const lpp::Series& s : res.series) {
    std::printf("%s n=%d", s.statistic.c_str(), s.n);
    if (s.alpha) std::printf(" alpha=%g", *s.alpha);
    std::printf(": mean=%.10g stderr=%.3g", s.stats.mean, s.stats.stderr_val);
    if (s.zero_fraction) std::printf(" zeroFraction=%g", *s.zero_fraction);
    std::printf("\n");
  }
  if (sink.enabled()) {
    sink.write_result_json("result.json", res.to_json());
    std::ostringstream csv;
    res.write_csv(csv);
    sink.write_text("result.csv", csv.str());
    sink.finish();
  }
  return kExitOk;
}

int cmd_zero_prob(const CommonOpts& o) {
  const lpp::ExperimentConfig cfg = make_config(o, true);
  if (handle_dry_run(o, lpp::to_json(cfg), false)) return kExitOk;

  OutputSink sink(o, "zero-prob");
  sink.plan({"result.json", "result.csv"}, lpp::to_json(cfg));
  const lpp::ZeroProbeResult res = lpp::estimate_zero_probability(cfg);

  for (std::size_t i = 0; i < res.t_grid.size(); ++i)
    std::printf("t=%d freq=%g ci=%g\n", res.t_grid[i], res.freq[i], res.ci_half[i]);
  std::printf("mHat=%.6g marginOk=%d slopeDefined=%d slope=%g\n", res.m_hat, res.margin_ok,
              res.slope_defined, res.slope);

  if (sink.enabled()) {
    sink.write_result_json("result.json", res.to_json());
    std::ostringstream csv;
    csv << "t,freq,ci_half\n";
    for (std::size_t i = 0; i < res.t_grid.size(); ++i)
      csv << res.t_grid[i] << ',' << res.freq[i] << ',' << res.ci_half[i] << '\n';
    sink.write_text("result.csv", csv.str());
    sink.finish();
  }
  return kExitOk;
}

int cmd_second_moment(const CommonOpts& o, double overlap_beta, double overlap_rho) {
  const lpp::ExperimentConfig cfg = make_config(o, true);
  if (handle_dry_run(o, lpp::to_json(cfg), false)) return kExitOk;

  OutputSink sink(o, "second-moment");
  sink.plan({"result.json", "result.csv"}, lpp::to_json(cfg));
  const lpp::MomentRatioResult res = lpp::second_moment_ratio_experiment(cfg);

  for (const auto& c : res.cells)
    std::printf("alpha=%g n=%d ratio=%.6g ci=%.3g zeros=%zu\n", c.alpha, c.n, c.ratio, c.ci_half,
                c.zero_count);

  json j = res.to_json();
  if (overlap_beta > 0.0 && overlap_rho >= 0.0) {
    json sums = json::array();
    for (int n : cfg.n_grid) {
      const double s = lpp::second_moment_overlap_sum(n, cfg.alpha_grid.front(), overlap_beta,
                                                      overlap_rho, cfg.annealed());
      sums.push_back(json{{"n", n}, {"sum", s}});
      std::printf("overlap sum n=%d: %.6g\n", n, s);
    }
    j["overlapSums"] = sums;
    j["overlapBeta"] = overlap_beta;
    j["overlapRho"] = overlap_rho;
  }

  if (sink.enabled()) {
    sink.write_result_json("result.json", j);
    std::ostringstream csv;
    csv << "alpha,n,ratio,ci_half,zero_count\n";
    for (const auto& c : res.cells)
      csv << c.alpha << ',' << c.n << ',' << c.ratio << ',' << c.ci_half << ',' << c.zero_count
          << '\n';
    sink.write_text("result.csv", csv.str());
    sink.finish();
  }
  return kExitOk;
}

int cmd_scaling(const CommonOpts& o, const std::vector<double>& p_grid) {
  CommonOpts base = o;
  base.p = p_grid.empty() ? 0.1 : p_grid.front();  // the sweep owns p
  const lpp::ExperimentConfig cfg = make_config(base, false);
  json config = lpp::to_json(cfg);
  config["pGrid"] = p_grid;
  if (handle_dry_run(base, config, false)) return kExitOk;

  OutputSink sink(o, "scaling");
  sink.plan({"result.json", "result.csv"}, config);
  const lpp::ScalingFit fit = lpp::fit_small_p_scaling(p_grid, cfg);

  for (const auto& pt : fit.points)
    std::printf("p=%g mHat=%.6g ci=%.3g used=%d\n", pt.p, pt.m_hat, pt.ci_half, pt.used);
  std::printf("gamma=%.4f +- %.4f (fitOk=%d)\n", fit.gamma, fit.gamma_ci_half, fit.fit_ok);

  if (sink.enabled()) {
    sink.write_result_json("result.json", fit.to_json());
    std::ostringstream csv;
    csv << "p,m_hat,ci_half,used\n";
    for (const auto& pt : fit.points)
      csv << pt.p << ',' << pt.m_hat << ',' << pt.ci_half << ',' << pt.used << '\n';
    sink.write_text("result.csv", csv.str());
    sink.finish();
  }
  return kExitOk;
}

int cmd_collision(const CommonOpts& o, int truncation, long mc_samples, long mc_horizon) {
  require_p_open_interval(o);
  const lpp::AnnealedParams params(o.p, mode_of(o));
  const json config{{"p", o.p},
                    {"d", o.d},
                    {"mode", o.mode},
                    {"T", truncation},
                    {"mcSamples", mc_samples},
                    {"mcHorizon", mc_horizon},
                    {"seed", o.seed}};
  if (o.dry_run) {
    std::cout << config.dump(2) << '\n';
    return kExitOk;
  }

  OutputSink sink(o, "collision");
  sink.plan({"result.json", "result.csv"}, config);
  const lpp::CollisionEstimate est =
      lpp::walk_collision_probability(params, truncation, mc_samples, mc_horizon, o.seed);

  std::printf("lowerBound(T=%d) = %.6f\n", est.truncation, est.lower_bound);
  std::printf("pointEstimate = %.6f (mc freq %.6f +- %.6f over %ld samples, horizon %ld)\n",
              est.point_estimate, est.mc_frequency, est.mc_stderr, est.mc_samples, est.mc_horizon);

  if (sink.enabled()) {
    json j{{"config", config},
           {"lowerBound", est.lower_bound},
           {"pointEstimate", est.point_estimate},
           {"T", est.truncation},
           {"mcSamples", est.mc_samples},
           {"mcHorizon", est.mc_horizon},
           {"mcFrequency", est.mc_frequency},
           {"mcStderr", est.mc_stderr},
           {"codeVersion", lpp::kCodeVersion}};
    sink.write_result_json("result.json", j);
    std::ostringstream csv;
    csv << "T,lower_bound,point_estimate,mc_samples,mc_horizon,mc_frequency,mc_stderr\n"
        << est.truncation << ',' << est.lower_bound << ',' << est.point_estimate << ','
        << est.mc_samples << ',' << est.mc_horizon << ',' << est.mc_frequency << ','
        << est.mc_stderr << '\n';
    sink.write_text("result.csv", csv.str());
    sink.finish();
  }
  return kExitOk;
}

int cmd_growth_curve(const CommonOpts& o) {
  require_p_open_interval(o);
  const lpp::AnnealedParams params(o.p, mode_of(o));

  if (o.alpha >= 0.0)
    std::printf("alpha=%g phi=%.10g\n", o.alpha, lpp::annealed_growth_rate(o.alpha, params));

  std::vector<double> grid = o.alpha_grid;
  if (grid.empty())
    for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  std::vector<int> ns = o.n_grid;
  if (ns.empty() && o.n > 0) ns.push_back(o.n);

  const json config{{"p", o.p}, {"d", o.d}, {"mode", o.mode}, {"alphaGrid", grid}, {"nGrid", ns}};
  if (o.dry_run) {
    std::cout << config.dump(2) << '\n';
    return kExitOk;
  }

  OutputSink sink(o, "growth-curve");
  sink.plan({"curve.csv"}, config);

  std::ostringstream csv;
  csv << "alpha,phi";
  for (int n : ns) csv << ",expected_root_n" << n;
  csv << '\n';
  for (double a : grid) {
    csv << a << ',' << lpp::annealed_growth_rate(a, params);
    for (int n : ns) csv << ',' << std::exp(lpp::log_expected_count(n, a, params) / n);
    csv << '\n';
  }
  if (sink.enabled()) {
    sink.write_text("curve.csv", csv.str());
    sink.finish();
  } else if (o.alpha < 0.0) {
    std::cout << csv.str();
  }
  return kExitOk;
}

int cmd_interchange_check(const CommonOpts& o, int sample_size) {
  const lpp::ExperimentConfig cfg = make_config(o, true);
  if (handle_dry_run(o, lpp::to_json(cfg), true)) return kExitOk;

  OutputSink sink(o, "interchange-check");
  sink.plan({"result.json", "result.csv"}, lpp::to_json(cfg));
  const lpp::InterchangeProbeResult res = lpp::interchange_growth_probe(cfg);

  // Re-derive each best path and sample its family; interchange_family throws
  // if any member violates validity, distinctness, or the weight floor.
  const int n = cfg.primary_n();
  for (int r = 0; r < cfg.reps; ++r) {
    const lpp::Environment env = cfg.env_for_rep(r);
    lpp::DpOptions mopts = cfg.dp_options();
    mopts.keep_history = true;
    lpp::MaxWeightTable mt(env, n, mopts);
    mt.advance_to(mt.final_level());
    const lpp::PathRecord path = lpp::max_weight_path(mt, env);
    (void)lpp::interchange_family(env, path, sample_size,
                                  lpp::derive_seed(cfg.master_seed, 7'000'000 + r));
  }

  std::printf("cases=%d allBoundsOk=%d degenerate=%zu fractionGrowthAboveOne=%.3f\n", cfg.reps,
              res.all_bounds_ok, res.degenerate_count, res.fraction_growth_above_one);
  if (sink.enabled()) {
    sink.write_result_json("result.json", res.to_json());
    std::ostringstream csv;
    csv << "rep,base_weight,changes,selected,reduced_threshold,bound_ok,degenerate,growth\n";
    for (std::size_t r = 0; r < res.reps.size(); ++r) {
      const auto& rec = res.reps[r];
      csv << r << ',' << rec.base_weight << ',' << rec.changes << ',' << rec.selected << ','
          << rec.reduced_threshold << ',' << rec.bound_ok << ',' << rec.degenerate << ','
          << rec.growth << '\n';
    }
    sink.write_text("result.csv", csv.str());
    sink.finish();
  }
  return res.all_bounds_ok ? kExitOk : kExitRuntime;
}

int cmd_oracle_validate(const CommonOpts& o, int nmax, int seeds) {
  require_p_open_interval(o);
  const lpp::GraphMode mode = mode_of(o);
  const json config{{"p", o.p},      {"d", o.d},       {"mode", o.mode},
                    {"nmax", nmax},  {"seeds", seeds}, {"seed", o.seed}};
  if (o.dry_run) {
    std::cout << config.dump(2) << '\n';
    return kExitOk;
  }

  OutputSink sink(o, "oracle-validate");
  sink.plan({"result.json", "result.csv"}, config);

  int failures = 0;
  std::string first_why;
  std::ostringstream csv;
  csv << "seed_index,match\n";
  for (int s = 0; s < seeds; ++s) {
    const lpp::Environment env(lpp::derive_seed(o.seed, s), o.p, o.b, mode);
    lpp::DpOptions opts;
    opts.backend = lpp::BackendChoice::Exact;
    opts.keep_history = true;
    const lpp::CountTable table = lpp::build_count_layers(env, nmax, opts);
    const lpp::EnumerationStats oracle = lpp::enumerate_paths_oracle(env, nmax);
    std::string why;
    const bool match = lpp::counts_match_oracle(table, oracle, &why);
    csv << s << ',' << match << '\n';
    if (!match) {
      ++failures;
      if (first_why.empty()) first_why = "seed index " + std::to_string(s) + ": " + why;
    }
  }
  std::printf("oracle-validate: %d/%d seeds match\n", seeds - failures, seeds);
  if (failures) std::printf("first mismatch: %s\n", first_why.c_str());

  if (sink.enabled()) {
    json j{{"config", config},
           {"seedsChecked", seeds},
           {"failures", failures},
           {"firstMismatch", first_why},
           {"codeVersion", lpp::kCodeVersion}};
    sink.write_result_json("result.json", j);
    sink.write_text("result.csv", csv.str());
    sink.finish();
  }
  return failures == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Oriented-path counting laboratory: exact per-environment path "
      "statistics and Monte Carlo growth estimates"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", lpp::kCodeVersion);
  // Config keys live in a [subcommand] section; flags still win over the file.
  app.set_config("--config", "", "TOML config file (defaults < config < flags)");

  CommonOpts o;
  int truncation = 1000;
  long mc_samples = 0, mc_horizon = 0;
  int nmax = 8, seeds = 20, sample_size = 16;
  double overlap_beta = 0.0, overlap_rho = -1.0;
  std::vector<double> p_grid;

  auto* count = app.add_subcommand("count", "Exact count table, qualifying count, max weight");
  add_lattice_flags(count, o);
  add_run_flags(count, o);
  add_alpha_flags(count, o);
  add_n_flags(count, o);

  auto* maxd = app.add_subcommand("max-density", "Best path weight / n across replications");
  add_lattice_flags(maxd, o);
  add_run_flags(maxd, o);
  add_n_flags(maxd, o);
  maxd->add_option("--reps", o.reps, "Replications");

  auto* growth = app.add_subcommand("count-growth", "count^(1/n) across replications");
  add_lattice_flags(growth, o);
  add_run_flags(growth, o);
  add_alpha_flags(growth, o);
  add_n_flags(growth, o);
  growth->add_option("--reps", o.reps, "Replications");

  auto* zero = app.add_subcommand("zero-prob", "Empirical P{count = 0} across a length grid");
  add_lattice_flags(zero, o);
  add_run_flags(zero, o);
  add_alpha_flags(zero, o);
  add_n_flags(zero, o);
  zero->add_option("--reps", o.reps, "Replications");

  auto* second = app.add_subcommand("second-moment", "Monte Carlo E[N^2]/(E N)^2 per (alpha,n)");
  add_lattice_flags(second, o);
  add_run_flags(second, o);
  add_alpha_flags(second, o);
  add_n_flags(second, o);
  second->add_option("--reps", o.reps, "Replications");
  second->add_option("--overlap-beta", overlap_beta, "Also evaluate the overlap sum at this beta");
  second->add_option("--overlap-rho", overlap_rho, "Collision probability for the overlap sum");

  auto* scaling = app.add_subcommand("scaling", "Fit log mHat(p) = gamma log p + c over a p grid");
  add_lattice_flags(scaling, o);
  add_run_flags(scaling, o);
  add_n_flags(scaling, o);
  scaling->add_option("--reps", o.reps, "Replications");
  scaling->add_option("--p-grid", p_grid, "Comma-separated p values in (0,0.2]")
      ->delimiter(',')
      ->required();

  auto* collision = app.add_subcommand(
      "collision", "Probability two independent walks ever meet (exact by T + Monte Carlo)");
  add_lattice_flags(collision, o);
  add_run_flags(collision, o);
  collision->add_option("--T", truncation, "Exact first-passage truncation")
      ->check(CLI::PositiveNumber);
  collision->add_option("--mc-samples", mc_samples, "Monte Carlo walk pairs");
  collision->add_option("--mc-horizon", mc_horizon, "Monte Carlo horizon (0 = auto)");

  auto* curve = app.add_subcommand("growth-curve",
                                   "Annealed growth rate and finite-n expected-count roots");
  add_lattice_flags(curve, o);
  add_run_flags(curve, o);
  add_alpha_flags(curve, o);
  add_n_flags(curve, o);

  auto* inter = app.add_subcommand("interchange-check",
                                   "Validate step-swap families and their count lower bound");
  add_lattice_flags(inter, o);
  add_run_flags(inter, o);
  add_alpha_flags(inter, o);
  add_n_flags(inter, o);
  inter->add_option("--reps", o.reps, "Cases");
  inter->add_option("--sample-size", sample_size, "Family members sampled per case");

  auto* oracle =
      app.add_subcommand("oracle-validate", "Exhaustive enumeration vs the layer DP, per seed");
  add_lattice_flags(oracle, o);
  add_run_flags(oracle, o);
  oracle->add_option("--nmax", nmax, "Compare layers up to this length");
  oracle->add_option("--seeds", seeds, "Number of seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (count->parsed()) return cmd_count(o);
    if (maxd->parsed()) return run_experiment(o, "max-density", false, lpp::estimate_max_density);
    if (growth->parsed())
      return run_experiment(o, "count-growth", true, lpp::estimate_count_growth);
    if (zero->parsed()) return cmd_zero_prob(o);
    if (second->parsed()) return cmd_second_moment(o, overlap_beta, overlap_rho);
    if (scaling->parsed()) return cmd_scaling(o, p_grid);
    if (collision->parsed()) return cmd_collision(o, truncation, mc_samples, mc_horizon);
    if (curve->parsed()) return cmd_growth_curve(o);
    if (inter->parsed()) return cmd_interchange_check(o, sample_size);
    if (oracle->parsed()) return cmd_oracle_validate(o, nmax, seeds);
  } catch (const lpp::ResourceError& e) {
    std::fprintf(stderr, "resource refusal: %s\n", e.what());
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid arguments: %s\n", e.what());
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "invalid arguments: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitValidation;
}
