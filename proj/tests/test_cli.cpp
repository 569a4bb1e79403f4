#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "lpp/counting.hpp"

#ifndef LPPLAB_BIN
#error "LPPLAB_BIN must point at the built CLI"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const fs::path tmp = fs::temp_directory_path() / "lpplab_cli_out.txt";
  const std::string cmd = std::string(LPPLAB_BIN) + " " + args + " > " + tmp.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(tmp);
  std::stringstream ss;
  ss << f.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("lpplab_test_" + tag)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cli count matches the library byte for byte") {
  TempDir dir("count");
  const RunResult r = run_cli("count --d 1 --n 8 --seed 7 --alpha 0.5 --p 0.5 --out " +
                              dir.path.string());
  REQUIRE(r.exit_code == 0);

  const lpp::Environment env(7, 0.5, 1.0, lpp::GraphMode::semi(1));
  lpp::DpOptions opts;
  opts.keep_history = true;
  const lpp::CountTable table = lpp::build_count_layers(env, 8, opts);
  const lpp::CountValue want = lpp::count_paths_at_least(table, 8, 0.5);

  CHECK(r.out.find("N_8(0.5) = " + want.to_string()) != std::string::npos);

  std::ostringstream csv;
  lpp::dump_count_csv(csv, table);
  CHECK(slurp(dir.path / "table.csv") == csv.str());

  const auto summary = nlohmann::json::parse(slurp(dir.path / "summary.json"));
  CHECK(summary["count"].get<std::string>() == want.to_string());
  CHECK(summary["conservation"].get<bool>());

  const auto manifest = nlohmann::json::parse(slurp(dir.path / "manifest.json"));
  CHECK(manifest["subcommand"] == "count");
  CHECK_FALSE(manifest["finishedAt"].is_null());
}

TEST_CASE("cli trivial counts") {
  CHECK(run_cli("count --d 1 --n 0 --alpha 0").out.find("N_0(0) = 1") != std::string::npos);
  CHECK(run_cli("count --d 2 --n 5 --alpha 0").out.find("N_5(0) = 1024") != std::string::npos);
}

TEST_CASE("cli exit codes: validation, resource refusal, unknown flags") {
  CHECK(run_cli("count --d 1 --n 5 --alpha 2.0").exit_code == 2);
  CHECK(run_cli("count --d 1 --n 5 --p 1.5").exit_code == 2);
  CHECK(run_cli("count --no-such-flag").exit_code == 2);
  CHECK(run_cli("max-density --d 1 --n-grid 9,5 --reps 3").exit_code == 2);
  CHECK(run_cli("count-growth --d 1 --n 5 --n-grid 5,10 --alpha 0.5").exit_code == 2);
  CHECK(run_cli("count --d 3 --n 60 --alpha 0.5 --memory-mib 1").exit_code == 3);
}

TEST_CASE("cli refuses to overwrite without --force") {
  TempDir dir("force");
  const std::string args =
      "count --d 1 --n 4 --alpha 0.5 --out " + dir.path.string();
  REQUIRE(run_cli(args).exit_code == 0);
  CHECK(run_cli(args).exit_code == 2);
  CHECK(run_cli(args + " --force").exit_code == 0);
}

TEST_CASE("cli dry run prints the resolved config and writes nothing") {
  TempDir dir("dry");
  const RunResult r = run_cli("count-growth --d 1 --n 10 --alpha 0.5 --reps 3 --dry-run --out " +
                              dir.path.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"nGrid\"") != std::string::npos);
  CHECK(r.out.find("estimated layer memory") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "result.json"));
}

TEST_CASE("cli runs are bit-identical for fixed seeds") {
  TempDir a("det_a"), b("det_b");
  const std::string common =
      "count-growth --d 1 --n 12 --alpha-grid 0.3,0.6 --reps 5 --seed 9 --out ";
  REQUIRE(run_cli(common + a.path.string()).exit_code == 0);
  REQUIRE(run_cli(common + b.path.string() + " --threads 3").exit_code == 0);
  CHECK(slurp(a.path / "result.json") == slurp(b.path / "result.json"));
  CHECK(slurp(a.path / "result.csv") == slurp(b.path / "result.csv"));
}

TEST_CASE("cli growth-curve prints the trivial-regime value at alpha = p") {
  const RunResult r = run_cli("growth-curve --d 1 --p 0.5 --alpha 0.5");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("phi=2") != std::string::npos);
}

TEST_CASE("cli oracle-validate passes on small lattices") {
  const RunResult r = run_cli("oracle-validate --d 1 --nmax 9 --seeds 10 --p 0.45");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("10/10 seeds match") != std::string::npos);
}

TEST_CASE("cli collision reports both estimates") {
  const RunResult r = run_cli("collision --d 1 --T 2000");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("lowerBound") != std::string::npos);
}

TEST_CASE("cli reads toml config files with flag precedence") {
  TempDir dir("toml");
  fs::create_directories(dir.path);
  const fs::path cfg = dir.path / "run.toml";
  {
    std::ofstream f(cfg);
    f << "[count-growth]\nd = 1\nn = 10\nalpha = 0.5\nreps = 4\nseed = 3\np = 0.4\n";
  }
  const RunResult r = run_cli("count-growth --config " + cfg.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("n=10") != std::string::npos);
  // flags override the file
  const RunResult r2 = run_cli("count-growth --config " + cfg.string() + " --n 6");
  CHECK(r2.exit_code == 0);
  CHECK(r2.out.find("n=6") != std::string::npos);
}
