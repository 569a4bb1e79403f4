#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "lpp/counting.hpp"
#include "lpp/enumeration.hpp"
#include "lpp/rng.hpp"

using namespace lpp;

namespace {

BigCount ipow(int base, int exp) {
  BigCount r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

TEST_CASE("threshold: smallest integer >= alpha*n, ties inclusive") {
  CHECK(weight_threshold(0.0, 10) == 0);
  CHECK(weight_threshold(0.5, 10) == 5);
  CHECK(weight_threshold(0.3, 20) == 6);
  CHECK(weight_threshold(0.51, 10) == 6);
  CHECK(weight_threshold(1.0, 7) == 7);
  CHECK(weight_threshold(0.4, 12) == 5);  // ceil(4.8)
}

TEST_CASE("a zero-length build is the single start entry") {
  const Environment env(9, 0.5, 1.0, GraphMode::semi(1));
  const CountTable t = build_count_layers(env, 0);
  CHECK(t.endpoint_count(0) == 1);
  CHECK(t.total(0).exact == 1);
  CHECK(t.max_nonzero_weight(0) == 0);
  CHECK(count_paths_at_least(t, 0, 0.0).exact == 1);
}

TEST_CASE("total path conservation, exact backend") {
  for (int d : {1, 2, 3}) {
    const Environment env(17 + d, 0.4, 1.0, GraphMode::semi(d));
    CountTable t(env, 12, {});
    while (t.top_level() < t.final_level()) {
      t.advance();
      const int rel = t.top_level();
      CHECK(t.total(rel).exact == ipow(2 * d, rel));
    }
  }
}

TEST_CASE("total path conservation, fully oriented") {
  const Environment env(5, 0.3, 1.0, GraphMode::fully(2));
  const CountTable t = build_count_layers(env, 9);
  CHECK(t.total(9).exact == ipow(3, 9));
}

TEST_CASE("log backend conserves totals within n*2^-45 relative error") {
  for (int d : {1, 2}) {
    const Environment env(23 + d, 0.4, 1.0, GraphMode::semi(d));
    DpOptions opts;
    opts.backend = BackendChoice::Log;
    CountTable t(env, 20, opts);
    t.advance_to(20);
    const double got = t.total(20).log();
    const double want = 20.0 * std::log(2.0 * d);
    CHECK(std::abs(got - want) <= std::log1p(20 * std::pow(2.0, -45)));
  }
}

TEST_CASE("layer DP equals exhaustive enumeration entry by entry") {
  for (int d : {1, 2}) {
    for (int s = 0; s < 10; ++s) {
      const Environment env(derive_seed(1001, s), 0.35, 1.0, GraphMode::semi(d));
      DpOptions opts;
      opts.keep_history = true;
      const int n = d == 1 ? 8 : 6;
      const CountTable t = build_count_layers(env, n, opts);
      const EnumerationStats oracle = enumerate_paths_oracle(env, n);
      std::string why;
      const bool ok = counts_match_oracle(t, oracle, &why);
      INFO("d=", d, " seed index ", s, ": ", why);
      CHECK(ok);
    }
  }
  // Same check for the fully oriented edge set.
  const Environment env(404, 0.5, 1.0, GraphMode::fully(2));
  DpOptions opts;
  opts.keep_history = true;
  const CountTable t = build_count_layers(env, 6, opts);
  const EnumerationStats oracle = enumerate_paths_oracle(env, 6);
  std::string why;
  CHECK(counts_match_oracle(t, oracle, &why));
}

TEST_CASE("enumeration oracle: path totals and the cap refusal") {
  const Environment env(3, 0.5, 1.0, GraphMode::semi(1));
  CHECK(enumerate_paths_oracle(env, 0).full_length_paths == 1);  // the empty path
  CHECK(enumerate_paths_oracle(env, 3).full_length_paths == 8);

  EnumOptions tight;
  tight.path_cap = 100;
  CHECK_THROWS_WITH_AS(enumerate_paths_oracle(env, 20, tight), doctest::Contains("cap"),
                       ResourceError);
  int visited = 0;
  enumerate_paths(env, 2, {}, [&](const PathRecord& p, int w) {
    CHECK(p.length() == 2);
    CHECK(w == path_weight(p, env));
    ++visited;
  });
  CHECK(visited == 4);
}

TEST_CASE("qualifying counts at the extremes of alpha") {
  const Environment env(31, 0.5, 1.0, GraphMode::semi(2));
  const CountTable t = build_count_layers(env, 6);
  CHECK(count_paths_at_least(t, 6, 0.0).exact == ipow(4, 6));

  // With any bad site on every path the all-good threshold empties the count.
  const MaxWeightTable m = build_max_layers(env, 6);
  REQUIRE(m.max_weight(6) < 6);
  CHECK(count_paths_at_least(t, 6, 1.0).is_zero());

  CHECK_THROWS_AS(count_paths_at_least(t, 6, 1.5), std::domain_error);
  CHECK_THROWS_AS(count_paths_at_least(t, 6, -0.1), std::domain_error);
}

TEST_CASE("qualifying count equals the enumeration count at alpha = 1/2") {
  const Environment env(77, 0.5, 1.0, GraphMode::semi(1));
  const CountTable t = build_count_layers(env, 10);
  const EnumerationStats oracle = enumerate_paths_oracle(env, 10);
  BigCount want = 0;
  for (const auto& [key, cnt] : oracle.joint[10])
    if (key.second >= 5) want += cnt;
  CHECK(count_paths_at_least(t, 10, 0.5).exact == want);
}

TEST_CASE("per-endpoint counts partition the total and vanish off the diamond") {
  const Environment env(55, 0.4, 1.0, GraphMode::semi(2));
  DpOptions opts;
  opts.keep_history = true;
  const CountTable t = build_count_layers(env, 6, opts);

  const double alpha = 0.5;
  BigCount sum = 0;
  std::map<std::vector<std::int32_t>, bool> seen;
  t.for_each_entry(6, [&](std::span<const std::int32_t> sp, int, const CountValue&) {
    seen[{sp.begin(), sp.end()}] = true;
  });
  for (const auto& [sp, unused] : seen) {
    (void)unused;
    sum += count_paths_at_least_to(t, 6, alpha, Vertex{sp, 6}).exact;
  }
  CHECK(sum == count_paths_at_least(t, 6, alpha).exact);

  CHECK(count_paths_at_least_to(t, 6, alpha, Vertex{{7, 0}, 6}).is_zero());
  CHECK(count_paths_at_least_to(t, 6, alpha, Vertex{{400, 0}, 6}).is_zero());

  // Restricted count against the oracle at one endpoint.
  const EnumerationStats oracle = enumerate_paths_oracle(env, 6);
  BigCount want = 0;
  for (const auto& [key, cnt] : oracle.joint[6])
    if (key.first == std::vector<std::int32_t>{2, 0} && key.second >= 3) want += cnt;
  CHECK(count_paths_at_least_to(t, 6, alpha, Vertex{{2, 0}, 6}).exact == want);
}

TEST_CASE("max-weight recursion against brute force and the count table") {
  const Environment env(88, 0.5, 1.0, GraphMode::semi(1));
  const MaxWeightTable m = build_max_layers(env, 8);
  const EnumerationStats oracle = enumerate_paths_oracle(env, 8);
  CHECK(m.max_weight(8) == oracle.max_weight[8]);

  const CountTable t = build_count_layers(env, 8);
  CHECK(m.max_weight(8) == t.max_nonzero_weight(8));

  const Environment all_good(1, 1.0, 1.0, GraphMode::semi(2));
  CHECK(build_max_layers(all_good, 7).max_weight(7) == 7);
}

TEST_CASE("lexicographically least maximizing endpoint") {
  // All-good fixture at t=1: both endpoints reach the maximum; -1 wins.
  const Environment all_good(1, 1.0, 1.0, GraphMode::semi(1));
  const MaxWeightTable m1 = build_max_layers(all_good, 1);
  CHECK(m1.argmax_endpoint_lex(1) == Vertex{{-1}, 1});

  const Environment env(91, 0.45, 1.0, GraphMode::semi(2));
  const MaxWeightTable m = build_max_layers(env, 5);
  const Vertex got = m.argmax_endpoint_lex(5);

  const EnumerationStats oracle = enumerate_paths_oracle(env, 5);
  std::map<std::vector<std::int32_t>, int> best;
  for (const auto& [key, cnt] : oracle.joint[5]) {
    (void)cnt;
    auto& b = best[key.first];
    b = std::max(b, key.second);
  }
  int top = -1;
  for (const auto& [sp, w] : best) top = std::max(top, w);
  std::vector<std::int32_t> first;
  for (const auto& [sp, w] : best)
    if (w == top) {
      first = sp;  // std::map iterates in lexicographic order
      break;
    }
  CHECK(got.spatial == first);
  CHECK(m.max_weight(5) == top);
}

TEST_CASE("count is non-increasing in alpha") {
  const Environment env(12, 0.5, 1.0, GraphMode::semi(2));
  const CountTable t = build_count_layers(env, 10);
  BigCount prev = count_paths_at_least(t, 10, 0.0).exact;
  for (double a = 0.1; a <= 1.0; a += 0.1) {
    const BigCount cur = count_paths_at_least(t, 10, a).exact;
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("forcing one site good never lowers any qualifying count") {
  const Environment env(13, 0.3, 1.0, GraphMode::semi(1));
  const Vertex target{{1}, 3};
  REQUIRE(env.good_bit(target) == 0);
  const Environment flipped = env.with_bit_forced(target, 1);
  const CountTable before = build_count_layers(env, 8);
  const CountTable after = build_count_layers(flipped, 8);
  for (double a = 0.0; a <= 1.0; a += 0.125)
    CHECK(after.count_at_least(8, weight_threshold(a, 8)).exact >=
          before.count_at_least(8, weight_threshold(a, 8)).exact);
}

TEST_CASE("endpoint spread bound and its pigeonhole consequence") {
  const Environment env(19, 0.4, 1.0, GraphMode::semi(2));
  const int n = 9;
  const CountTable t = build_count_layers(env, n);
  const double bound = std::pow(n + 1.0, 2);
  CHECK(static_cast<double>(t.endpoint_count(n)) <= bound);

  const double alpha = 0.4;
  const int thr = weight_threshold(alpha, n);
  BigCount best = 0;
  t.for_each_entry(n, [&](std::span<const std::int32_t> sp, int k, const CountValue&) {
    if (k < thr) return;
    const BigCount v = t.count_at_least_at(n, sp, thr).exact;
    if (v > best) best = v;
  });
  // best * (n+1)^d >= total qualifying count
  CHECK(best * static_cast<long long>(bound) >= count_paths_at_least(t, n, alpha).exact);
}

TEST_CASE("composing best paths through the level-s maximizer is superadditive") {
  SplitMix64 rng(2026);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_below(2));
    const int s = 3 + static_cast<int>(rng.next_below(8));
    const int t = 3 + static_cast<int>(rng.next_below(8));
    const Environment env(rng.next(), 0.4, 1.0, GraphMode::semi(d));

    DpOptions opts;
    opts.keep_history = true;
    const MaxWeightTable full = build_max_layers(env, s + t, opts);
    const Vertex ys = full.argmax_endpoint_lex(s);
    const int m_s = full.max_weight_at(s, ys.spatial);
    REQUIRE(m_s == full.max_weight(s));

    DpOptions shifted;
    shifted.start = ys;
    const MaxWeightTable cont = build_max_layers(env, t, shifted);
    const int m_t = cont.max_weight(cont.final_level());

    CHECK(full.max_weight(s + t) >= m_s + m_t);
  }
}

TEST_CASE("memory refusals name the offending level") {
  const Environment env(3, 0.5, 1.0, GraphMode::semi(2));
  DpOptions opts;
  opts.memory_budget_bytes = 2000;
  CountTable t(env, 40, opts);
  CHECK_THROWS_WITH_AS(t.advance_to(40), doctest::Contains("level"), ResourceError);
}

TEST_CASE("coordinate bounds are an error, not wraparound") {
  const Environment env(3, 0.5, 1.0, GraphMode::semi(1));
  DpOptions opts;
  opts.coord_bound = 5;
  CountTable t(env, 10, opts);
  CHECK_THROWS(t.advance_to(10));
  DpOptions ok;
  ok.coord_bound = 10;
  CountTable t2(env, 10, ok);
  CHECK_NOTHROW(t2.advance_to(10));
}

TEST_CASE("history retention and rolling mode") {
  const Environment env(41, 0.5, 1.0, GraphMode::semi(1));
  const CountTable rolling = build_count_layers(env, 6);
  CHECK_THROWS_AS(rolling.total(3), std::logic_error);
  DpOptions opts;
  opts.keep_history = true;
  const CountTable hist = build_count_layers(env, 6, opts);
  CHECK(hist.total(3).exact == 8);
  CHECK(hist.total(6).exact == 64);
}

TEST_CASE("reconstructed best path reproduces the best weight") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 15; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_below(2));
    const int n = 5 + static_cast<int>(rng.next_below(10));
    const Environment env(rng.next(), 0.45, 1.0, GraphMode::semi(d));
    DpOptions opts;
    opts.keep_history = true;
    const MaxWeightTable m = build_max_layers(env, n, opts);
    const PathRecord path = max_weight_path(m, env);
    REQUIRE(path.is_valid(env.mode()));
    CHECK(path.length() == n);
    CHECK(path_weight(path, env) == m.max_weight(n));
    CHECK(path.endpoint(env.mode()) == m.argmax_endpoint_lex(n));
  }
}

TEST_CASE("count CSV dump shape") {
  const Environment all_good(1, 1.0, 1.0, GraphMode::semi(1));
  DpOptions opts;
  opts.keep_history = true;
  const CountTable t = build_count_layers(all_good, 1, opts);
  std::ostringstream os;
  dump_count_csv(os, t);
  CHECK(os.str() ==
        "level,endpoint,k,count,backend\n"
        "0,\"0:(0)\",0,1,exact\n"
        "1,\"1:(-1)\",1,1,exact\n"
        "1,\"1:(1)\",1,1,exact\n");
}

TEST_CASE("count CSV under the log backend carries log10 values") {
  const Environment all_good(1, 1.0, 1.0, GraphMode::semi(1));
  DpOptions opts;
  opts.keep_history = true;
  opts.backend = BackendChoice::Log;
  const CountTable t = build_count_layers(all_good, 2, opts);
  std::ostringstream os;
  dump_count_csv(os, t);
  const std::string csv = os.str();
  CHECK(csv.find(",log\n") != std::string::npos);
  // two paths meet at the origin's column: count 2 -> log10 = 0.301...
  CHECK(csv.find("2,\"2:(0)\",2,0.30102999566398114,log") != std::string::npos);
}

TEST_CASE("log and exact backends agree on a mid-size count") {
  const Environment env(71, 0.45, 1.0, GraphMode::semi(2));
  DpOptions log_opts;
  log_opts.backend = BackendChoice::Log;
  const CountTable lt = build_count_layers(env, 12, log_opts);
  const CountTable et = build_count_layers(env, 12, {});
  REQUIRE(et.backend() == CountBackend::ExactBigInt);
  REQUIRE(lt.backend() == CountBackend::LogSpace);
  for (double a : {0.0, 0.25, 0.5, 0.75}) {
    const double le = count_paths_at_least(et, 12, a).log();
    const double ll = count_paths_at_least(lt, 12, a).log();
    CHECK(std::abs(ll - le) < 1e-9);
  }
}

TEST_CASE("big-integer backend kicks in past 62 bits and stays exact") {
  const Environment env(7, 0.5, 1.0, GraphMode::semi(1));
  const CountTable t = build_count_layers(env, 70, {});
  REQUIRE(t.backend() == CountBackend::ExactBigInt);
  CHECK(t.total(70).exact == ipow(2, 70));
}
