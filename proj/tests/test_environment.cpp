#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lpp/environment.hpp"
#include "lpp/rng.hpp"

using namespace lpp;

namespace {

// Independent recomputation of the site-uniform contract. Must stay in sync
// with the documented encoding: mix64 sponge over seed salt, level, and
// zig-zag coordinates in axis order. A drift here invalidates recorded runs.
double reference_uniform(std::uint64_t seed, const Vertex& v) {
  const std::uint64_t salt = 0x6c70702d656e7631ull;
  std::uint64_t h = mix64(seed ^ salt);
  h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.level)) + kGolden64));
  for (std::int32_t c : v.spatial) h = mix64(h ^ (zigzag64(c) + kGolden64));
  return unit_double(h);
}

Vertex random_vertex(SplitMix64& rng, int d) {
  Vertex v = origin(d);
  v.level = static_cast<std::int32_t>(rng.next_below(1000));
  for (auto& c : v.spatial) c = static_cast<std::int32_t>(rng.next_below(2001)) - 1000;
  return v;
}

}  // namespace

TEST_CASE("good bits are deterministic in (seed, vertex)") {
  const Environment env(123456789, 0.37, 1.0, GraphMode::semi(2));
  const Vertex v{{3, -4}, 7};
  CHECK(env.good_bit(v) == env.good_bit(v));
  const Environment env2(123456789, 0.37, 1.0, GraphMode::semi(2));
  CHECK(env.good_bit(v) == env2.good_bit(v));
}

TEST_CASE("site uniforms match the frozen reference chain") {
  SplitMix64 rng(2024);
  for (int d : {1, 2, 4}) {
    const Environment env(0xabcdef, 0.5, 1.0, GraphMode::semi(d));
    for (int i = 0; i < 200; ++i) {
      const Vertex v = random_vertex(rng, d);
      CHECK(env.uniform_at(v) == reference_uniform(0xabcdef, v));
    }
  }
}

TEST_CASE("empirical bit frequency matches p over a million sites") {
  const double p = 0.3;
  const Environment env(42, p, 1.0, GraphMode::semi(2));
  long long hits = 0;
  const int side = 1000;  // 10^6 distinct vertices
  for (int x = 0; x < side; ++x)
    for (int y = 0; y < side; ++y) hits += env.good_bit(Vertex{{x, y}, x + y});
  const double freq = static_cast<double>(hits) / (side * side);
  CHECK(std::abs(freq - p) < 0.002);
}

TEST_CASE("raising p with a shared seed only turns sites good") {
  SplitMix64 rng(5);
  const Environment lo(99, 0.2, 1.0, GraphMode::semi(2));
  const Environment hi(99, 0.7, 1.0, GraphMode::semi(2));
  for (int i = 0; i < 2000; ++i) {
    const Vertex v = random_vertex(rng, 2);
    CHECK(lo.good_bit(v) <= hi.good_bit(v));
  }
}

TEST_CASE("path weight: trivial cases and a recount oracle") {
  const GraphMode mode = GraphMode::semi(1);

  PathRecord empty;
  empty.start = origin(1);
  CHECK(path_weight(empty, Environment(1, 0.5, 1.0, mode)) == 0);

  // Degenerate all-good fixture: every site qualifies, so W = length.
  const Environment all_good(1, 1.0, 1.0, mode);
  PathRecord path;
  path.start = origin(1);
  path.steps = {Step{1, 1}, Step{1, -1}, Step{1, 1}};
  CHECK(path_weight(path, all_good) == 3);

  const Environment env(777, 0.5, 2.0, mode);
  int recount = 0;
  for (int i = 1; i <= path.length(); ++i) recount += env.good_bit(path.vertex_at(i, mode));
  CHECK(path_weight(path, env) == recount);

  PathRecord bad = path;
  bad.steps.push_back(Step{2, 1});  // axis out of range for d=1
  CHECK_THROWS_AS(path_weight(bad, env), std::invalid_argument);
}

TEST_CASE("weights are bounded by the path length") {
  SplitMix64 rng(31);
  const GraphMode mode = GraphMode::semi(2);
  const Environment env(6, 0.4, 1.0, mode);
  const auto steps = step_set(mode);
  for (int trial = 0; trial < 50; ++trial) {
    PathRecord path;
    path.start = origin(2);
    const int len = static_cast<int>(rng.next_below(25));
    for (int i = 0; i < len; ++i) path.steps.push_back(steps[rng.next_below(steps.size())]);
    const int w = path_weight(path, env);
    CHECK(w >= 0);
    CHECK(w <= len);
  }
}

TEST_CASE("forcing a bad bit good never lowers a path weight") {
  const GraphMode mode = GraphMode::semi(2);
  const Environment env(2718, 0.3, 1.0, mode);
  const auto steps = step_set(mode);
  SplitMix64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    PathRecord path;
    path.start = origin(2);
    for (int i = 0; i < 12; ++i) path.steps.push_back(steps[rng.next_below(steps.size())]);
    const Vertex mid = path.vertex_at(6, mode);
    if (env.good_bit(mid) == 1) continue;
    const Environment flipped = env.with_bit_forced(mid, 1);
    CHECK(path_weight(path, flipped) == path_weight(path, env) + 1);
  }
}

TEST_CASE("environment parameter validation") {
  CHECK_THROWS_AS(Environment(1, -0.1, 1.0, GraphMode::semi(1)), std::invalid_argument);
  CHECK_THROWS_AS(Environment(1, 1.5, 1.0, GraphMode::semi(1)), std::invalid_argument);
  CHECK_THROWS_AS(Environment(1, 0.5, 0.0, GraphMode::semi(1)), std::invalid_argument);
  CHECK_NOTHROW(Environment(1, 0.0, 1.0, GraphMode::semi(1)));  // degenerate fixtures allowed
  CHECK_NOTHROW(Environment(1, 1.0, 1.0, GraphMode::semi(1)));
}
