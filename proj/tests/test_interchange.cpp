#include <doctest.h>

#include <set>

#include "lpp/counting.hpp"
#include "lpp/interchange.hpp"
#include "lpp/rng.hpp"

using namespace lpp;

namespace {

PathRecord straight_path(int d, int n) {
  PathRecord p;
  p.start = origin(d);
  p.steps.assign(static_cast<std::size_t>(n), Step{1, 1});
  return p;
}

PathRecord alternating_path(int d, int n) {
  PathRecord p;
  p.start = origin(d);
  for (int i = 0; i < n; ++i) p.steps.push_back(Step{1, static_cast<std::int16_t>(i % 2 ? -1 : 1)});
  return p;
}

PathRecord random_path(SplitMix64& rng, const GraphMode& mode, int n) {
  const auto steps = step_set(mode);
  PathRecord p;
  p.start = origin(mode.d);
  for (int i = 0; i < n; ++i) p.steps.push_back(steps[rng.next_below(steps.size())]);
  return p;
}

}  // namespace

TEST_CASE("direction changes: straight, alternating, and a recount oracle") {
  CHECK(direction_changes(straight_path(1, 9)).count == 0);
  CHECK(direction_changes(alternating_path(1, 9)).count == 8);

  SplitMix64 rng(314);
  const GraphMode mode = GraphMode::semi(2);
  const PathRecord p = random_path(rng, mode, 20);
  const DirectionChanges dc = direction_changes(p);
  std::vector<int> recount;
  for (int k = 0; k + 1 < p.length(); ++k)
    if (!(p.steps[static_cast<std::size_t>(k)] == p.steps[static_cast<std::size_t>(k + 1)]))
      recount.push_back(k);
  CHECK(dc.positions == recount);
  CHECK(dc.count == static_cast<int>(recount.size()));

  CHECK_THROWS_AS(direction_changes(straight_path(1, 1)), std::invalid_argument);
}

TEST_CASE("a path with no changes is a family of one") {
  const Environment env(4, 0.5, 1.0, GraphMode::semi(1));
  const InterchangeFamily fam = interchange_family(env, straight_path(1, 8), 4, 1);
  CHECK(fam.report.qualifying.empty());
  CHECK(fam.report.selected.empty());
  CHECK(fam.report.family_size == 1);
  REQUIRE(fam.sample.size() == 1);
  CHECK(fam.sample[0].path.steps == straight_path(1, 8).steps);
  CHECK(fam.report.weight_floor == fam.report.base_weight);
}

TEST_CASE("one swap moves exactly the vertex at level k+1") {
  const GraphMode mode = GraphMode::semi(2);
  PathRecord p;
  p.start = origin(2);
  p.steps = {Step{1, 1}, Step{2, 1}, Step{2, 1}};  // single change at k=0
  const DirectionChanges dc = direction_changes(p);
  REQUIRE(dc.positions == std::vector<int>{0});

  const PathRecord q = apply_interchanges(p, dc.positions);
  int differing = 0;
  for (int i = 0; i <= p.length(); ++i)
    if (!(p.vertex_at(i, mode) == q.vertex_at(i, mode))) ++differing;
  CHECK(differing == 1);
  CHECK_FALSE(p.vertex_at(1, mode) == q.vertex_at(1, mode));
  CHECK(p.endpoint(mode) == q.endpoint(mode));
}

TEST_CASE("greedy selection keeps at least half the changes, non-adjacently") {
  SplitMix64 rng(555);
  const GraphMode mode = GraphMode::semi(2);
  const Environment env(6, 0.4, 1.0, mode);
  for (int trial = 0; trial < 25; ++trial) {
    const PathRecord p = random_path(rng, mode, 16);
    const InterchangeFamily fam = interchange_family(env, p, 0, 1);
    const int m = static_cast<int>(fam.report.qualifying.size());
    const int s = static_cast<int>(fam.report.selected.size());
    CHECK(2 * s >= m);
    for (std::size_t i = 1; i < fam.report.selected.size(); ++i)
      CHECK(fam.report.selected[i] - fam.report.selected[i - 1] >= 2);
    CHECK(fam.report.family_size == (BigCount(1) << s));
  }
}

TEST_CASE("sampled family members are valid, distinct, and above the weight floor") {
  const GraphMode mode = GraphMode::semi(2);
  const Environment env(20260809, 0.5, 1.0, mode);
  SplitMix64 rng(77);
  const PathRecord base = random_path(rng, mode, 14);
  const InterchangeFamily fam = interchange_family(env, base, 10, 9);

  std::set<std::vector<Step>> distinct;
  for (const auto& s : fam.sample) {
    CHECK(s.path.is_valid(mode));
    CHECK(distinct.insert(s.path.steps).second);
    CHECK(s.weight == path_weight(s.path, env));
    CHECK(s.weight >= fam.report.base_weight - static_cast<int>(s.applied.size()));
    CHECK(s.weight >= fam.report.weight_floor);
    CHECK(s.path.endpoint(mode) == base.endpoint(mode));
  }
  if (fam.report.family_size > 10) CHECK(fam.sample.size() == 10);
}

TEST_CASE("family bound: the exact count at the reduced threshold covers 2^selected") {
  SplitMix64 rng(4242);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_below(2));
    const int n = 6 + static_cast<int>(rng.next_below(9));  // up to 14
    const Environment env(rng.next(), 0.35, 1.0, GraphMode::semi(d));

    DpOptions opts;
    opts.keep_history = true;
    const MaxWeightTable m = build_max_layers(env, n, opts);
    const PathRecord best = max_weight_path(m, env);
    const InterchangeFamily fam = interchange_family(env, best, 0, 3);

    const int s = static_cast<int>(fam.report.selected.size());
    const int floor_k = fam.report.base_weight - s;
    const CountTable t = build_count_layers(env, n, {});
    CHECK(t.count_at_least(n, std::max(0, floor_k)).exact >= (BigCount(1) << s));
  }
}
