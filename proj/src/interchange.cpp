#include "lpp/interchange.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "lpp/rng.hpp"

namespace lpp {

DirectionChanges direction_changes(const PathRecord& path) {
  if (path.length() < 2)
    throw std::invalid_argument("direction_changes: path length must be at least 2");
  DirectionChanges dc;
  for (int k = 0; k + 1 < path.length(); ++k) {
    if (!(path.steps[static_cast<std::size_t>(k + 1)] == path.steps[static_cast<std::size_t>(k)]))
      dc.positions.push_back(k);
  }
  dc.count = static_cast<int>(dc.positions.size());
  return dc;
}

PathRecord apply_interchanges(const PathRecord& base, std::span<const int> applied) {
  PathRecord out = base;
  int prev = -2;
  for (int k : applied) {
    if (k < 0 || k + 1 >= base.length())
      throw std::invalid_argument("apply_interchanges: position out of range");
    if (k - prev < 2) throw std::invalid_argument("apply_interchanges: adjacent positions");
    std::swap(out.steps[static_cast<std::size_t>(k)], out.steps[static_cast<std::size_t>(k + 1)]);
    prev = k;
  }
  return out;
}

InterchangeFamily interchange_family(const Environment& env, const PathRecord& base,
                                     int sample_size, std::uint64_t seed) {
  if (!base.is_valid(env.mode()))
    throw std::invalid_argument("interchange_family: base path invalid");
  if (sample_size < 0) throw std::invalid_argument("interchange_family: sample_size negative");

  InterchangeFamily fam;
  fam.report.base = base;
  fam.report.base_weight = path_weight(base, env);

  if (base.length() >= 2) fam.report.qualifying = direction_changes(base).positions;

  // Greedy from the left, skipping anything adjacent to the previous pick.
  // Keeps at least half of the qualifying positions.
  int prev = -2;
  for (int k : fam.report.qualifying) {
    if (k - prev >= 2) {
      fam.report.selected.push_back(k);
      prev = k;
    }
  }
  const int s = static_cast<int>(fam.report.selected.size());
  fam.report.family_size = BigCount(1) << s;
  fam.report.weight_floor = fam.report.base_weight - s;

  if (sample_size == 0) return fam;

  // Distinct subsets of the selected positions.
  std::vector<std::vector<int>> subsets;
  if (s <= 30 && fam.report.family_size <= sample_size) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
      std::vector<int> applied;
      for (int i = 0; i < s; ++i)
        if (mask & (std::uint64_t{1} << i)) applied.push_back(fam.report.selected[static_cast<std::size_t>(i)]);
      subsets.push_back(std::move(applied));
    }
  } else {
    SplitMix64 rng(seed);
    std::set<std::vector<int>> seen;
    const int want = sample_size;
    while (static_cast<int>(seen.size()) < want) {
      std::vector<int> applied;
      for (int i = 0; i < s; ++i)
        if (rng.next() & 1) applied.push_back(fam.report.selected[static_cast<std::size_t>(i)]);
      seen.insert(std::move(applied));
    }
    subsets.assign(seen.begin(), seen.end());
  }

  std::set<std::vector<Step>> distinct_paths;
  for (auto& applied : subsets) {
    InterchangeSample samp;
    samp.path = apply_interchanges(base, applied);
    samp.applied = std::move(applied);
    if (!samp.path.is_valid(env.mode()))
      throw std::logic_error("interchange_family: generated path invalid");
    samp.weight = path_weight(samp.path, env);
    if (samp.weight < fam.report.base_weight - static_cast<int>(samp.applied.size()))
      throw std::logic_error("interchange_family: weight fell below its floor");
    if (!distinct_paths.insert(samp.path.steps).second)
      throw std::logic_error("interchange_family: duplicate path generated");
    fam.sample.push_back(std::move(samp));
  }
  return fam;
}

}  // namespace lpp
