#ifndef LPP_INTERCHANGE_HPP
#define LPP_INTERCHANGE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "lpp/counting.hpp"
#include "lpp/environment.hpp"

namespace lpp {

/// Positions k in 0..length-2 where step k+1 differs from step k.
struct DirectionChanges {
  int count = 0;
  std::vector<int> positions;
};

DirectionChanges direction_changes(const PathRecord& path);

/// Swapping steps k and k+1 at a direction change moves only the vertex at
/// level k+1, so swaps at positions >= 2 apart commute and each subset of
/// them yields a distinct path whose weight drops by at most one per swap.
struct InterchangeReport {
  PathRecord base;
  int base_weight = 0;
  std::vector<int> qualifying;  // all direction-change positions
  std::vector<int> selected;    // greedy non-adjacent subset, gaps >= 2
  BigCount family_size;         // 2^selected.size()
  int weight_floor = 0;         // base_weight - selected.size()
};

struct InterchangeSample {
  PathRecord path;
  std::vector<int> applied;  // subset of selected positions swapped
  int weight = 0;
};

struct InterchangeFamily {
  InterchangeReport report;
  std::vector<InterchangeSample> sample;
};

/// Swap steps (k, k+1) for every position in `applied` (must be pairwise
/// non-adjacent qualifying positions).
PathRecord apply_interchanges(const PathRecord& base, std::span<const int> applied);

/// Build the report for `base` and draw up to sample_size distinct family
/// members (all of them when the family is small). Every sampled path is
/// validated and re-weighed against the floor; violations throw.
InterchangeFamily interchange_family(const Environment& env, const PathRecord& base,
                                     int sample_size, std::uint64_t seed);

}  // namespace lpp

#endif
