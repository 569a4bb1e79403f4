#ifndef LPP_ENVIRONMENT_HPP
#define LPP_ENVIRONMENT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "lpp/lattice.hpp"

namespace lpp {

/// Seed-keyed Bernoulli(p) site field with O(1) stateless random access.
///
/// Each vertex owns a uniform in [0,1) obtained by hashing (seed, level,
/// zig-zag spatial coordinates); the site is good iff that uniform is < p.
/// The uniform does not depend on p, so environments sharing a seed are
/// coupled monotonically across p: raising p can only turn bad sites good.
///
/// The hash chain is a frozen contract (reproduced independently in tests);
/// changing it invalidates every recorded result.
class Environment {
 public:
  /// p may be 0 or 1 for degenerate test fixtures; b must be positive.
  /// b is carried for parameter fidelity and never read by counting.
  Environment(std::uint64_t seed, double p, double b, GraphMode mode);

  /// The per-vertex coupled uniform in [0,1).
  double uniform_at(const Vertex& v) const;

  /// 1 iff the site is good. Deterministic in (seed, v).
  int good_bit(const Vertex& v) const;

  std::uint64_t seed() const { return seed_; }
  double p() const { return p_; }
  double b() const { return b_; }
  const GraphMode& mode() const { return mode_; }

  /// Copy with the bit at v pinned. Intended for fixtures exercising
  /// monotonicity; lookups scan the (short) override list first.
  Environment with_bit_forced(const Vertex& v, int bit) const;

 private:
  std::uint64_t seed_;
  double p_;
  double b_;
  GraphMode mode_;
  std::vector<std::pair<Vertex, int>> forced_;
};

/// Number of good sites a path visits after its start vertex.
/// Throws std::invalid_argument if the path is not valid under env's mode.
int path_weight(const PathRecord& path, const Environment& env);

}  // namespace lpp

#endif
