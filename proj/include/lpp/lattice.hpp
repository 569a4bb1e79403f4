#ifndef LPP_LATTICE_HPP
#define LPP_LATTICE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lpp {

/// Which oriented graph the paths live on.
///
/// SemiOriented(d): sites of Z^d carry a time level; every vertex has the
/// 2d out-edges (spatial +-e_i, level+1).
///
/// FullyOriented(d): the nonnegative orthant in d+1 coordinates with the
/// d+1 single-coordinate increments. Represented here as (spatial, level)
/// where level is the path length from the origin and the last lattice
/// coordinate is level - sum(spatial).
struct GraphMode {
  enum class Kind { SemiOriented, FullyOriented };

  Kind kind = Kind::SemiOriented;
  int d = 1;

  static GraphMode semi(int d) { return GraphMode{Kind::SemiOriented, d}; }
  static GraphMode fully(int d) { return GraphMode{Kind::FullyOriented, d}; }

  bool semi_oriented() const { return kind == Kind::SemiOriented; }
  int out_degree() const { return semi_oriented() ? 2 * d : d + 1; }
  // Number of distinct step axes (the fully oriented graph has a pure time axis d+1).
  int axis_count() const { return semi_oriented() ? d : d + 1; }

  bool operator==(const GraphMode&) const = default;
};

/// A lattice site: spatial point plus the oriented (time) coordinate.
struct Vertex {
  std::vector<std::int32_t> spatial;
  std::int32_t level = 0;

  bool operator==(const Vertex&) const = default;
};

Vertex origin(int d);

/// Text form "level:(c1,c2,...,cd)".
std::string to_string(const Vertex& v);

/// One oriented edge. axis is 1-based; in SemiOriented mode axis <= d and
/// sign is +-1; in FullyOriented mode sign is always +1 and axis == d+1
/// advances the time coordinate only.
struct Step {
  std::int16_t axis = 1;
  std::int16_t sign = +1;

  auto operator<=>(const Step&) const = default;
};

/// The full step set in the fixed enumeration order used everywhere
/// (axis ascending; +1 before -1 within an axis).
std::vector<Step> step_set(const GraphMode& mode);

bool step_valid(const Step& s, const GraphMode& mode);
bool vertex_valid(const Vertex& v, const GraphMode& mode);

Vertex apply_step(const Vertex& v, const Step& s, const GraphMode& mode);

std::vector<Vertex> out_neighbors(const Vertex& v, const GraphMode& mode);

/// In-neighbors honoring the mode's vertex constraints; shorter than
/// out_degree at the boundary of the fully oriented orthant.
std::vector<Vertex> in_neighbors(const Vertex& v, const GraphMode& mode);

/// An oriented path: start vertex plus step sequence. The level increases by
/// one per step, so paths are automatically self-avoiding.
struct PathRecord {
  Vertex start;
  std::vector<Step> steps;

  int length() const { return static_cast<int>(steps.size()); }
  bool is_valid(const GraphMode& mode) const;
  Vertex vertex_at(int i, const GraphMode& mode) const;
  Vertex endpoint(const GraphMode& mode) const;
};

}  // namespace lpp

#endif
