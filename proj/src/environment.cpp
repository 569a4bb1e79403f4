#include "lpp/environment.hpp"

#include <stdexcept>

#include "lpp/rng.hpp"

namespace lpp {

namespace {
constexpr std::uint64_t kEnvSalt = 0x6c70702d656e7631ull;
}

Environment::Environment(std::uint64_t seed, double p, double b, GraphMode mode)
    : seed_(seed), p_(p), b_(b), mode_(mode) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("Environment: p must be in [0,1]");
  if (!(b > 0.0)) throw std::invalid_argument("Environment: b must be positive");
  if (mode.d < 1) throw std::invalid_argument("Environment: d must be positive");
}

double Environment::uniform_at(const Vertex& v) const {
  // Canonical encoding: level first, then spatial coordinates in axis order,
  // each zig-zag mapped to unsigned. Absorb word-by-word through mix64.
  std::uint64_t h = mix64(seed_ ^ kEnvSalt);
  h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.level)) + kGolden64));
  for (std::int32_t c : v.spatial) h = mix64(h ^ (zigzag64(c) + kGolden64));
  return unit_double(h);
}

int Environment::good_bit(const Vertex& v) const {
  if (!forced_.empty()) {
    for (const auto& [w, bit] : forced_)
      if (w == v) return bit;
  }
  return uniform_at(v) < p_ ? 1 : 0;
}

Environment Environment::with_bit_forced(const Vertex& v, int bit) const {
  Environment out = *this;
  out.forced_.emplace_back(v, bit ? 1 : 0);
  return out;
}

int path_weight(const PathRecord& path, const Environment& env) {
  if (!path.is_valid(env.mode()))
    throw std::invalid_argument("path_weight: path invalid under environment mode");
  int w = 0;
  Vertex v = path.start;
  for (const Step& s : path.steps) {
    v = apply_step(v, s, env.mode());
    w += env.good_bit(v);
  }
  return w;
}

}  // namespace lpp
