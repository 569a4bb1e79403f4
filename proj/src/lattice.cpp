#include "lpp/lattice.hpp"

#include <stdexcept>

namespace lpp {

Vertex origin(int d) {
  Vertex v;
  v.spatial.assign(static_cast<std::size_t>(d), 0);
  v.level = 0;
  return v;
}

std::string to_string(const Vertex& v) {
  std::string out = std::to_string(v.level) + ":(";
  for (std::size_t i = 0; i < v.spatial.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v.spatial[i]);
  }
  out += ')';
  return out;
}

std::vector<Step> step_set(const GraphMode& mode) {
  std::vector<Step> steps;
  if (mode.semi_oriented()) {
    steps.reserve(static_cast<std::size_t>(2 * mode.d));
    for (int a = 1; a <= mode.d; ++a) {
      steps.push_back(Step{static_cast<std::int16_t>(a), +1});
      steps.push_back(Step{static_cast<std::int16_t>(a), -1});
    }
  } else {
    steps.reserve(static_cast<std::size_t>(mode.d + 1));
    for (int a = 1; a <= mode.d + 1; ++a)
      steps.push_back(Step{static_cast<std::int16_t>(a), +1});
  }
  return steps;
}

bool step_valid(const Step& s, const GraphMode& mode) {
  if (mode.semi_oriented())
    return s.axis >= 1 && s.axis <= mode.d && (s.sign == 1 || s.sign == -1);
  return s.axis >= 1 && s.axis <= mode.d + 1 && s.sign == 1;
}

bool vertex_valid(const Vertex& v, const GraphMode& mode) {
  if (static_cast<int>(v.spatial.size()) != mode.d) return false;
  if (v.level < 0) return false;
  if (!mode.semi_oriented()) {
    std::int64_t sum = 0;
    for (std::int32_t c : v.spatial) {
      if (c < 0) return false;
      sum += c;
    }
    if (sum > v.level) return false;  // time coordinate would be negative
  }
  return true;
}

Vertex apply_step(const Vertex& v, const Step& s, const GraphMode& mode) {
  if (!step_valid(s, mode)) throw std::invalid_argument("apply_step: step invalid for mode");
  Vertex out = v;
  out.level += 1;
  if (s.axis <= mode.d) out.spatial[static_cast<std::size_t>(s.axis - 1)] += s.sign;
  return out;
}

std::vector<Vertex> out_neighbors(const Vertex& v, const GraphMode& mode) {
  std::vector<Vertex> out;
  const auto steps = step_set(mode);
  out.reserve(steps.size());
  for (const Step& s : steps) out.push_back(apply_step(v, s, mode));
  return out;
}

std::vector<Vertex> in_neighbors(const Vertex& v, const GraphMode& mode) {
  std::vector<Vertex> in;
  if (v.level < 1) return in;
  for (const Step& s : step_set(mode)) {
    Vertex cand = v;
    cand.level -= 1;
    if (s.axis <= mode.d) cand.spatial[static_cast<std::size_t>(s.axis - 1)] -= s.sign;
    if (vertex_valid(cand, mode)) in.push_back(std::move(cand));
  }
  return in;
}

bool PathRecord::is_valid(const GraphMode& mode) const {
  if (!vertex_valid(start, mode)) return false;
  for (const Step& s : steps)
    if (!step_valid(s, mode)) return false;
  return true;
}

Vertex PathRecord::vertex_at(int i, const GraphMode& mode) const {
  if (i < 0 || i > length()) throw std::out_of_range("PathRecord::vertex_at");
  Vertex v = start;
  for (int j = 0; j < i; ++j) v = apply_step(v, steps[static_cast<std::size_t>(j)], mode);
  return v;
}

Vertex PathRecord::endpoint(const GraphMode& mode) const { return vertex_at(length(), mode); }

}  // namespace lpp
