#include "lpp/enumeration.hpp"

#include <cmath>

namespace lpp {

namespace {

double pow_count(int base, int n) { return std::pow(static_cast<double>(base), n); }

}  // namespace

void enumerate_paths(const Environment& env, int n, const EnumOptions& opts,
                     const std::function<void(const PathRecord&, int)>& visit) {
  if (n < 0) throw std::invalid_argument("enumerate_paths: n must be nonnegative");
  const GraphMode& mode = env.mode();
  if (pow_count(mode.out_degree(), n) > static_cast<double>(opts.path_cap))
    throw ResourceError("enumeration refused: " + std::to_string(mode.out_degree()) + "^" +
                        std::to_string(n) + " paths exceed the cap of " +
                        std::to_string(opts.path_cap));

  PathRecord path;
  path.start = opts.start.value_or(origin(mode.d));
  if (!vertex_valid(path.start, mode))
    throw std::invalid_argument("enumerate_paths: start invalid for mode");
  path.steps.reserve(static_cast<std::size_t>(n));

  const auto steps = step_set(mode);
  std::vector<Vertex> stack;  // vertices along the current path
  stack.reserve(static_cast<std::size_t>(n) + 1);
  stack.push_back(path.start);

  auto rec = [&](auto&& self, int depth, int weight) -> void {
    if (depth == n) {
      visit(path, weight);
      return;
    }
    for (const Step& s : steps) {
      Vertex next = apply_step(stack.back(), s, mode);
      const int w = weight + env.good_bit(next);
      path.steps.push_back(s);
      stack.push_back(std::move(next));
      self(self, depth + 1, w);
      stack.pop_back();
      path.steps.pop_back();
    }
  };
  rec(rec, 0, 0);
}

EnumerationStats enumerate_paths_oracle(const Environment& env, int n, const EnumOptions& opts) {
  if (n < 0) throw std::invalid_argument("enumerate_paths_oracle: n must be nonnegative");
  const GraphMode& mode = env.mode();
  if (pow_count(mode.out_degree(), n) > static_cast<double>(opts.path_cap))
    throw ResourceError("enumeration refused: " + std::to_string(mode.out_degree()) + "^" +
                        std::to_string(n) + " paths exceed the cap of " +
                        std::to_string(opts.path_cap));

  EnumerationStats stats;
  stats.n = n;
  stats.start = opts.start.value_or(origin(mode.d));
  if (!vertex_valid(stats.start, mode))
    throw std::invalid_argument("enumerate_paths_oracle: start invalid for mode");
  stats.joint.resize(static_cast<std::size_t>(n) + 1);
  stats.max_weight.assign(static_cast<std::size_t>(n) + 1, -1);

  const auto steps = step_set(mode);
  std::vector<Vertex> stack;
  stack.push_back(stats.start);

  // Every node of the step tree is a prefix path; record it in its length's
  // table so all levels of a DP can be checked from one sweep.
  auto record = [&](int depth, int weight) {
    auto& tab = stats.joint[static_cast<std::size_t>(depth)];
    tab[{stack.back().spatial, weight}] += 1;
    auto& mw = stats.max_weight[static_cast<std::size_t>(depth)];
    if (weight > mw) mw = weight;
    if (depth == stats.n) stats.full_length_paths += 1;
  };

  auto rec = [&](auto&& self, int depth, int weight) -> void {
    record(depth, weight);
    if (depth == n) return;
    for (const Step& s : steps) {
      Vertex next = apply_step(stack.back(), s, mode);
      const int w = weight + env.good_bit(next);
      stack.push_back(std::move(next));
      self(self, depth + 1, w);
      stack.pop_back();
    }
  };
  rec(rec, 0, 0);
  return stats;
}

bool counts_match_oracle(const CountTable& table, const EnumerationStats& oracle,
                         std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const int base = table.base_level();
  const int lo = table.has_history() ? base : table.top_level();
  for (int level = lo; level <= table.top_level(); ++level) {
    const int t = level - base;
    if (t < 0 || t > oracle.n) return fail("oracle does not cover level " + std::to_string(level));
    const auto& tab = oracle.joint[static_cast<std::size_t>(t)];

    std::size_t dp_entries = 0;
    bool ok = true;
    std::string detail;
    table.for_each_entry(level, [&](std::span<const std::int32_t> spatial, int k,
                                    const CountValue& c) {
      ++dp_entries;
      if (!ok) return;
      const std::vector<std::int32_t> key(spatial.begin(), spatial.end());
      const auto it = tab.find({key, k});
      const std::uint64_t want = it == tab.end() ? 0 : it->second;
      if (!c.is_exact || c.exact != want) {
        ok = false;
        Vertex v;
        v.level = level;
        v.spatial = key;
        detail = "mismatch at " + to_string(v) + " k=" + std::to_string(k) + ": dp=" +
                 c.to_string() + " oracle=" + std::to_string(want);
      }
    });
    if (!ok) return fail(detail);
    if (dp_entries != tab.size())
      return fail("level " + std::to_string(level) + ": dp has " + std::to_string(dp_entries) +
                  " nonzero entries, oracle has " + std::to_string(tab.size()));
  }
  return true;
}

}  // namespace lpp
