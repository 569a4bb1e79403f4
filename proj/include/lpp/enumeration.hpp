#ifndef LPP_ENUMERATION_HPP
#define LPP_ENUMERATION_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lpp/counting.hpp"
#include "lpp/environment.hpp"

namespace lpp {

struct EnumOptions {
  std::optional<Vertex> start;
  /// Refuse to enumerate more than this many length-n paths.
  std::uint64_t path_cap = 10'000'000;
};

/// Visit every length-n oriented path from the start explicitly, in step-set
/// order (depth-first). The visitor receives the full path and its weight.
/// Throws ResourceError if out_degree^n exceeds the cap.
void enumerate_paths(const Environment& env, int n, const EnumOptions& opts,
                     const std::function<void(const PathRecord&, int)>& visit);

/// Ground truth built by explicit enumeration, independent of the layer DP:
/// the joint (endpoint, weight) tables for every prefix length 0..n and the
/// per-length maximum weight.
struct EnumerationStats {
  int n = 0;
  Vertex start;
  /// joint[t][(spatial, k)] = number of length-t paths ending there with weight k
  std::vector<std::map<std::pair<std::vector<std::int32_t>, int>, std::uint64_t>> joint;
  std::vector<int> max_weight;  // per length t, -1 for t with no paths (never here)
  std::uint64_t full_length_paths = 0;
};

EnumerationStats enumerate_paths_oracle(const Environment& env, int n,
                                        const EnumOptions& opts = {});

/// Entry-by-entry comparison of a DP count table against the oracle, at every
/// level the table retains. Returns false and fills `why` on first mismatch.
bool counts_match_oracle(const CountTable& table, const EnumerationStats& oracle,
                         std::string* why = nullptr);

}  // namespace lpp

#endif
