#ifndef LPP_COUNTING_HPP
#define LPP_COUNTING_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "lpp/environment.hpp"

namespace lpp {

using BigCount = boost::multiprecision::cpp_int;

/// Raised when a computation would exceed a declared budget (layer memory,
/// enumeration cap, state-space size). The message names the offender.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How counts are represented. ExactBigInt keeps exact integers (stored in a
/// machine word whenever the totals provably fit, arbitrary precision
/// otherwise); LogSpace keeps natural-log magnitudes with log-sum-exp
/// accumulation.
enum class CountBackend { ExactBigInt, LogSpace };

/// Request for the backend. Auto picks ExactBigInt while the per-entry bit
/// budget n*log2(outDegree) stays within 4096 bits, LogSpace beyond.
enum class BackendChoice { Auto, Exact, Log };

/// A path count from either backend. Log values are natural logs; zero counts
/// carry log() == -infinity.
struct CountValue {
  bool is_exact = true;
  BigCount exact;
  double log_value = 0.0;

  bool is_zero() const;
  /// Natural log of the count (-inf when zero) regardless of backend.
  double log() const;
  /// count^(1/n); 0 for a zero count.
  double root(int n) const;
  /// Decimal digits for exact counts, "log10=..." for log-space.
  std::string to_string() const;

  static CountValue from_exact(BigCount v);
  static CountValue from_log(double lg);
};

/// Natural log of an exact nonnegative integer; -inf for zero.
double log_of_bigcount(const BigCount& v);

/// Smallest integer >= alpha*n, ties inclusive, clamped at 0. A 1e-9 absolute
/// slack absorbs representation noise in alpha*n.
int weight_threshold(double alpha, int n);

struct DpOptions {
  /// Paths start here; default is the origin at level 0.
  std::optional<Vertex> start;
  BackendChoice backend = BackendChoice::Auto;
  /// Retain every layer (needed for per-level queries and path backtracking).
  bool keep_history = false;
  std::size_t memory_budget_bytes = std::size_t{2} << 30;
  /// Cap on |spatial coordinate|; -1 derives it from start and n. Reaching a
  /// coordinate beyond the cap is an error, never silent wraparound.
  std::int32_t coord_bound = -1;
};

namespace detail {
class CountDpBase;
class MaxDpBase;
}  // namespace detail

/// Level-by-level transfer table: for each retained level t the exact joint
/// distribution of (endpoint, weight) over all out_degree^t paths from the
/// start. Built by pulling from in-neighbors so each layer is frozen before
/// the next begins.
class CountTable {
 public:
  CountTable(const Environment& env, int n_final, const DpOptions& opts);
  CountTable(CountTable&&) noexcept;
  CountTable& operator=(CountTable&&) noexcept;
  ~CountTable();

  /// Advance one level. No-op past n_final.
  void advance();
  void advance_to(int level);

  CountBackend backend() const;
  const GraphMode& graph_mode() const;
  const Vertex& start() const;
  int base_level() const;   // start vertex level
  int top_level() const;    // highest level built so far
  int final_level() const;  // base_level + n_final
  bool has_history() const;

  std::size_t endpoint_count(int level) const;
  CountValue total(int level) const;
  /// Sum over endpoints of counts with weight >= kmin.
  CountValue count_at_least(int level, int kmin) const;
  /// Same restricted to one endpoint; an unreachable endpoint yields zero.
  CountValue count_at_least_at(int level, std::span<const std::int32_t> endpoint_spatial,
                               int kmin) const;
  /// Largest weight with a nonzero count at this level (-1 if the layer is empty).
  int max_nonzero_weight(int level) const;

  /// Deterministic iteration over nonzero entries: endpoints in lexicographic
  /// order, weight ascending within an endpoint.
  void for_each_entry(
      int level,
      const std::function<void(std::span<const std::int32_t>, int, const CountValue&)>& fn) const;

 private:
  std::unique_ptr<detail::CountDpBase> impl_;
};

CountTable build_count_layers(const Environment& env, int n, const DpOptions& opts = {});

/// Number of length-n paths with weight >= ceil(alpha*n).
/// alpha outside [0,1] is a domain error.
CountValue count_paths_at_least(const CountTable& table, int n, double alpha);

/// As count_paths_at_least restricted to endpoint y (zero if unreachable).
CountValue count_paths_at_least_to(const CountTable& table, int n, double alpha, const Vertex& y);

/// Max-weight analogue of CountTable: per endpoint the best path weight.
class MaxWeightTable {
 public:
  MaxWeightTable(const Environment& env, int n_final, const DpOptions& opts);
  MaxWeightTable(MaxWeightTable&&) noexcept;
  MaxWeightTable& operator=(MaxWeightTable&&) noexcept;
  ~MaxWeightTable();

  void advance();
  void advance_to(int level);

  const GraphMode& graph_mode() const;
  const Vertex& start() const;
  int base_level() const;
  int top_level() const;
  int final_level() const;
  bool has_history() const;

  std::size_t endpoint_count(int level) const;
  /// Best weight over all endpoints at this level.
  int max_weight(int level) const;
  /// Lexicographically least endpoint achieving max_weight(level).
  Vertex argmax_endpoint_lex(int level) const;
  /// Best weight into one endpoint; -1 if unreachable.
  int max_weight_at(int level, std::span<const std::int32_t> endpoint_spatial) const;

 private:
  std::unique_ptr<detail::MaxDpBase> impl_;
};

MaxWeightTable build_max_layers(const Environment& env, int n, const DpOptions& opts = {});

/// Reconstruct one maximizing path by backtracking from the lexicographically
/// least maximizing endpoint, choosing the lexicographically least in-neighbor
/// at every step. Requires keep_history.
PathRecord max_weight_path(const MaxWeightTable& table, const Environment& env);

/// CSV dump: level,endpoint,k,count,backend. Exact counts print in decimal,
/// log-space counts as log10.
void dump_count_csv(std::ostream& os, const CountTable& table);

}  // namespace lpp

#endif
