#include "lpp/counting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <utility>

#include "lpp/rng.hpp"

namespace lpp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool CountValue::is_zero() const { return is_exact ? exact == 0 : log_value == kNegInf; }

double CountValue::log() const { return is_exact ? log_of_bigcount(exact) : log_value; }

double CountValue::root(int n) const {
  if (n <= 0) throw std::invalid_argument("CountValue::root: n must be positive");
  if (is_zero()) return 0.0;
  return std::exp(log() / n);
}

std::string CountValue::to_string() const {
  if (is_exact) return exact.str();
  if (log_value == kNegInf) return "-inf";
  return format_double(log_value / std::log(10.0));
}

CountValue CountValue::from_exact(BigCount v) {
  CountValue c;
  c.is_exact = true;
  c.exact = std::move(v);
  return c;
}

CountValue CountValue::from_log(double lg) {
  CountValue c;
  c.is_exact = false;
  c.log_value = lg;
  return c;
}

double log_of_bigcount(const BigCount& v) {
  if (v < 0) throw std::domain_error("log_of_bigcount: negative count");
  if (v == 0) return kNegInf;
  const auto bits = boost::multiprecision::msb(v);  // index of the highest set bit
  if (bits <= 52) return std::log(v.convert_to<double>());
  const BigCount mant = v >> (bits - 52);
  return std::log(mant.convert_to<double>()) + static_cast<double>(bits - 52) * std::log(2.0);
}

int weight_threshold(double alpha, int n) {
  const double x = alpha * static_cast<double>(n);
  const int t = static_cast<int>(std::ceil(x - 1e-9));
  return t < 0 ? 0 : t;
}

namespace detail {

// ---------------------------------------------------------------------------
// Packed endpoint keys.
//
// Spatial points are packed into one 64-bit key, first axis in the most
// significant field, each coordinate biased to unsigned. Numeric key order is
// then exactly lexicographic coordinate order, and adding a step's packed
// delta never borrows across fields (the bias leaves two spare values per
// side), so layer joins can walk two sorted key arrays in lockstep.
// ---------------------------------------------------------------------------
class KeyCodec {
 public:
  KeyCodec() = default;

  KeyCodec(int d, std::int32_t bound) : d_(d), bound_(bound), bias_(bound + 2) {
    const std::uint64_t field_max = static_cast<std::uint64_t>(2) * bias_;
    bits_ = std::bit_width(field_max);
    if (d_ * bits_ > 62)
      throw ResourceError("lattice key too wide: d=" + std::to_string(d_) +
                          " with coordinate bound " + std::to_string(bound_) +
                          " exceeds 62 key bits");
  }

  int d() const { return d_; }
  std::int32_t bound() const { return bound_; }
  int bits() const { return bits_; }

  bool in_bounds(std::span<const std::int32_t> c) const {
    for (std::int32_t x : c)
      if (x < -bound_ || x > bound_) return false;
    return true;
  }

  std::uint64_t pack(std::span<const std::int32_t> c) const {
    std::uint64_t key = 0;
    for (int i = 0; i < d_; ++i)
      key = (key << bits_) | static_cast<std::uint64_t>(static_cast<std::int64_t>(c[i]) + bias_);
    return key;
  }

  void unpack(std::uint64_t key, std::span<std::int32_t> out) const {
    const std::uint64_t mask = (std::uint64_t{1} << bits_) - 1;
    for (int i = d_ - 1; i >= 0; --i) {
      out[i] = static_cast<std::int32_t>(static_cast<std::int64_t>(key & mask) - bias_);
      key >>= bits_;
    }
  }

  // Signed key increment of one step (0 for the pure time axis).
  std::int64_t step_delta(const Step& s) const {
    if (s.axis > d_) return 0;
    const int shift = bits_ * (d_ - s.axis);
    const std::int64_t unit = std::int64_t{1} << shift;
    return s.sign > 0 ? unit : -unit;
  }

 private:
  int d_ = 1;
  int bits_ = 0;
  std::int32_t bound_ = 0;
  std::int64_t bias_ = 2;
};

namespace {

// Reachable endpoints at relative length r, emitted as ascending packed keys.
// SemiOriented: start + delta with ||delta||_1 <= r and matching parity.
// FullyOriented: start + delta with delta >= 0 componentwise and sum <= r.
void gen_targets_semi(const KeyCodec& codec, std::span<const std::int32_t> start, int r,
                      std::vector<std::uint64_t>& out) {
  const int d = codec.d();
  out.clear();
  std::vector<std::int32_t> c(static_cast<std::size_t>(d));
  // Iterative would obscure the budget recursion; depth is d (small).
  auto rec = [&](auto&& self, int axis, int rem, std::uint64_t prefix) -> void {
    if (axis == d - 1) {
      for (int delta = -rem; delta <= rem; delta += 2) {
        c[static_cast<std::size_t>(axis)] = start[axis] + delta;
        const std::int64_t field =
            static_cast<std::int64_t>(c[static_cast<std::size_t>(axis)]) + codec.bound() + 2;
        out.push_back((prefix << codec.bits()) | static_cast<std::uint64_t>(field));
      }
      return;
    }
    for (int delta = -rem; delta <= rem; ++delta) {
      c[static_cast<std::size_t>(axis)] = start[axis] + delta;
      const std::int64_t field =
          static_cast<std::int64_t>(c[static_cast<std::size_t>(axis)]) + codec.bound() + 2;
      self(self, axis + 1, rem - std::abs(delta), (prefix << codec.bits()) | static_cast<std::uint64_t>(field));
    }
  };
  rec(rec, 0, r, 0);
}

void gen_targets_fully(const KeyCodec& codec, std::span<const std::int32_t> start, int r,
                       std::vector<std::uint64_t>& out) {
  const int d = codec.d();
  out.clear();
  auto rec = [&](auto&& self, int axis, int rem, std::uint64_t prefix) -> void {
    if (axis == d) {
      out.push_back(prefix);
      return;
    }
    for (int delta = 0; delta <= rem; ++delta) {
      const std::int64_t field = static_cast<std::int64_t>(start[axis]) + delta + codec.bound() + 2;
      self(self, axis + 1, rem - delta, (prefix << codec.bits()) | static_cast<std::uint64_t>(field));
    }
  };
  rec(rec, 0, r, 0);
}

void gen_targets(const GraphMode& mode, const KeyCodec& codec, std::span<const std::int32_t> start,
                 int r, std::vector<std::uint64_t>& out) {
  if (mode.semi_oriented())
    gen_targets_semi(codec, start, r, out);
  else
    gen_targets_fully(codec, start, r, out);
}

}  // namespace

// ---------------------------------------------------------------------------
// Accumulation policies.
// ---------------------------------------------------------------------------

struct U64CountPolicy {
  using value_type = std::uint64_t;
  static constexpr bool kIsCount = true;
  static value_type zero() { return 0; }
  static value_type one() { return 1; }
  static bool nonzero(value_type v) { return v != 0; }
  static std::size_t entry_bytes(int) { return sizeof(value_type); }
  static void accumulate(value_type* dst, const value_type* src, int src_len, int gb) {
    dst += gb;
    for (int k = 0; k < src_len; ++k) dst[k] += src[k];
  }
};

struct BigCountPolicy {
  using value_type = BigCount;
  static constexpr bool kIsCount = true;
  static value_type zero() { return 0; }
  static value_type one() { return 1; }
  static bool nonzero(const value_type& v) { return v != 0; }
  static std::size_t entry_bytes(int bits) { return 48 + static_cast<std::size_t>(bits) / 8; }
  static void accumulate(value_type* dst, const value_type* src, int src_len, int gb) {
    dst += gb;
    for (int k = 0; k < src_len; ++k) dst[k] += src[k];
  }
};

struct LogCountPolicy {
  using value_type = double;
  static constexpr bool kIsCount = true;
  static value_type zero() { return kNegInf; }
  static value_type one() { return 0.0; }
  static bool nonzero(value_type v) { return v != kNegInf; }
  static std::size_t entry_bytes(int) { return sizeof(value_type); }
  static void accumulate(value_type* dst, const value_type* src, int src_len, int gb) {
    dst += gb;
    for (int k = 0; k < src_len; ++k) dst[k] = log_add(dst[k], src[k]);
  }
};

struct MaxPolicy {
  using value_type = std::int32_t;
  static constexpr bool kIsCount = false;
  static value_type zero() { return -1; }  // unreachable sentinel
  static value_type one() { return 0; }    // start carries weight 0
  static bool nonzero(value_type v) { return v >= 0; }
  static std::size_t entry_bytes(int) { return sizeof(value_type); }
  static void accumulate(value_type* dst, const value_type* src, int, int gb) {
    if (src[0] >= 0 && src[0] + gb > dst[0]) dst[0] = src[0] + gb;
  }
};

template <class V>
struct LayerFrame {
  int level = 0;  // absolute
  int klen = 1;
  std::vector<std::uint64_t> keys;  // ascending
  std::vector<V> data;              // keys.size() * klen, endpoint-major

  const V* col(std::size_t i) const { return data.data() + i * static_cast<std::size_t>(klen); }
  V* col(std::size_t i) { return data.data() + i * static_cast<std::size_t>(klen); }
};

// ---------------------------------------------------------------------------
// The shared level-by-level engine.
// ---------------------------------------------------------------------------
template <class P>
class TableCore {
 public:
  using V = typename P::value_type;

  TableCore(const Environment& env, int n_final, const DpOptions& opts)
      : env_(env), mode_(env.mode()) {
    if (n_final < 0) throw std::invalid_argument("layer build: n must be nonnegative");
    start_ = opts.start.value_or(origin(mode_.d));
    if (!vertex_valid(start_, mode_))
      throw std::invalid_argument("layer build: start vertex invalid for mode");
    n_final_ = n_final;
    keep_history_ = opts.keep_history;
    budget_ = opts.memory_budget_bytes;

    std::int32_t bound = opts.coord_bound;
    if (bound < 0) {
      std::int32_t m = 0;
      for (std::int32_t c : start_.spatial) m = std::max(m, std::abs(c));
      bound = m + n_final;
    }
    codec_ = KeyCodec(mode_.d, bound);
    if (!codec_.in_bounds(start_.spatial))
      throw std::domain_error("layer build: start exceeds coordinate bound");

    LayerFrame<V> base;
    base.level = start_.level;
    base.klen = 1;
    base.keys = {codec_.pack(start_.spatial)};
    base.data = {P::one()};
    frames_.push_back(std::move(base));
  }

  void advance() {
    const int rel = top_rel() + 1;
    if (rel > n_final_) return;

    // Reaching past the declared coordinate cap is an error, never a silent
    // key wraparound.
    std::int32_t reach = 0;
    for (std::int32_t c : start_.spatial) reach = std::max(reach, std::abs(c));
    if (reach + rel > codec_.bound())
      throw std::domain_error("layer at level " + std::to_string(base_level() + rel) +
                              " reaches coordinate " + std::to_string(reach + rel) +
                              " beyond the declared bound " + std::to_string(codec_.bound()));

    const LayerFrame<V>& prev = frames_.back();

    LayerFrame<V> next;
    next.level = prev.level + 1;
    next.klen = P::kIsCount ? rel + 1 : 1;
    gen_targets(mode_, codec_, start_.spatial, rel, next.keys);

    check_budget(next, rel);
    next.data.assign(next.keys.size() * static_cast<std::size_t>(next.klen), P::zero());

    // Site bits for the new layer, one hash per endpoint.
    std::vector<std::uint8_t> gb(next.keys.size());
    {
      Vertex v;
      v.level = next.level;
      v.spatial.resize(static_cast<std::size_t>(mode_.d));
      for (std::size_t i = 0; i < next.keys.size(); ++i) {
        codec_.unpack(next.keys[i], v.spatial);
        gb[i] = static_cast<std::uint8_t>(env_.good_bit(v));
      }
    }

    // Pull pass per step: both key arrays are sorted and a step shifts keys by
    // a constant, so each pass is a linear merge.
    for (const Step& s : step_set(mode_)) {
      const std::uint64_t pd = static_cast<std::uint64_t>(codec_.step_delta(s));
      std::size_t ti = 0, pi = 0;
      const std::size_t tn = next.keys.size(), pn = prev.keys.size();
      while (ti < tn && pi < pn) {
        const std::uint64_t pk = prev.keys[pi] + pd;
        const std::uint64_t tk = next.keys[ti];
        if (pk < tk) {
          ++pi;
        } else if (tk < pk) {
          ++ti;
        } else {
          P::accumulate(next.col(ti), prev.col(pi), prev.klen, gb[ti]);
          ++ti;
          ++pi;
        }
      }
    }

    if (keep_history_) {
      frames_.push_back(std::move(next));
    } else {
      frames_.back() = std::move(next);
    }
  }

  void advance_to(int level) {
    while (top_level() < level && top_rel() < n_final_) advance();
  }

  const GraphMode& graph_mode() const { return mode_; }
  const Vertex& start() const { return start_; }
  int base_level() const { return start_.level; }
  int top_level() const { return frames_.back().level; }
  int final_level() const { return start_.level + n_final_; }
  bool has_history() const { return keep_history_; }
  const Environment& env() const { return env_; }

  const LayerFrame<V>& frame(int level) const {
    if (keep_history_) {
      const int rel = level - base_level();
      if (rel < 0 || rel > top_rel()) throw std::logic_error("layer not built: level " + std::to_string(level));
      return frames_[static_cast<std::size_t>(rel)];
    }
    if (level != top_level())
      throw std::logic_error("layer not retained (history off): level " + std::to_string(level));
    return frames_.back();
  }

  std::size_t endpoint_count(int level) const { return frame(level).keys.size(); }

  int rel_of(int level) const { return level - base_level(); }

  void decode(std::uint64_t key, std::span<std::int32_t> out) const { codec_.unpack(key, out); }

  std::ptrdiff_t find(int level, std::span<const std::int32_t> spatial) const {
    const auto& f = frame(level);
    if (static_cast<int>(spatial.size()) != mode_.d)
      throw std::invalid_argument("endpoint dimension mismatch");
    if (!codec_.in_bounds(spatial)) return -1;
    const std::uint64_t key = codec_.pack(spatial);
    const auto it = std::lower_bound(f.keys.begin(), f.keys.end(), key);
    if (it == f.keys.end() || *it != key) return -1;
    return it - f.keys.begin();
  }

 private:
  int top_rel() const { return frames_.back().level - base_level(); }

  void check_budget(const LayerFrame<V>& next, int rel) const {
    const int bits = static_cast<int>(
        std::ceil(static_cast<double>(rel) * std::log2(static_cast<double>(mode_.out_degree()))));
    const std::size_t bytes = next.keys.size() * (sizeof(std::uint64_t) +
                                                  static_cast<std::size_t>(next.klen) *
                                                      P::entry_bytes(bits));
    if (bytes > budget_)
      throw ResourceError("layer at level " + std::to_string(next.level) + " needs about " +
                          std::to_string(bytes / (1 << 20)) + " MiB, over the " +
                          std::to_string(budget_ / (1 << 20)) + " MiB budget");
  }

  Environment env_;
  GraphMode mode_;
  Vertex start_;
  int n_final_ = 0;
  bool keep_history_ = false;
  std::size_t budget_ = 0;
  KeyCodec codec_;
  std::vector<LayerFrame<V>> frames_;
};

// ---------------------------------------------------------------------------
// Count table backends behind one virtual interface.
// ---------------------------------------------------------------------------
class CountDpBase {
 public:
  using EntryFn = std::function<void(std::span<const std::int32_t>, int, const CountValue&)>;

  virtual ~CountDpBase() = default;
  virtual void advance() = 0;
  virtual void advance_to(int level) = 0;
  virtual CountBackend backend() const = 0;
  virtual const GraphMode& graph_mode() const = 0;
  virtual const Vertex& start() const = 0;
  virtual int base_level() const = 0;
  virtual int top_level() const = 0;
  virtual int final_level() const = 0;
  virtual bool has_history() const = 0;
  virtual std::size_t endpoint_count(int level) const = 0;
  virtual CountValue total(int level) const = 0;
  virtual CountValue count_at_least(int level, int kmin) const = 0;
  virtual CountValue count_at_least_at(int level, std::span<const std::int32_t> spatial,
                                       int kmin) const = 0;
  virtual int max_nonzero_weight(int level) const = 0;
  virtual void for_each_entry(int level, const EntryFn& fn) const = 0;
};

template <class P>
class CountDpImpl final : public CountDpBase {
 public:
  using V = typename P::value_type;

  CountDpImpl(const Environment& env, int n_final, const DpOptions& opts, CountBackend reported)
      : core_(env, n_final, opts), reported_(reported) {}

  void advance() override { core_.advance(); }
  void advance_to(int level) override { core_.advance_to(level); }
  CountBackend backend() const override { return reported_; }
  const GraphMode& graph_mode() const override { return core_.graph_mode(); }
  const Vertex& start() const override { return core_.start(); }
  int base_level() const override { return core_.base_level(); }
  int top_level() const override { return core_.top_level(); }
  int final_level() const override { return core_.final_level(); }
  bool has_history() const override { return core_.has_history(); }
  std::size_t endpoint_count(int level) const override { return core_.endpoint_count(level); }

  CountValue total(int level) const override { return count_at_least(level, 0); }

  CountValue count_at_least(int level, int kmin) const override {
    const auto& f = core_.frame(level);
    const int rel = core_.rel_of(level);
    if (kmin < 0) kmin = 0;
    if (kmin > rel) return zero_value();
    return sum_range(f, kmin);
  }

  CountValue count_at_least_at(int level, std::span<const std::int32_t> spatial,
                               int kmin) const override {
    const auto& f = core_.frame(level);
    const int rel = core_.rel_of(level);
    if (kmin < 0) kmin = 0;
    if (kmin > rel) return zero_value();
    const std::ptrdiff_t idx = core_.find(level, spatial);
    if (idx < 0) return zero_value();
    return sum_col(f, static_cast<std::size_t>(idx), kmin);
  }

  int max_nonzero_weight(int level) const override {
    const auto& f = core_.frame(level);
    for (int k = f.klen - 1; k >= 0; --k)
      for (std::size_t i = 0; i < f.keys.size(); ++i)
        if (P::nonzero(f.col(i)[k])) return k;
    return -1;
  }

  void for_each_entry(int level, const EntryFn& fn) const override {
    const auto& f = core_.frame(level);
    std::vector<std::int32_t> spatial(static_cast<std::size_t>(core_.graph_mode().d));
    for (std::size_t i = 0; i < f.keys.size(); ++i) {
      core_.decode(f.keys[i], spatial);
      const V* col = f.col(i);
      for (int k = 0; k < f.klen; ++k)
        if (P::nonzero(col[k])) fn(spatial, k, make_value(col[k]));
    }
  }

 private:
  static CountValue zero_value() {
    if constexpr (std::is_same_v<P, LogCountPolicy>)
      return CountValue::from_log(kNegInf);
    else
      return CountValue::from_exact(BigCount(0));
  }

  static CountValue make_value(const V& v) {
    if constexpr (std::is_same_v<P, LogCountPolicy>)
      return CountValue::from_log(v);
    else
      return CountValue::from_exact(BigCount(v));
  }

  CountValue sum_range(const LayerFrame<V>& f, int kmin) const {
    if constexpr (std::is_same_v<P, LogCountPolicy>) {
      // Two passes: shift by the max, then Kahan-sum in the linear domain.
      // A sequential log-add chain over ~10^6 entries drifts past the
      // n*2^-45 conservation tolerance; this stays at a few ulp.
      double top = kNegInf;
      for (std::size_t i = 0; i < f.keys.size(); ++i) {
        const V* col = f.col(i);
        for (int k = kmin; k < f.klen; ++k) top = std::max(top, col[k]);
      }
      if (top == kNegInf) return CountValue::from_log(kNegInf);
      double sum = 0.0, comp = 0.0;
      for (std::size_t i = 0; i < f.keys.size(); ++i) {
        const V* col = f.col(i);
        for (int k = kmin; k < f.klen; ++k) {
          if (col[k] == kNegInf) continue;
          const double term = std::exp(col[k] - top) - comp;
          const double t = sum + term;
          comp = (t - sum) - term;
          sum = t;
        }
      }
      return CountValue::from_log(top + std::log(sum));
    } else if constexpr (std::is_same_v<P, U64CountPolicy>) {
      std::uint64_t acc = 0;  // totals provably fit 62 bits under this backend
      for (std::size_t i = 0; i < f.keys.size(); ++i) {
        const V* col = f.col(i);
        for (int k = kmin; k < f.klen; ++k) acc += col[k];
      }
      return CountValue::from_exact(BigCount(acc));
    } else {
      BigCount acc = 0;
      for (std::size_t i = 0; i < f.keys.size(); ++i) {
        const V* col = f.col(i);
        for (int k = kmin; k < f.klen; ++k) acc += col[k];
      }
      return CountValue::from_exact(acc);
    }
  }

  CountValue sum_col(const LayerFrame<V>& f, std::size_t i, int kmin) const {
    if constexpr (std::is_same_v<P, LogCountPolicy>) {
      const V* col = f.col(i);
      double top = kNegInf;
      for (int k = kmin; k < f.klen; ++k) top = std::max(top, col[k]);
      if (top == kNegInf) return CountValue::from_log(kNegInf);
      double sum = 0.0;
      for (int k = kmin; k < f.klen; ++k)
        if (col[k] != kNegInf) sum += std::exp(col[k] - top);
      return CountValue::from_log(top + std::log(sum));
    } else {
      BigCount acc = 0;
      const V* col = f.col(i);
      for (int k = kmin; k < f.klen; ++k) acc += col[k];
      return CountValue::from_exact(acc);
    }
  }

  TableCore<P> core_;
  CountBackend reported_;
};

class MaxDpBase {
 public:
  MaxDpBase(const Environment& env, int n_final, const DpOptions& opts)
      : core_(env, n_final, opts) {}

  TableCore<MaxPolicy> core_;
};

namespace {

std::unique_ptr<CountDpBase> make_count_impl(const Environment& env, int n_final,
                                             const DpOptions& opts) {
  const double bits =
      static_cast<double>(n_final) * std::log2(static_cast<double>(env.mode().out_degree()));
  switch (opts.backend) {
    case BackendChoice::Log:
      return std::make_unique<CountDpImpl<LogCountPolicy>>(env, n_final, opts,
                                                           CountBackend::LogSpace);
    case BackendChoice::Exact:
      if (bits <= 62.0)
        return std::make_unique<CountDpImpl<U64CountPolicy>>(env, n_final, opts,
                                                             CountBackend::ExactBigInt);
      return std::make_unique<CountDpImpl<BigCountPolicy>>(env, n_final, opts,
                                                           CountBackend::ExactBigInt);
    case BackendChoice::Auto:
    default:
      if (bits <= 62.0)
        return std::make_unique<CountDpImpl<U64CountPolicy>>(env, n_final, opts,
                                                             CountBackend::ExactBigInt);
      if (bits <= 4096.0)
        return std::make_unique<CountDpImpl<BigCountPolicy>>(env, n_final, opts,
                                                             CountBackend::ExactBigInt);
      return std::make_unique<CountDpImpl<LogCountPolicy>>(env, n_final, opts,
                                                           CountBackend::LogSpace);
  }
}

}  // namespace

}  // namespace detail

// ---------------------------------------------------------------------------
// Public wrappers.
// ---------------------------------------------------------------------------

CountTable::CountTable(const Environment& env, int n_final, const DpOptions& opts)
    : impl_(detail::make_count_impl(env, n_final, opts)) {}

CountTable::CountTable(CountTable&&) noexcept = default;
CountTable& CountTable::operator=(CountTable&&) noexcept = default;
CountTable::~CountTable() = default;

void CountTable::advance() { impl_->advance(); }
void CountTable::advance_to(int level) { impl_->advance_to(level); }
CountBackend CountTable::backend() const { return impl_->backend(); }
const GraphMode& CountTable::graph_mode() const { return impl_->graph_mode(); }
const Vertex& CountTable::start() const { return impl_->start(); }
int CountTable::base_level() const { return impl_->base_level(); }
int CountTable::top_level() const { return impl_->top_level(); }
int CountTable::final_level() const { return impl_->final_level(); }
bool CountTable::has_history() const { return impl_->has_history(); }
std::size_t CountTable::endpoint_count(int level) const { return impl_->endpoint_count(level); }
CountValue CountTable::total(int level) const { return impl_->total(level); }
CountValue CountTable::count_at_least(int level, int kmin) const {
  return impl_->count_at_least(level, kmin);
}
CountValue CountTable::count_at_least_at(int level, std::span<const std::int32_t> spatial,
                                         int kmin) const {
  return impl_->count_at_least_at(level, spatial, kmin);
}
int CountTable::max_nonzero_weight(int level) const { return impl_->max_nonzero_weight(level); }
void CountTable::for_each_entry(
    int level,
    const std::function<void(std::span<const std::int32_t>, int, const CountValue&)>& fn) const {
  impl_->for_each_entry(level, fn);
}

CountTable build_count_layers(const Environment& env, int n, const DpOptions& opts) {
  CountTable t(env, n, opts);
  t.advance_to(t.final_level());
  return t;
}

CountValue count_paths_at_least(const CountTable& table, int n, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::domain_error("count_paths_at_least: alpha must be in [0,1]");
  const int level = table.base_level() + n;
  return table.count_at_least(level, weight_threshold(alpha, n));
}

CountValue count_paths_at_least_to(const CountTable& table, int n, double alpha, const Vertex& y) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::domain_error("count_paths_at_least_to: alpha must be in [0,1]");
  const int level = table.base_level() + n;
  if (y.level != level) return CountValue::from_exact(BigCount(0));
  return table.count_at_least_at(level, y.spatial, weight_threshold(alpha, n));
}

MaxWeightTable::MaxWeightTable(const Environment& env, int n_final, const DpOptions& opts)
    : impl_(std::make_unique<detail::MaxDpBase>(env, n_final, opts)) {}

MaxWeightTable::MaxWeightTable(MaxWeightTable&&) noexcept = default;
MaxWeightTable& MaxWeightTable::operator=(MaxWeightTable&&) noexcept = default;
MaxWeightTable::~MaxWeightTable() = default;

void MaxWeightTable::advance() { impl_->core_.advance(); }
void MaxWeightTable::advance_to(int level) { impl_->core_.advance_to(level); }
const GraphMode& MaxWeightTable::graph_mode() const { return impl_->core_.graph_mode(); }
const Vertex& MaxWeightTable::start() const { return impl_->core_.start(); }
int MaxWeightTable::base_level() const { return impl_->core_.base_level(); }
int MaxWeightTable::top_level() const { return impl_->core_.top_level(); }
int MaxWeightTable::final_level() const { return impl_->core_.final_level(); }
bool MaxWeightTable::has_history() const { return impl_->core_.has_history(); }
std::size_t MaxWeightTable::endpoint_count(int level) const {
  return impl_->core_.endpoint_count(level);
}

int MaxWeightTable::max_weight(int level) const {
  const auto& f = impl_->core_.frame(level);
  std::int32_t best = -1;
  for (std::size_t i = 0; i < f.keys.size(); ++i) best = std::max(best, f.data[i]);
  return best;
}

Vertex MaxWeightTable::argmax_endpoint_lex(int level) const {
  const auto& f = impl_->core_.frame(level);
  if (f.keys.empty()) throw std::logic_error("argmax_endpoint_lex: empty layer");
  std::int32_t best = -1;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < f.keys.size(); ++i) {
    if (f.data[i] > best) {  // keys ascend lexicographically, first max wins
      best = f.data[i];
      arg = i;
    }
  }
  Vertex v;
  v.level = level;
  v.spatial.resize(static_cast<std::size_t>(graph_mode().d));
  impl_->core_.decode(f.keys[arg], v.spatial);
  return v;
}

int MaxWeightTable::max_weight_at(int level, std::span<const std::int32_t> spatial) const {
  const std::ptrdiff_t idx = impl_->core_.find(level, spatial);
  if (idx < 0) return -1;
  return impl_->core_.frame(level).data[static_cast<std::size_t>(idx)];
}

MaxWeightTable build_max_layers(const Environment& env, int n, const DpOptions& opts) {
  MaxWeightTable t(env, n, opts);
  t.advance_to(t.final_level());
  return t;
}

PathRecord max_weight_path(const MaxWeightTable& table, const Environment& env) {
  if (!table.has_history())
    throw std::logic_error("max_weight_path: table was built without history");
  const GraphMode& mode = table.graph_mode();
  const int top = table.top_level();
  const int base = table.base_level();

  Vertex cur = table.argmax_endpoint_lex(top);
  int val = table.max_weight_at(top, cur.spatial);
  std::vector<Step> rev;
  rev.reserve(static_cast<std::size_t>(top - base));

  for (int level = top; level > base; --level) {
    const int want = val - env.good_bit(cur);
    // Candidate in-neighbors sorted by spatial coordinates; the first one
    // matching the target weight is the lexicographically least.
    std::vector<std::pair<Vertex, Step>> cands;
    for (const Step& s : step_set(mode)) {
      Vertex x = cur;
      x.level -= 1;
      if (s.axis <= mode.d) x.spatial[static_cast<std::size_t>(s.axis - 1)] -= s.sign;
      if (vertex_valid(x, mode)) cands.emplace_back(std::move(x), s);
    }
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
      return std::lexicographical_compare(a.first.spatial.begin(), a.first.spatial.end(),
                                          b.first.spatial.begin(), b.first.spatial.end());
    });
    bool found = false;
    for (auto& [x, s] : cands) {
      if (table.max_weight_at(level - 1, x.spatial) == want) {
        rev.push_back(s);
        cur = std::move(x);
        val = want;
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("max_weight_path: backtrack failed (corrupt table)");
  }

  PathRecord path;
  path.start = table.start();
  path.steps.assign(rev.rbegin(), rev.rend());
  return path;
}

void dump_count_csv(std::ostream& os, const CountTable& table) {
  os << "level,endpoint,k,count,backend\n";
  const char* backend = table.backend() == CountBackend::ExactBigInt ? "exact" : "log";
  const int lo = table.has_history() ? table.base_level() : table.top_level();
  for (int level = lo; level <= table.top_level(); ++level) {
    table.for_each_entry(level, [&](std::span<const std::int32_t> spatial, int k,
                                    const CountValue& c) {
      Vertex v;
      v.level = level;
      v.spatial.assign(spatial.begin(), spatial.end());
      os << level << ",\"" << to_string(v) << "\"," << k << ',' << c.to_string() << ',' << backend
         << '\n';
    });
  }
}

}  // namespace lpp
