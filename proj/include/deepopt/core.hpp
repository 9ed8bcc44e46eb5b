#ifndef DEEPOPT_CORE_HPP
#define DEEPOPT_CORE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace deepopt {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  BudgetExhausted() : Error("evaluation budget exhausted") {}
};

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

/// Named sub-streams derived from one root seed per trial.
enum class Stream : std::uint64_t {
  init = 1,
  nash = 2,
  model_train = 3,
  generate = 4,
  validation = 5,
  noise = 6,
  ga = 7,
  instance = 8,
  harness = 9,
};

/// Deterministic random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; all distributions are derived from raw
/// 64-bit draws here so results do not depend on the standard library vendor.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  Rng(std::uint64_t seed, Stream stream)
      : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive, without modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw Error("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo);
    if (span == std::numeric_limits<std::uint64_t>::max()) {
      return static_cast<std::int64_t>(engine_());
    }
    const std::uint64_t range = span + 1;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return lo + static_cast<std::int64_t>(draw % range);
  }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(
        uniform_int(0, static_cast<std::int64_t>(n) - 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

  /// Child seed for deriving independent sub-experiments.
  std::uint64_t fork_seed() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline Rng rng_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Rng(seed, stream_id);
}

inline Rng rng_stream(std::uint64_t seed, Stream stream) {
  return Rng(seed, stream);
}

// ---------------------------------------------------------------------------
// Candidate solutions
// ---------------------------------------------------------------------------

inline double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

/// Fixed-length genotype of real parameters in [0, 1].
class Candidate {
 public:
  Candidate() = default;
  explicit Candidate(std::size_t dim, double fill = 0.0) : values_(dim, fill) {}
  explicit Candidate(std::vector<double> values) : values_(std::move(values)) {}
  Candidate(std::initializer_list<double> values) : values_(values) {}

  static Candidate uniform(std::size_t dim, Rng& rng) {
    Candidate c(dim);
    for (auto& v : c.values_) v = rng.uniform();
    return c;
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }
  std::span<const double> view() const { return values_; }
  std::span<double> view() { return values_; }
  const std::vector<double>& values() const { return values_; }

  void clip() {
    for (auto& v : values_) v = clip01(v);
  }

  bool in_unit_cube() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return v >= 0.0 && v <= 1.0; });
  }

  friend bool operator==(const Candidate&, const Candidate&) = default;

 private:
  std::vector<double> values_;
};

/// Canonical rounding used by duplicate detection: 12 decimal digits.
inline std::int64_t canonical_digit(double v) {
  return std::llround(v * 1e12);
}

inline bool same_solution(const Candidate& a, const Candidate& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (canonical_digit(a[i]) != canonical_digit(b[i])) return false;
  }
  return true;
}

inline std::uint64_t solution_hash(const Candidate& c) {
  // FNV-1a over the canonical digits.
  std::uint64_t h = 1469598103934665603ull;
  for (double v : c) {
    auto d = static_cast<std::uint64_t>(canonical_digit(v));
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (d >> (8 * byte)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

/// Exact duplicate index over canonical rounding. Stores hash -> key and
/// resolves collisions through a caller-supplied lookup.
template <typename Key>
class DedupIndex {
 public:
  template <typename Lookup>
  bool contains(const Candidate& c, Lookup&& lookup) const {
    return find(c, solution_hash(c), lookup) != nullptr;
  }

  template <typename Lookup>
  const Key* find(const Candidate& c, std::uint64_t h, Lookup&& lookup) const {
    auto [lo, hi] = map_.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      if (same_solution(lookup(it->second), c)) return &it->second;
    }
    return nullptr;
  }

  void add(std::uint64_t h, Key key) { map_.emplace(h, key); }

  void remove(std::uint64_t h, Key key) {
    auto [lo, hi] = map_.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      if (it->second == key) {
        map_.erase(it);
        return;
      }
    }
  }

  void clear() { map_.clear(); }
  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_multimap<std::uint64_t, Key> map_;
};

// ---------------------------------------------------------------------------
// Evaluated samples and the pool
// ---------------------------------------------------------------------------

enum class Source { random_init, nash, generated, ga, validation };

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::random_init: return "random-init";
    case Source::nash: return "nash";
    case Source::generated: return "generated";
    case Source::ga: return "ga";
    case Source::validation: return "validation";
  }
  return "unknown";
}

struct EvaluatedSample {
  Candidate solution;
  double raw_score = 0.0;  // maximization sense
  std::uint64_t birth_tick = 0;
  Source source = Source::random_init;
};

/// Bounded FIFO of unique evaluated samples; training data for the model.
class SamplePool {
 public:
  explicit SamplePool(std::size_t capacity = 10000) : capacity_(capacity) {
    if (capacity == 0) throw Error("SamplePool capacity must be positive");
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const EvaluatedSample& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool contains(const Candidate& c) const {
    return index_.contains(c, [this](std::uint64_t tick) -> const Candidate& {
      return by_tick(tick).solution;
    });
  }

  /// Inserts unique members of the batch, assigning fresh birth ticks, then
  /// evicts the oldest entries until the pool fits. Returns the eviction count.
  std::size_t insert(std::span<const EvaluatedSample> batch) {
    for (const auto& s : batch) {
      if (!std::isfinite(s.raw_score)) {
        throw Error("SamplePool: non-finite raw score");
      }
      const std::uint64_t h = solution_hash(s.solution);
      auto lookup = [this](std::uint64_t tick) -> const Candidate& {
        return by_tick(tick).solution;
      };
      if (index_.find(s.solution, h, lookup) != nullptr) continue;
      EvaluatedSample copy = s;
      copy.birth_tick = next_tick_++;
      entries_.push_back(std::move(copy));
      index_.add(h, entries_.back().birth_tick);
    }
    std::size_t evicted = 0;
    while (entries_.size() > capacity_) {
      const auto& oldest = entries_.front();
      index_.remove(solution_hash(oldest.solution), oldest.birth_tick);
      entries_.pop_front();
      ++evicted;
    }
    return evicted;
  }

  std::size_t insert(const EvaluatedSample& s) {
    return insert(std::span<const EvaluatedSample>(&s, 1));
  }

  std::pair<double, double> extremes() const {
    if (entries_.empty()) throw Error("pool_extremes: empty pool");
    auto [lo, hi] = std::minmax_element(
        entries_.begin(), entries_.end(),
        [](const auto& a, const auto& b) { return a.raw_score < b.raw_score; });
    return {lo->raw_score, hi->raw_score};
  }

  double mean_score() const {
    if (entries_.empty()) throw Error("mean_score: empty pool");
    double total = 0.0;
    for (const auto& e : entries_) total += e.raw_score;
    return total / static_cast<double>(entries_.size());
  }

  const EvaluatedSample& best() const {
    if (entries_.empty()) throw Error("best: empty pool");
    return *std::max_element(
        entries_.begin(), entries_.end(),
        [](const auto& a, const auto& b) { return a.raw_score < b.raw_score; });
  }

 private:
  const EvaluatedSample& by_tick(std::uint64_t tick) const {
    return entries_[static_cast<std::size_t>(tick - entries_.front().birth_tick)];
  }

  std::size_t capacity_;
  std::uint64_t next_tick_ = 0;
  std::deque<EvaluatedSample> entries_;
  DedupIndex<std::uint64_t> index_;
};

inline std::size_t pool_insert(SamplePool& pool,
                               std::span<const EvaluatedSample> batch) {
  return pool.insert(batch);
}

inline std::pair<double, double> pool_extremes(const SamplePool& pool) {
  return pool.extremes();
}

// ---------------------------------------------------------------------------
// Score scaling
// ---------------------------------------------------------------------------

struct ScalingConfig {
  double ceiling = 1.0;  // Z

  void validate() const {
    if (!(ceiling > 0.0 && ceiling <= 1.0)) {
      throw Error("ScalingConfig: ceiling must lie in (0, 1]");
    }
  }
};

/// Affine map of raw scores onto [0, Z]. A degenerate set (all equal) maps
/// every score to Z.
inline std::vector<double> scale_scores(std::span<const double> raw,
                                        const ScalingConfig& cfg = {}) {
  cfg.validate();
  if (raw.empty()) throw Error("scale_scores: empty input");
  auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> out(raw.size(), cfg.ceiling);
  if (hi == lo) return out;
  const double width = hi - lo;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = cfg.ceiling * ((raw[i] - lo) / width);  // never exceeds Z
  }
  return out;
}

inline std::vector<double> scale_scores(const SamplePool& pool,
                                        const ScalingConfig& cfg = {}) {
  std::vector<double> raw;
  raw.reserve(pool.size());
  for (const auto& e : pool) raw.push_back(e.raw_score);
  return scale_scores(raw, cfg);
}

// ---------------------------------------------------------------------------
// Evaluation budget
// ---------------------------------------------------------------------------

/// Where an evaluation was spent. Used for conservation checks.
enum class Phase : std::size_t {
  init = 0,
  validation,
  batch,
  inner,
  presample,
  count_
};

inline constexpr std::size_t kPhaseCount = static_cast<std::size_t>(Phase::count_);

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::init: return "init";
    case Phase::validation: return "validation";
    case Phase::batch: return "batch";
    case Phase::inner: return "inner";
    case Phase::presample: return "presample";
    case Phase::count_: break;
  }
  return "unknown";
}

class BudgetAccountant {
 public:
  explicit BudgetAccountant(std::uint64_t limit = 500000) : limit_(limit) {
    if (limit == 0) throw Error("BudgetAccountant: limit must be positive");
  }

  std::uint64_t limit() const { return limit_; }
  std::uint64_t spent() const { return spent_; }
  std::uint64_t remaining() const { return limit_ - spent_; }
  bool exhausted() const { return spent_ >= limit_; }
  bool can_afford(std::uint64_t n) const { return remaining() >= n; }

  void charge(Phase phase) {
    if (exhausted()) throw BudgetExhausted();
    ++spent_;
    ++per_phase_[static_cast<std::size_t>(phase)];
  }

  std::uint64_t spent_in(Phase phase) const {
    return per_phase_[static_cast<std::size_t>(phase)];
  }

  const std::array<std::uint64_t, kPhaseCount>& per_phase() const {
    return per_phase_;
  }

 private:
  std::uint64_t limit_;
  std::uint64_t spent_ = 0;
  std::array<std::uint64_t, kPhaseCount> per_phase_{};
};

}  // namespace deepopt

#endif  // DEEPOPT_CORE_HPP
