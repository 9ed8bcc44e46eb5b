#include <gtest/gtest.h>

#include <random>

#include <algorithm>
#include <set>

#include "deepopt/core.hpp"

using namespace deepopt;

namespace {

EvaluatedSample sample(double gene, double score) {
  return {Candidate{gene}, score, 0, Source::random_init};
}

std::vector<double> genes_of(const SamplePool& pool) {
  std::vector<double> out;
  for (const auto& e : pool) out.push_back(e.solution[0]);
  return out;
}

}  // namespace

TEST(ScaleScores, AffineEndpoints) {
  const std::vector<double> raw{2, 4, 6};
  EXPECT_EQ(scale_scores(raw), (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(ScaleScores, CeilingHalvesRange) {
  const std::vector<double> raw{2, 4, 6};
  EXPECT_EQ(scale_scores(raw, ScalingConfig{0.5}), (std::vector<double>{0.0, 0.25, 0.5}));
}

TEST(ScaleScores, DegenerateMapsToCeiling) {
  const std::vector<double> raw{7, 7, 7};
  EXPECT_EQ(scale_scores(raw), (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(ScaleScores, RejectsBadCeilingAndEmptyInput) {
  const std::vector<double> raw{1, 2};
  EXPECT_THROW(scale_scores(raw, ScalingConfig{0.0}), Error);
  EXPECT_THROW(scale_scores(raw, ScalingConfig{1.5}), Error);
  EXPECT_THROW(scale_scores(std::vector<double>{}), Error);
}

TEST(ScaleScores, OrderPreservingAndArgmaxInvariant) {
  Rng rng(11, 0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> raw(2 + rng.index(50));
    for (auto& v : raw) v = rng.uniform(-1000, 1000);
    const double z = rng.uniform(0.01, 1.0);
    const auto s = scale_scores(raw, ScalingConfig{z});
    for (std::size_t i = 0; i < raw.size(); ++i) {
      EXPECT_GE(s[i], 0.0);
      EXPECT_LE(s[i], z);
      for (std::size_t j = 0; j < raw.size(); ++j) {
        if (raw[i] < raw[j]) EXPECT_LT(s[i], s[j]);
      }
    }
    EXPECT_EQ(std::max_element(raw.begin(), raw.end()) - raw.begin(),
              std::max_element(s.begin(), s.end()) - s.begin());
  }
}

TEST(SamplePool, FifoEviction) {
  SamplePool pool(3);
  pool.insert(std::vector<EvaluatedSample>{sample(0.1, 1), sample(0.2, 2), sample(0.3, 3)});
  const auto evicted = pool.insert(sample(0.4, 4));
  EXPECT_EQ(evicted, 1u);
  EXPECT_EQ(genes_of(pool), (std::vector<double>{0.2, 0.3, 0.4}));
}

TEST(SamplePool, DuplicateIgnored) {
  SamplePool pool(3);
  pool.insert(std::vector<EvaluatedSample>{sample(0.1, 1), sample(0.2, 2), sample(0.3, 3)});
  EXPECT_EQ(pool.insert(sample(0.1, 9)), 0u);
  EXPECT_EQ(genes_of(pool), (std::vector<double>{0.1, 0.2, 0.3}));
}

TEST(SamplePool, IntraBatchDedup) {
  SamplePool pool(3);
  pool.insert(std::vector<EvaluatedSample>{sample(0.1, 1), sample(0.2, 2), sample(0.1, 1)});
  EXPECT_EQ(genes_of(pool), (std::vector<double>{0.1, 0.2}));
}

TEST(SamplePool, DuplicateRuleUsesTwelveDigits) {
  SamplePool pool(10);
  pool.insert(sample(0.5, 1));
  EXPECT_TRUE(pool.contains(Candidate{0.5 + 1e-14}));
  EXPECT_FALSE(pool.contains(Candidate{0.5 + 1e-11}));
}

TEST(SamplePool, RejectsNonFiniteScore) {
  SamplePool pool(3);
  EXPECT_THROW(pool.insert(sample(0.1, std::nan(""))), Error);
  EXPECT_THROW(pool.insert(sample(0.1, INFINITY)), Error);
}

TEST(SamplePool, BirthTicksStrictlyIncrease) {
  SamplePool pool(5);
  for (int i = 0; i < 12; ++i) pool.insert(sample(i / 100.0, i));
  std::uint64_t last = 0;
  bool first = true;
  for (const auto& e : pool) {
    if (!first) EXPECT_GT(e.birth_tick, last);
    last = e.birth_tick;
    first = false;
  }
}

TEST(SamplePool, InvariantsUnderRandomInterleavings) {
  Rng rng(5, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t cap = 1 + rng.index(30);
    SamplePool pool(cap);
    std::vector<EvaluatedSample> history;
    for (int step = 0; step < 100; ++step) {
      std::vector<EvaluatedSample> batch(rng.index(8));
      for (auto& s : batch) s = sample(static_cast<double>(rng.index(40)) / 40.0, rng.uniform());
      pool.insert(batch);
      ASSERT_LE(pool.size(), cap);
      std::set<double> seen;
      for (const auto& e : pool) EXPECT_TRUE(seen.insert(e.solution[0]).second);
    }
    // Removed entries were always the oldest ones.
    for (std::size_t i = 1; i < pool.size(); ++i) {
      EXPECT_LT(pool[i - 1].birth_tick, pool[i].birth_tick);
    }
    for (const auto& e : pool) EXPECT_TRUE(pool.contains(e.solution));
  }
}

TEST(PoolExtremes, Examples) {
  SamplePool pool(10);
  pool.insert(std::vector<EvaluatedSample>{sample(0.1, 2), sample(0.2, 4), sample(0.3, 6)});
  EXPECT_EQ(pool_extremes(pool), (std::pair<double, double>{2, 6}));
  pool.insert(sample(0.4, 9));
  EXPECT_EQ(pool_extremes(pool), (std::pair<double, double>{2, 9}));
  SamplePool single(3);
  single.insert(sample(0.5, 5));
  EXPECT_EQ(pool_extremes(single), (std::pair<double, double>{5, 5}));
  EXPECT_THROW(pool_extremes(SamplePool(3)), Error);
}

TEST(RngStream, Deterministic) {
  Rng a = rng_stream(42, 0);
  Rng b = rng_stream(42, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, StreamsDiffer) {
  Rng a = rng_stream(42, 0);
  Rng b = rng_stream(42, 1);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.next_u64() == b.next_u64();
  EXPECT_EQ(same, 0);
}

TEST(RngStream, UniformRange) {
  Rng a = rng_stream(42, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = a.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngStream, FixedReferenceSequence) {
  // The engine itself: the standard fixes the 10000th output of a
  // default-constructed mt19937_64.
  std::mt19937_64 engine;
  engine.discard(9999);
  EXPECT_EQ(engine(), 9981545732273789042ULL);

  // Our seeding and derived distributions, pinned so that a change shows up
  // as a failure rather than as silently different experiments.
  Rng a = rng_stream(42, 0);
  EXPECT_EQ(a.next_u64(), 9033786554787212662ULL);
  EXPECT_EQ(a.next_u64(), 7806919203930340588ULL);
  EXPECT_EQ(a.next_u64(), 16572419257921891740ULL);
  EXPECT_DOUBLE_EQ(a.uniform(), 0.72684483145541867);
  EXPECT_EQ(a.uniform_int(1, 6), 3);
}

TEST(RngStream, UniformIntUnbiased) {
  Rng a = rng_stream(3, 0);
  std::vector<int> counts(3);
  for (int i = 0; i < 30000; ++i) ++counts[static_cast<std::size_t>(a.uniform_int(1, 3) - 1)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(BudgetAccountant, ChargesAndThrows) {
  BudgetAccountant b(3);
  b.charge(Phase::init);
  b.charge(Phase::inner);
  b.charge(Phase::inner);
  EXPECT_TRUE(b.exhausted());
  EXPECT_THROW(b.charge(Phase::batch), BudgetExhausted);
  EXPECT_EQ(b.spent(), 3u);
  EXPECT_EQ(b.spent_in(Phase::inner), 2u);
  std::uint64_t total = 0;
  for (auto n : b.per_phase()) total += n;
  EXPECT_EQ(total, b.spent());
  EXPECT_THROW(BudgetAccountant(0), Error);
}

TEST(Candidate, UniformInUnitCube) {
  Rng rng(1, 0);
  const auto c = Candidate::uniform(1000, rng);
  EXPECT_TRUE(c.in_unit_cube());
  Candidate d{-0.5, 0.5, 1.5};
  d.clip();
  EXPECT_EQ(d, (Candidate{0.0, 0.5, 1.0}));
}
