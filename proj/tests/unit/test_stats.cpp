#include <gtest/gtest.h>

#include <vector>

#include "deepopt/stats.hpp"

using namespace deepopt;

// Reference values computed outside this code base with
// scipy.stats.ttest_ind(a, b, equal_var=False).
TEST(Welch, MatchesReferenceImplementation) {
  const std::vector<double> a{2.1, 2.5, 2.3, 2.0, 2.2};
  const std::vector<double> b{2.6, 2.8, 2.7, 2.9, 2.5};
  const auto r = welch_test(a, b);
  EXPECT_NEAR(r.t, -4.3105, 1e-4);
  EXPECT_NEAR(r.df, 7.7111, 1e-4);
  EXPECT_NEAR(r.p_value, 0.0028098, 1e-6);
  EXPECT_NEAR(r.confidence, 0.9971901874676722, 1e-9);
  EXPECT_NEAR(significance(a, b), 0.997, 5e-4);
}

TEST(Welch, HandComputedDegreesOfFreedom) {
  // a: mean 2, var 1 (n 3); b: mean 5, var 4 (n 3). va = 1/3, vb = 4/3.
  // t = -3 / sqrt(5/3); df = (5/3)^2 / ((1/9)/2 + (16/9)/2) = 25/9 / (17/18).
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{3, 5, 7};
  const auto r = welch_test(a, b);
  EXPECT_NEAR(r.t, -3.0 / std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_NEAR(r.df, (25.0 / 9.0) / (17.0 / 18.0), 1e-12);
}

TEST(Welch, SymmetricInArguments) {
  const std::vector<double> a{1.0, 1.5, 0.7, 1.2};
  const std::vector<double> b{0.2, 0.9, 0.1};
  EXPECT_NEAR(welch_test(a, b).confidence, welch_test(b, a).confidence, 1e-15);
  EXPECT_NEAR(welch_test(a, b).t, -welch_test(b, a).t, 1e-15);
}

TEST(Welch, DegenerateSamples) {
  const std::vector<double> same{3, 3, 3};
  const std::vector<double> other{4, 4};
  EXPECT_EQ(welch_test(same, same).confidence, 0.0);
  EXPECT_EQ(welch_test(same, other).confidence, 1.0);
  EXPECT_THROW(welch_test(std::vector<double>{1.0}, same), Error);
}

TEST(Moments, UnbiasedVariance) {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  const auto m = moments(xs);
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  EXPECT_DOUBLE_EQ(m.variance, 32.0 / 7.0);
  EXPECT_EQ(m.n, 8u);
}
