#ifndef DEEPOPT_STATS_HPP
#define DEEPOPT_STATS_HPP

#include <cmath>
#include <numeric>
#include <span>

#include <boost/math/distributions/students_t.hpp>

#include "deepopt/core.hpp"

namespace deepopt {

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t n = 0;
};

inline SampleMoments moments(std::span<const double> xs) {
  SampleMoments m;
  m.n = xs.size();
  if (xs.empty()) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / static_cast<double>(xs.size() - 1);
  }
  return m;
}

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-tailed
  double confidence = 0.0;  // 1 - p
};

/// Two-tailed Welch unequal-variance t-test. Two zero-variance samples give
/// confidence 0 when their means agree and 1 otherwise.
inline WelchResult welch_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error("welch_test: each sample needs at least 2 values");
  }
  const auto ma = moments(a);
  const auto mb = moments(b);
  const double va = ma.variance / static_cast<double>(ma.n);
  const double vb = mb.variance / static_cast<double>(mb.n);
  WelchResult r;
  if (va + vb == 0.0) {
    if (ma.mean != mb.mean) {
      r.t = ma.mean > mb.mean ? INFINITY : -INFINITY;
      r.p_value = 0.0;
      r.confidence = 1.0;
    }
    return r;
  }
  r.t = (ma.mean - mb.mean) / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) /
         (va * va / static_cast<double>(ma.n - 1) + vb * vb / static_cast<double>(mb.n - 1));
  const boost::math::students_t dist(r.df);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  r.confidence = 1.0 - r.p_value;
  return r;
}

inline double significance(std::span<const double> a, std::span<const double> b) {
  return welch_test(a, b).confidence;
}

}  // namespace deepopt

#endif  // DEEPOPT_STATS_HPP
