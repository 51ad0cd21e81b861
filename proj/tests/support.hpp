#pragma once

#include <random>
#include <vector>

#include "bilevel/case_studies.hpp"
#include "bilevel/instance.hpp"

namespace testing {

using bilevel::Vector;

/// Uniform points in the leader box, kept only when inside the leader set.
inline std::vector<Vector> random_leader_points(const bilevel::LeaderSet& set, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vector> out;
  while (static_cast<int>(out.size()) < count) {
    Vector x(set.dim());
    for (int i = 0; i < set.dim(); ++i) x[i] = set.lo()[i] + u(rng) * (set.hi()[i] - set.lo()[i]);
    if (set.contains(x, 0.0)) out.push_back(x);
  }
  return out;
}

inline Vector random_box_point(const Vector& lo, const Vector& hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = lo[i] + u(rng) * (hi[i] - lo[i]);
  return x;
}

/// Random point of the follower set (box or simplex).
inline Vector random_follower_point(const bilevel::FollowerSet& set, std::mt19937_64& rng) {
  if (set.kind() == bilevel::FollowerSet::Kind::box) return random_box_point(set.lo(), set.hi(), rng);
  std::exponential_distribution<double> e(1.0);
  Vector y(set.dim());
  for (int i = 0; i < set.dim(); ++i) y[i] = e(rng);
  return y * (set.simplex_total() / y.sum());
}

}  // namespace testing
