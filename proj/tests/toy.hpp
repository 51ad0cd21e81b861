#pragma once

#include "bilevel/instance.hpp"

namespace testing {

// F = (x - 1)^2 + y, f = (y - x)^2 on X = [0, 2], Y = [-3, 3].
// S_eps(x) = [x - sqrt(eps), x + sqrt(eps)], so
// psi^o = (x - 1)^2 + x - sqrt(eps), psi^p = (x - 1)^2 + x + sqrt(eps),
// both minimized at x = 1/2.
inline bilevel::BilevelInstance toy_instance() {
  using bilevel::make_vector;
  using bilevel::Vector;
  auto upper = std::make_shared<bilevel::FunctionObjective>(
      [](const Vector& x, const Vector& y) { return (x[0] - 1.0) * (x[0] - 1.0) + y[0]; },
      [](const Vector& x, const Vector&) { return make_vector({2.0 * (x[0] - 1.0)}); },
      [](const Vector&, const Vector&) { return make_vector({1.0}); });
  auto lower = std::make_shared<bilevel::FunctionObjective>(
      [](const Vector& x, const Vector& y) { return (y[0] - x[0]) * (y[0] - x[0]); },
      [](const Vector& x, const Vector& y) { return make_vector({-2.0 * (y[0] - x[0])}); },
      [](const Vector& x, const Vector& y) { return make_vector({2.0 * (y[0] - x[0])}); });
  return bilevel::BilevelInstance("toy", upper, lower,
                                  bilevel::LeaderSet(make_vector({0.0}), make_vector({2.0})),
                                  bilevel::FollowerSet::box(make_vector({-3.0}), make_vector({3.0})));
}

}  // namespace testing
