#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "bilevel/case_studies.hpp"
#include "bilevel/lower_solver.hpp"
#include "support.hpp"

using namespace bilevel;

namespace {

// Stationary point of sum_i w_i (y_i - a_i x_i)^2 + mu (sum y - D)^2 by a
// dense solve of the normal equations.
Vector case2_linear_oracle(const Case2Params& p, const Vector& x) {
  Matrix h = Matrix::Constant(4, 4, 2.0 * p.mu_d);
  Vector rhs(4);
  for (int i = 0; i < 4; ++i) {
    h(i, i) += 2.0 * p.w[i];
    rhs[i] = 2.0 * p.w[i] * p.capacity_factor[i] * x[i] + 2.0 * p.mu_d * p.demand;
  }
  return h.ldlt().solve(rhs);
}

}  // namespace

TEST_CASE("case-2 lower solve matches an independent linear solve") {
  const Case2Params p;
  const auto inst = case2_instance(p);
  int interior = 0;
  for (const auto& x : testing::random_leader_points(inst.leader_set(), 30, 21)) {
    const Vector oracle = case2_linear_oracle(p, x);
    const auto closed = case2_lower_closed_form(p, x);
    CHECK((closed.y - oracle).lpNorm<Eigen::Infinity>() < 1e-12);
    const bool inside = (oracle.array() > 0.0).all() && (oracle.array() < inst.follower_set().hi().array()).all();
    CHECK(closed.interior == inside);
    if (!inside) continue;
    ++interior;
    const auto lower = solve_lower(inst, x);
    CHECK((lower.y_star - oracle).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(lower.status == SolveStatus::converged);
  }
  CHECK(interior > 10);
}

TEST_CASE("zero imbalance gives y = alpha * x") {
  const Case2Params p;
  Vector x(4);
  x << 2.0, 2.0, 0.0, 0.0;
  const double scale = p.demand / (p.capacity_factor[0] * x[0] + p.capacity_factor[1] * x[1]);
  x *= scale;
  const auto closed = case2_lower_closed_form(p, x);
  for (int i = 0; i < 4; ++i) CHECK(closed.y[i] == doctest::Approx(p.capacity_factor[i] * x[i]).epsilon(1e-12));
}

TEST_CASE("case-1 lower value is the cheaper link") {
  const Case1Params p;
  const auto inst = case1_instance(p);
  for (const auto& x : testing::random_leader_points(inst.leader_set(), 25, 4)) {
    const auto lower = solve_lower(inst, x);
    CHECK(lower.phi == doctest::Approx(std::min(p.a[0] + x[0], p.a[1] + x[1])).epsilon(1e-10));
    CHECK(inst.follower_set().contains(lower.y_star, 1e-10));
  }
}

TEST_CASE("eps extrema are feasible and ordered") {
  for (const auto& inst : {case1_instance(), case2_instance()}) {
    for (const auto& x : testing::random_leader_points(inst.leader_set(), 5, 8)) {
      const auto lower = solve_lower(inst, x);
      for (double eps : {0.0, 0.05, 0.5}) {
        const auto lo = solve_eps_extremum(inst, x, eps, lower, Sense::min);
        const auto hi = solve_eps_extremum(inst, x, eps, lower, Sense::max);
        CHECK(lo.value <= hi.value + 1e-9);
        for (const auto* e : {&lo, &hi}) {
          CHECK(inst.follower_set().contains(e->y, 1e-10));
          const double level = lower.phi + eps;
          CHECK(eval_lower(inst, x, e->y) <= level + 1e-9);
          CHECK(e->feasibility_slack >= -1e-13 * std::max(1.0, std::abs(level)));
          CHECK(e->multiplier >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("level extremum on a one-dimensional sublevel interval") {
  // f = (y - x)^2, F = y, level 0.04 -> y in [x - 0.2, x + 0.2].
  auto upper = std::make_shared<FunctionObjective>(
      [](const Vector&, const Vector& y) { return y[0]; },
      [](const Vector&, const Vector&) { return make_vector({0.0}); },
      [](const Vector&, const Vector&) { return make_vector({1.0}); });
  auto lower = std::make_shared<FunctionObjective>(
      [](const Vector& x, const Vector& y) { return (y[0] - x[0]) * (y[0] - x[0]); },
      [](const Vector& x, const Vector& y) { return make_vector({-2.0 * (y[0] - x[0])}); },
      [](const Vector& x, const Vector& y) { return make_vector({2.0 * (y[0] - x[0])}); });
  const BilevelInstance inst("interval", upper, lower, LeaderSet(make_vector({0.0}), make_vector({1.0})),
                             FollowerSet::box(make_vector({-1.0}), make_vector({1.0})));
  const Vector x = make_vector({0.5});
  const auto hi = solve_level_extremum(inst, x, 0.04, x, Sense::max);
  const auto lo = solve_level_extremum(inst, x, 0.04, x, Sense::min);
  CHECK(hi.value == doctest::Approx(0.7).epsilon(1e-7));
  CHECK(lo.value == doctest::Approx(0.3).epsilon(1e-7));
  // Multiplier of (y - x)^2 <= level at the active end: 1 = lambda * 2 * 0.2.
  CHECK(hi.multiplier == doctest::Approx(2.5).epsilon(1e-4));
}
