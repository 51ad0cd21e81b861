#include <doctest.h>

#include <sstream>

#include "bilevel/case_studies.hpp"
#include "bilevel/lower_solver.hpp"
#include "bilevel/optimistic.hpp"
#include "toy.hpp"

using namespace bilevel;

TEST_CASE("optimistic scheme finds the toy optimum") {
  const auto inst = testing::toy_instance();
  const auto run = run_optimistic(inst, 0.04, make_vector({1.5}));
  CHECK(run.x[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(run.y[0] == doctest::Approx(0.3).epsilon(1e-3));
  CHECK(run.r_ll <= 1e-6);
  CHECK(run.status == StatusLabel::converged);
}

TEST_CASE("proximal steps never increase the subproblem objective") {
  const auto inst = case1_instance();
  const auto run = run_optimistic(inst, 0.1, make_vector({1.0, 1.0}));
  REQUIRE_FALSE(run.trace.empty());
  for (const auto& row : run.trace) {
    if (row.start_feasible) CHECK(row.objective <= row.objective_at_start + 1e-9);
  }
  CHECK(run.r_ll <= 1e-6);
  CHECK(eval_upper(inst, run.x, run.y) < eval_upper(inst, make_vector({1.0, 1.0}), make_vector({1.0, 0.0})));
  std::ostringstream csv;
  write_optimistic_trace(csv, run);
  CHECK(csv.str().rfind("iter,step,r_ll,g_stat,F,objective\n", 0) == 0);
}

TEST_CASE("a huge proximal weight pins the leader") {
  const auto inst = case1_instance();
  ProximalState state;
  state.x = make_vector({1.0, 1.0});
  state.v = solve_lower(inst, state.x).y_star;
  state.y = state.v;
  state.tau = 1e8;
  const auto step = proximal_subproblem(inst, state, 0.1);
  CHECK((step.x - state.x).norm() < 1e-6);
  CHECK(step.start_feasible);
}

TEST_CASE("fixed point is stationary") {
  const auto inst = testing::toy_instance();
  ProximalState state;
  state.x = make_vector({0.5});
  state.v = make_vector({0.5});
  state.y = make_vector({0.3});
  state.tau = 2.0;
  const auto step = proximal_subproblem(inst, state, 0.04);
  CHECK((step.x - state.x).norm() < 1e-6);
  CHECK((step.y - state.y).norm() < 1e-6);
  CHECK(step.lambda == doctest::Approx(2.5).epsilon(1e-3));
}

TEST_CASE("infeasible starts are rejected") {
  const auto inst = case1_instance();
  try {
    run_optimistic(inst, 0.1, make_vector({3.0, 1.0}));
    FAIL("expected InfeasibleInputError");
  } catch (const InfeasibleInputError& e) {
    CHECK(e.suggestion().isApprox(make_vector({2.0, 1.0})));
  }
}

TEST_CASE("multistart is reproducible") {
  const auto inst = case1_instance();
  const auto a = optimistic_multistart(inst, 0.1, 3);
  const auto b = optimistic_multistart(inst, 0.1, 3);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].x == b[i].x);
}
