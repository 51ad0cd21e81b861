#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "bilevel/case_studies.hpp"
#include "bilevel/diagnostics.hpp"
#include "support.hpp"

using namespace bilevel;

TEST_CASE("case-1 exact response sets") {
  const Case1Params p;
  CHECK(case1_exact_response_set(p, make_vector({0.0, 0.0})) == Case1Response::link1);
  CHECK(case1_exact_response_set(p, make_vector({1.6, 1.4})) == Case1Response::full_simplex);
  CHECK(case1_exact_response_set(p, make_vector({2.0, 0.0})) == Case1Response::link2);
}

TEST_CASE("case-1 eps response segments") {
  const Case1Params p;
  CHECK(case1_eps_response_set(p, make_vector({0.0, 0.0}), 0.1).s_max == doctest::Approx(0.5));
  CHECK(case1_eps_response_set(p, make_vector({2.0, 0.0}), 0.1).s_max == doctest::Approx(1.0 / 18.0));
  CHECK(case1_eps_response_set(p, make_vector({0.0, 0.0}), 0.0).s_max == 0.0);
  CHECK(case1_eps_response_set(p, make_vector({1.6, 1.4}), 0.0).s_max == 1.0);
  const auto seg = case1_eps_response_set(p, make_vector({2.0, 0.0}), 0.1);
  CHECK(seg.anchor.isApprox(make_vector({0.0, 1.0})));
}

TEST_CASE("case-1 closed-form diagnostics") {
  const Case1Params p;
  const auto exact = case1_analytic_diagnostics(p, make_vector({1.6, 1.4}), 0.0);
  CHECK(exact.t_star == doctest::Approx(0.412).epsilon(1e-12));
  CHECK(exact.psi_o == doctest::Approx(0.382).epsilon(1e-3));
  CHECK(exact.delta == doctest::Approx(0.864).epsilon(1e-3));

  const auto sym = case1_analytic_diagnostics(p, make_vector({1.0, 1.0}), 0.1);
  CHECK(sym.psi_o == doctest::Approx(0.425));
  CHECK(sym.delta == doctest::Approx(0.875));
  CHECK(normalized_ratio(sym.delta, sym.psi_o) == doctest::Approx(0.614).epsilon(1e-3));

  const auto w25 = case1_analytic_diagnostics(p, make_vector({1.6, 1.2}), 0.1);
  CHECK(std::abs(w25.psi_o - 0.391) < 1e-3);
  CHECK(std::abs(w25.delta - 0.449) < 1e-3);
}

TEST_CASE("case-2 structure") {
  const Case2Params p;
  const auto inst = case2_instance(p);
  // Hessian of f in y is 2 diag(w) + 2 mu 11^T.
  Matrix h(4, 4);
  const Vector x = inst.leader_set().center(), y = Vector::Constant(4, 1.0);
  for (int j = 0; j < 4; ++j) {
    Vector yp = y, ym = y;
    yp[j] += 1e-4;
    ym[j] -= 1e-4;
    h.col(j) = (inst.lower().gradient_y(x, yp) - inst.lower().gradient_y(x, ym)) / 2e-4;
  }
  Matrix expected = Matrix::Constant(4, 4, 2.0 * p.mu_d);
  for (int i = 0; i < 4; ++i) expected(i, i) += 2.0 * p.w[i];
  CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().minCoeff() >= 2.0 - 1e-6);

  const Vector gas = make_vector({0.79, 0.79, 3.12, 0.50});
  CHECK(gas[2] / gas.sum() == doctest::Approx(0.6).epsilon(1e-3));
  CHECK(inst.leader_set().contains(gas));
  CHECK_FALSE(inst.leader_set().contains(make_vector({0.5, 0.5, 4.0, 0.5})));
  CHECK(inst.growth_modulus()(gas) == 1.0);
}

TEST_CASE("case-2 lower closed form at the balanced policy") {
  const auto closed = case2_lower_closed_form(Case2Params{}, make_vector({1.08, 0.72, 3.79, 1.08}));
  CHECK(closed.interior);
  CHECK(closed.y.sum() > 0.0);
}
