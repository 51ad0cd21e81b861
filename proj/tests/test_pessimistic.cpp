#include <doctest.h>

#include <random>

#include "bilevel/case_studies.hpp"
#include "bilevel/lower_solver.hpp"
#include "bilevel/pessimistic.hpp"
#include "support.hpp"
#include "toy.hpp"

using namespace bilevel;

TEST_CASE("NI gap is nonnegative and zero at the pessimistic equilibrium") {
  std::mt19937_64 rng(31);
  for (const auto& inst : {case1_instance(), case2_instance()}) {
    for (const auto& x : testing::random_leader_points(inst.leader_set(), 3, 41)) {
      for (int k = 0; k < 4; ++k) {
        const Vector y = testing::random_follower_point(inst.follower_set(), rng);
        const Vector v = testing::random_follower_point(inst.follower_set(), rng);
        const auto terms = ni_gap_terms(inst, x, y, v, 0.1);
        CHECK(terms.total >= 0.0);
        CHECK(terms.suboptimality >= -1e-10);
      }
      const auto eval = ni_penalized_eval(inst, x, 0.1);
      CHECK(eval.ni_gap <= 1e-6);
      CHECK(ni_gap(inst, x, eval.y, eval.v, 0.1) <= 1e-6);
      for (const auto& start : eval.trace) {
        for (std::size_t i = 1; i < start.chain.size(); ++i) {
          CHECK(start.chain[i].gap <= start.chain[i - 1].gap + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("NI route agrees with the direct maximization") {
  const auto inst = case1_instance();
  for (const auto& x : testing::random_leader_points(inst.leader_set(), 5, 43)) {
    const auto lower = solve_lower(inst, x);
    const auto direct = solve_eps_extremum(inst, x, 0.1, lower, Sense::max);
    const auto ni = ni_penalized_eval(inst, x, 0.1);
    CHECK(ni.psi_p == doctest::Approx(direct.value).epsilon(1e-6));
  }
}

TEST_CASE("outer pessimistic search on the toy") {
  const auto inst = testing::toy_instance();
  OuterSearchConfig config;
  config.n_starts = 3;
  config.max_fevals = 200;
  const auto result = outer_pessimistic_search(inst, 0.01, config);
  CHECK(result.x_best[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(result.eval.psi_p == doctest::Approx(0.85).epsilon(1e-5));
  CHECK(result.starts.size() == 3);
}

TEST_CASE("leader starts are feasible and reproducible") {
  const auto set = case2_leader_set(Case2Params{});
  const auto a = leader_starts(set, 6, 7, "test");
  const auto b = leader_starts(set, 6, 7, "test");
  REQUIRE(a.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(set.contains(a[i]));
    CHECK(a[i] == b[i]);
  }
  CHECK(a[0].isApprox(set.center()));
}
