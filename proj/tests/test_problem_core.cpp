#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "bilevel/case_studies.hpp"
#include "bilevel/config_io.hpp"
#include "bilevel/instance.hpp"
#include "bilevel/instance_io.hpp"
#include "bilevel/rng.hpp"
#include "support.hpp"

using namespace bilevel;

namespace {

double rel_err(const Vector& analytic, const Vector& numeric) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / std::max(1.0, std::abs(analytic[i])));
  }
  return worst;
}

Vector central_x(const Objective& h, const Vector& x, const Vector& y, double step) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    g[i] = (h.value(xp, y) - h.value(xm, y)) / (2 * step);
  }
  return g;
}

Vector central_y(const Objective& h, const Vector& x, const Vector& y, double step) {
  Vector g(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Vector yp = y, ym = y;
    yp[i] += step;
    ym[i] -= step;
    g[i] = (h.value(x, yp) - h.value(x, ym)) / (2 * step);
  }
  return g;
}

void check_gradients(const BilevelInstance& inst, unsigned seed) {
  std::mt19937_64 rng(seed);
  const auto xs = testing::random_leader_points(inst.leader_set(), 20, seed);
  for (const auto& x : xs) {
    const Vector y = testing::random_follower_point(inst.follower_set(), rng);
    for (const Objective* h : {&inst.upper(), &inst.lower()}) {
      CHECK(rel_err(h->gradient_x(x, y), central_x(*h, x, y, 1e-6)) < 1e-5);
      CHECK(rel_err(h->gradient_y(x, y), central_y(*h, x, y, 1e-6)) < 1e-5);
    }
  }
}

}  // namespace

TEST_CASE("case gradients agree with central differences") {
  check_gradients(case1_instance(), 1);
  check_gradients(case2_instance(), 2);
}

TEST_CASE("quadratic objective") {
  Matrix q(3, 3);
  q << 2, 1, 0, 0, 4, 1, 0, 1, 6;  // symmetrized to [[2,.5,0],[.5,4,1],[0,1,6]]
  const QuadraticObjective h(1, 2, q, make_vector({1.0, -1.0, 0.5}), 3.0);
  const Vector x = make_vector({0.5}), y = make_vector({-1.0, 2.0});
  const double z0 = 0.5, z1 = -1.0, z2 = 2.0;
  const double expected = 0.5 * (2 * z0 * z0 + 4 * z1 * z1 + 6 * z2 * z2 + 2 * 0.5 * z0 * z1 + 2 * 1 * z1 * z2) +
                          (z0 - z1 + 0.5 * z2) + 3.0;
  CHECK(h.value(x, y) == doctest::Approx(expected));
  CHECK(rel_err(h.gradient_x(x, y), central_x(h, x, y, 1e-6)) < 1e-8);
  CHECK(rel_err(h.gradient_y(x, y), central_y(h, x, y, 1e-6)) < 1e-8);
}

TEST_CASE("non-finite objective values raise EvaluationError") {
  auto bad = std::make_shared<FunctionObjective>([](const Vector& x, const Vector&) { return std::log(x[0] - 1.0); });
  auto good = std::make_shared<FunctionObjective>([](const Vector&, const Vector& y) { return y.squaredNorm(); });
  const BilevelInstance inst("bad", bad, good, LeaderSet(make_vector({0.0}), make_vector({2.0})),
                             FollowerSet::box(make_vector({0.0}), make_vector({1.0})));
  CHECK_THROWS_AS(eval_upper(inst, make_vector({0.5}), make_vector({0.0})), EvaluationError);
  CHECK(eval_lower(inst, make_vector({0.5}), make_vector({0.5})) == doctest::Approx(0.25));
  CHECK_FALSE(inst.has_gradients());
  CHECK_THROWS_AS(inst.require_gradients("test"), ConfigError);
}

TEST_CASE("random streams are keyed, not sequenced") {
  auto a = make_engine(7, StreamKey("lower").mix(make_vector({1.0, 2.0})));
  auto b = make_engine(7, StreamKey("lower").mix(make_vector({1.0, 2.0})));
  auto c = make_engine(7, StreamKey("lower").mix(make_vector({1.0, 2.0 + 1e-12})));
  auto d = make_engine(8, StreamKey("lower").mix(make_vector({1.0, 2.0})));
  const auto first = a();
  CHECK(first == b());
  CHECK(first != c());
  CHECK(first != d());
  CHECK(StreamKey("x").value() != StreamKey("y").value());
}

TEST_CASE("latin hypercube fills every stratum once") {
  auto engine = make_engine(7, StreamKey("test-lhs"));
  const Vector lo = make_vector({0.0, -1.0, 10.0}), hi = make_vector({1.0, 1.0, 20.0});
  const int n = 25;
  const auto pts = latin_hypercube(lo, hi, n, engine);
  REQUIRE(static_cast<int>(pts.size()) == n);
  for (int j = 0; j < 3; ++j) {
    std::set<int> strata;
    for (const auto& p : pts) {
      CHECK(p[j] >= lo[j]);
      CHECK(p[j] <= hi[j]);
      strata.insert(std::min(n - 1, static_cast<int>((p[j] - lo[j]) / (hi[j] - lo[j]) * n)));
    }
    CHECK(static_cast<int>(strata.size()) == n);
  }
  auto again = make_engine(7, StreamKey("test-lhs"));
  const auto pts2 = latin_hypercube(lo, hi, n, again);
  for (int k = 0; k < n; ++k) CHECK(pts[k] == pts2[k]);
}

TEST_CASE("instance files") {
  SUBCASE("custom quadratic from TOML") {
    const auto doc = parse_toml_text(R"(
name = "toy"
objective = "custom-quadratic"
eps = 0.25
[leader]
lo = [0.0]
hi = [2.0]
[follower]
kind = "box"
lo = [-3.0]
hi = [3.0]
[upper]
Q = [[2.0, 0.0], [0.0, 0.0]]
q = [-2.0, 1.0]
c = 1.0
[lower]
Q = [[2.0, -2.0], [-2.0, 2.0]]
[tolerances]
ni_starts = 3
)");
    const auto li = instance_from_json(doc);
    CHECK(li.instance.n() == 1);
    CHECK(li.instance.m() == 1);
    CHECK(li.eps == 0.25);
    CHECK(li.tol.ni_starts == 3);
    // F = (x - 1)^2 + y, f = (y - x)^2
    CHECK(eval_upper(li.instance, make_vector({0.5}), make_vector({2.0})) == doctest::Approx(2.25));
    CHECK(eval_lower(li.instance, make_vector({0.5}), make_vector({2.0})) == doctest::Approx(2.25));
  }
  SUBCASE("builtin cases load from the fixtures") {
    const auto c1 = load_instance(std::string(BILEVEL_DATA_DIR) + "/case1.toml");
    REQUIRE(c1.case1);
    CHECK(c1.eps == 0.1);
    CHECK(c1.case1->alpha == 0.3);
    const auto c2 = load_instance(std::string(BILEVEL_DATA_DIR) + "/case2.toml");
    REQUIRE(c2.case2);
    CHECK(c2.instance.n() == 4);
    CHECK(c2.case2->kappa[2] == 0.0822);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_toml_text("a = [1, 2"), ConfigError);
    CHECK_THROWS_AS(instance_from_json(parse_toml_text("objective = \"case1\"\nbogus = 1")), ConfigError);
    CHECK_THROWS_AS(instance_from_json(parse_toml_text("objective = \"case3\"")), ConfigError);
    CHECK_THROWS_AS(instance_from_json(parse_toml_text("objective = \"case1\"\n[params]\nalpha_typo = 1.0")),
                    ConfigError);
    CHECK_THROWS_AS(instance_from_json(parse_toml_text("objective = \"case2\"\n[params]\nkappa = [1.0]")),
                    ConfigError);
    CHECK_THROWS_AS(instance_from_json(parse_toml_text("objective = \"case1\"\neps = -1.0")), ConfigError);
    CHECK_THROWS_AS(instance_from_json(parse_toml_text("objective = \"case1\"\n[tolerances]\nsigmas = []")),
                    ConfigError);
    CHECK_THROWS_AS(instance_from_json(parse_toml_text("objective = \"custom-quadratic\"\n[leader]\nlo=[0.0]\nhi=[1.0]")),
                    ConfigError);
  }
}

TEST_CASE("tolerance round trip") {
  ToleranceConfig t;
  t.sigmas = {1.0, 5.0};
  t.master_seed = 123;
  t.gap_tol = 1e-7;
  ToleranceConfig back;
  apply_tolerances(tolerances_to_json(t), back);
  CHECK(back.sigmas == t.sigmas);
  CHECK(back.master_seed == 123);
  CHECK(back.gap_tol == 1e-7);
  ToleranceConfig other;
  CHECK_THROWS_AS(apply_tolerances(nlohmann::json{{"not_a_key", 1}}, other), ConfigError);
}
