#include "bilevel/case_studies.hpp"

#include <algorithm>
#include <cmath>

#include "bilevel/diagnostics.hpp"

namespace bilevel {

namespace {

template <std::size_t N>
Vector to_vector(const std::array<double, N>& a) {
  return Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(N));
}

// Largest |grad_y F(x, v)| over the vertices of Y. F(x, .) is convex in both
// case studies, so its gradient norm is maximized at a vertex.
ScalarFieldFn vertex_lipschitz(std::shared_ptr<const Objective> upper, FollowerSet ys) {
  return [upper = std::move(upper), vertices = ys.vertices()](const Vector& x) {
    double best = 0.0;
    for (const auto& v : vertices) best = std::max(best, upper->gradient_y(x, v).norm());
    return best;
  };
}

}  // namespace

BilevelInstance case1_instance(const Case1Params& p) {
  const Vector a = to_vector(p.a);
  const Vector c = to_vector(p.c);
  const double alpha = p.alpha, beta = p.beta;

  auto upper = std::make_shared<FunctionObjective>(
      [c, alpha, beta](const Vector& x, const Vector& y) {
        return c.dot(y.cwiseProduct(y)) - alpha * x.dot(y) + beta * x.squaredNorm();
      },
      [alpha, beta](const Vector& x, const Vector& y) -> Vector { return -alpha * y + 2.0 * beta * x; },
      [c, alpha](const Vector& x, const Vector& y) -> Vector {
        return 2.0 * c.cwiseProduct(y) - alpha * x;
      });
  auto lower = std::make_shared<FunctionObjective>(
      [a](const Vector& x, const Vector& y) { return (a + x).dot(y); },
      [](const Vector&, const Vector& y) -> Vector { return y; },
      [a](const Vector& x, const Vector&) -> Vector { return a + x; });

  auto follower = FollowerSet::simplex(2, 1.0);
  auto lipschitz = vertex_lipschitz(upper, follower);
  return BilevelInstance("case1", std::move(upper), std::move(lower),
                         LeaderSet(Vector::Constant(2, p.x_lo), Vector::Constant(2, p.x_hi)),
                         std::move(follower), std::move(lipschitz));
}

double case1_cost_gap(const Case1Params& p, const Vector& x) {
  return (p.a[1] + x[1]) - (p.a[0] + x[0]);
}

Case1Response case1_exact_response_set(const Case1Params& p, const Vector& x) {
  const double gap = case1_cost_gap(p, x);
  if (std::abs(gap) <= kIndifferenceTol) return Case1Response::full_simplex;
  return gap > 0.0 ? Case1Response::link1 : Case1Response::link2;
}

Case1Segment case1_eps_response_set(const Case1Params& p, const Vector& x, double eps) {
  const Vector e1 = make_vector({1.0, 0.0});
  const Vector e2 = make_vector({0.0, 1.0});
  switch (case1_exact_response_set(p, x)) {
    case Case1Response::full_simplex:
      return {e1, e2, 1.0};
    case Case1Response::link1:
      return {e1, e2, std::min(1.0, eps / std::abs(case1_cost_gap(p, x)))};
    case Case1Response::link2:
      return {e2, e1, std::min(1.0, eps / std::abs(case1_cost_gap(p, x)))};
  }
  return {e1, e2, 1.0};
}

Case1Diagnostics case1_analytic_diagnostics(const Case1Params& p, const Vector& x, double eps) {
  const auto seg = case1_eps_response_set(p, x, eps);
  // Admissible range of t = y1 along the segment.
  const double t_a = seg.anchor[0];
  const double t_b = t_a + seg.s_max * (seg.other[0] - seg.anchor[0]);
  const double t_lo = std::min(t_a, t_b), t_hi = std::max(t_a, t_b);

  const double c1 = p.c[0], c2 = p.c[1];
  auto upper = [&](double t) {
    return c1 * t * t + c2 * (1 - t) * (1 - t) - p.alpha * (x[0] * t + x[1] * (1 - t)) +
           p.beta * x.squaredNorm();
  };
  const double t_free = (c2 + 0.5 * p.alpha * (x[0] - x[1])) / (c1 + c2);

  Case1Diagnostics d;
  d.t_star = std::clamp(t_free, 0.0, 1.0);
  const double t_opt = std::clamp(t_free, t_lo, t_hi);
  const double t_pes = upper(t_lo) >= upper(t_hi) ? t_lo : t_hi;
  d.psi_o = upper(t_opt);
  d.psi_p = upper(t_pes);
  d.delta = d.psi_p - d.psi_o;
  d.y_opt = make_vector({t_opt, 1.0 - t_opt});
  d.y_pes = make_vector({t_pes, 1.0 - t_pes});
  return d;
}

LeaderSet case2_leader_set(const Case2Params& p) {
  Vector lo = to_vector(p.x_lo).cwiseMax(to_vector(p.min_build));
  Vector hi = to_vector(p.x_hi);
  std::vector<LinearInequality> rows;
  rows.push_back({-Vector::Ones(4), -p.demand});
  for (int i = 0; i < 4; ++i) {
    Vector a = Vector::Constant(4, -p.share_cap);
    a[i] += 1.0;
    rows.push_back({a, 0.0});
  }
  return LeaderSet(std::move(lo), std::move(hi), std::move(rows));
}

BilevelInstance case2_instance(const Case2Params& p) {
  const Vector kappa = to_vector(p.kappa);
  const Vector beta = to_vector(p.beta);
  const Vector cost = to_vector(p.dispatch_cost);
  const Vector cf = to_vector(p.capacity_factor);
  const Vector w = to_vector(p.w);
  const double demand = p.demand, lambda_d = p.lambda_d, mu_d = p.mu_d;

  auto upper = std::make_shared<FunctionObjective>(
      [=](const Vector& x, const Vector& y) {
        const double imbalance = y.sum() - demand;
        return kappa.dot(x) + beta.dot((x - y).cwiseAbs2()) + cost.dot(y) +
               lambda_d * imbalance * imbalance;
      },
      [=](const Vector& x, const Vector& y) -> Vector {
        return kappa + 2.0 * beta.cwiseProduct(x - y);
      },
      [=](const Vector& x, const Vector& y) -> Vector {
        return -2.0 * beta.cwiseProduct(x - y) + cost +
               Vector::Constant(4, 2.0 * lambda_d * (y.sum() - demand));
      });
  auto lower = std::make_shared<FunctionObjective>(
      [=](const Vector& x, const Vector& y) {
        const double imbalance = y.sum() - demand;
        return w.dot((y - cf.cwiseProduct(x)).cwiseAbs2()) + mu_d * imbalance * imbalance;
      },
      [=](const Vector& x, const Vector& y) -> Vector {
        return -2.0 * w.cwiseProduct(cf).cwiseProduct(y - cf.cwiseProduct(x));
      },
      [=](const Vector& x, const Vector& y) -> Vector {
        return 2.0 * w.cwiseProduct(y - cf.cwiseProduct(x)) +
               Vector::Constant(4, 2.0 * mu_d * (y.sum() - demand));
      });

  auto follower = FollowerSet::box(Vector::Zero(4), to_vector(p.y_hi));
  auto lipschitz = vertex_lipschitz(upper, follower);
  const double growth = w.minCoeff();
  return BilevelInstance("case2", std::move(upper), std::move(lower), case2_leader_set(p),
                         std::move(follower), std::move(lipschitz),
                         [growth](const Vector&) { return growth; });
}

Case2LowerClosedForm case2_lower_closed_form(const Case2Params& p, const Vector& x) {
  const Vector w = to_vector(p.w);
  const Vector target = to_vector(p.capacity_factor).cwiseProduct(x);
  const double inv_w = w.cwiseInverse().sum();
  const double total = (target.sum() + p.mu_d * p.demand * inv_w) / (1.0 + p.mu_d * inv_w);
  Case2LowerClosedForm out;
  out.y = target - (p.mu_d * (total - p.demand)) * w.cwiseInverse();
  const Vector hi = to_vector(p.y_hi);
  out.interior = (out.y.array() > 0.0).all() && (out.y.array() < hi.array()).all();
  return out;
}

double case2_calibrate_dispatch_cost(const Case2Params& base, const std::vector<Case2Reference>& rows,
                                     double eps, double k_lo, double k_hi) {
  const Vector var_cost = to_vector(base.var_cost);
  auto misfit = [&](double k) {
    Case2Params p = base;
    for (int i = 0; i < 4; ++i) p.dispatch_cost[i] = k * var_cost[i];
    const auto inst = case2_instance(p);
    double sse = 0.0;
    for (const auto& row : rows) {
      const auto rec = ambiguity_premium(inst, row.x, eps).record;
      sse += std::pow(rec.psi_o - row.psi_o, 2) + std::pow(rec.delta - row.delta, 2);
    }
    return sse;
  };
  // The misfit is a smooth, unimodal function of the scale on the bracket.
  constexpr double kGolden = 0.6180339887498949;
  double a = k_lo, b = k_hi;
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = misfit(c), fd = misfit(d);
  while (b - a > 1e-7) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = misfit(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = misfit(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace bilevel
