#include "bilevel/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bilevel/pessimistic.hpp"
#include "bilevel/rng.hpp"
#include "bilevel/solver_options.hpp"
#include "bilevel/spg.hpp"

namespace bilevel {

std::string_view to_string(PessimisticRoute route) {
  return route == PessimisticRoute::direct ? "direct" : "ni_penalty";
}

double normalized_ratio(double delta, double psi_o) { return delta / (1.0 + std::abs(psi_o)); }

double ll_residual(const BilevelInstance& inst, const Vector& x, const Vector& y, double eps, double phi) {
  return std::max(0.0, eval_lower(inst, x, y) - phi - eps);
}

PremiumResult ambiguity_premium(const BilevelInstance& inst, const Vector& x, double eps,
                                const DiagnosticOptions& options) {
  const auto& tol = options.tol;
  const auto lower = solve_lower(inst, x, tol);
  const auto opt = solve_eps_extremum(inst, x, eps, lower, Sense::min, tol);

  DiagnosticRecord rec;
  rec.x = x;
  rec.eps = eps;
  rec.phi = lower.phi;
  rec.psi_o = opt.value;
  rec.y_optimistic = opt.y;
  rec.r_ll = ll_residual(inst, x, opt.y, eps, lower.phi);

  bool converged = lower.status == SolveStatus::converged && opt.status == SolveStatus::converged;
  if (options.route == PessimisticRoute::direct) {
    const auto pes = solve_eps_extremum(inst, x, eps, lower, Sense::max, tol);
    rec.psi_p = pes.value;
    rec.y_pessimistic = pes.y;
    // Certificate: NI gap of (argmax, exact response) from independent solves.
    rec.ni_gap = ni_gap(inst, x, pes.y, lower.y_star, eps, tol);
    converged = converged && pes.status == SolveStatus::converged;
  } else {
    const auto pes = ni_penalized_eval(inst, x, eps, tol);
    rec.psi_p = pes.psi_p;
    rec.y_pessimistic = pes.y;
    rec.ni_gap = pes.ni_gap;
    converged = converged && pes.status == StatusLabel::converged;
  }
  converged = converged && rec.ni_gap <= tol.gap_tol;

  double delta = rec.psi_p - rec.psi_o;
  if (delta < 0.0 && delta >= -tol.clamp_tol) delta = 0.0;
  rec.delta = delta;
  rec.rho = normalized_ratio(delta, rec.psi_o);
  rec.status = converged ? StatusLabel::converged : StatusLabel::incumbent;
  return {delta, rec};
}

double fischer_burmeister(double a, double b) { return a + b - std::hypot(a, b); }

double fb_stationarity_residual(const BilevelInstance& inst, const Vector& x, const Vector& y,
                                const Vector& v, double lambda, double eps) {
  inst.require_gradients("fb_stationarity_residual");
  const auto& F = inst.upper();
  const auto& f = inst.lower();
  const auto& xs = inst.leader_set();
  const auto& ys = inst.follower_set();

  const Vector wx = F.gradient_x(x, y) + lambda * (f.gradient_x(x, y) - f.gradient_x(x, v));
  const Vector wy = F.gradient_y(x, y) + lambda * f.gradient_y(x, y);
  const Vector wv = f.gradient_y(x, v);

  const double rx = (x - xs.project(x - wx)).squaredNorm();
  const double ry = (y - ys.project(y - wy)).squaredNorm();
  const double rv = (v - ys.project(v - wv)).squaredNorm();
  const double comp = fischer_burmeister(lambda, -(f.value(x, y) - f.value(x, v) - eps));
  return std::sqrt(rx + ry + rv + comp * comp);
}

FittedMultiplier fit_multiplier(const BilevelInstance& inst, const Vector& x, const Vector& y,
                                const Vector& v, double eps) {
  auto residual = [&](double lambda) { return fb_stationarity_residual(inst, x, y, v, lambda, eps); };

  // Coarse log grid, then golden-section refinement around the best node.
  std::vector<double> grid{0.0};
  for (double e = -6.0; e <= 6.0; e += 0.25) grid.push_back(std::pow(10.0, e));
  std::size_t best = 0;
  double best_value = residual(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double r = residual(grid[i]);
    if (r < best_value) {
      best_value = r;
      best = i;
    }
  }
  double a = best == 0 ? 0.0 : grid[best - 1];
  double b = best + 1 < grid.size() ? grid[best + 1] : grid[best] * 2.0;
  constexpr double kGolden = 0.6180339887498949;
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = residual(c), fd = residual(d);
  for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, b); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = residual(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = residual(d);
    }
  }
  const double lambda = 0.5 * (a + b);
  const double r = residual(lambda);
  if (r < best_value) return {lambda, r};
  return {grid[best], best_value};
}

DiameterCheck diameter_bound_check(const BilevelInstance& inst, const Vector& x, double eps,
                                   int n_samples, const ToleranceConfig& tol) {
  if (!inst.lipschitz_upper()) {
    throw ConfigError("diameter_bound_check: instance has no Lipschitz evaluator");
  }
  const auto lower = solve_lower(inst, x, tol);
  const auto opt = solve_eps_extremum(inst, x, eps, lower, Sense::min, tol);
  const auto pes = solve_eps_extremum(inst, x, eps, lower, Sense::max, tol);

  DiameterCheck out;
  out.pool = {opt.y, pes.y};

  // Extreme points of S_eps in random directions: maximize u^T y over the set.
  const auto& f = inst.lower();
  const auto& ys = inst.follower_set();
  const double level = lower.phi + eps;
  const double slack = 1e-13 * std::max(1.0, std::abs(level));
  const SmoothFn constraint = [&](const Vector& y, Vector* g) {
    if (g) *g = f.gradient_y(x, y);
    return f.value(x, y) - level;
  };
  const ProjectFn project = [&](const Vector& y) { return ys.project(y); };
  auto engine = make_engine(tol.master_seed, StreamKey("diameter").mix(x).mix(eps));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < n_samples; ++s) {
    Vector u(inst.m());
    for (auto& c : u) c = normal(engine);
    const SmoothFn objective = [&](const Vector& y, Vector* g) {
      if (g) *g = -u;
      return -u.dot(y);
    };
    const auto run = minimize_penalized(objective, constraint, project, lower.y_star, penalty_options(tol));
    out.pool.push_back(restore_feasibility(constraint, run.z, lower.y_star, slack));
  }

  for (const auto& y : out.pool) out.pool_values.push_back(eval_upper(inst, x, y));
  for (std::size_t i = 0; i < out.pool.size(); ++i) {
    for (std::size_t j = i + 1; j < out.pool.size(); ++j) {
      out.diameter = std::max(out.diameter, (out.pool[i] - out.pool[j]).norm());
    }
  }
  out.delta = std::max(0.0, pes.value - opt.value);
  out.lipschitz = inst.lipschitz_upper()(x);
  out.bound = out.lipschitz * out.diameter;
  out.holds = out.delta <= out.bound + 1e-6;
  return out;
}

std::vector<SqrtRatePoint> sqrt_rate_scan(const BilevelInstance& inst, const Vector& x,
                                          const std::vector<double>& eps_grid,
                                          const DiagnosticOptions& options) {
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0) || (i > 0 && !(eps_grid[i] > eps_grid[i - 1]))) {
      throw ConfigError("sqrt_rate_scan: eps grid must be positive and strictly ascending");
    }
  }
  std::optional<double> lipschitz, growth;
  if (inst.lipschitz_upper()) lipschitz = inst.lipschitz_upper()(x);
  if (inst.growth_modulus()) growth = inst.growth_modulus()(x);

  std::vector<SqrtRatePoint> out;
  for (double eps : eps_grid) {
    SqrtRatePoint p;
    p.eps = eps;
    p.delta = ambiguity_premium(inst, x, eps, options).delta;
    p.ratio = p.delta / std::sqrt(eps);
    if (lipschitz && growth && *growth > 0.0) p.cap = 2.0 * *lipschitz * std::sqrt(eps / *growth);
    out.push_back(p);
  }
  return out;
}

}  // namespace bilevel
