#include "bilevel/optimistic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "bilevel/diagnostics.hpp"
#include "bilevel/lower_solver.hpp"
#include "bilevel/pessimistic.hpp"
#include "bilevel/solver_options.hpp"
#include "bilevel/spg.hpp"

namespace bilevel {

ProximalStep proximal_subproblem(const BilevelInstance& inst, const ProximalState& state, double eps,
                                 const ToleranceConfig& tol) {
  inst.require_gradients("proximal_subproblem");
  if (!(state.tau > 0.0)) throw ConfigError("proximal_subproblem: tau must be positive");
  const int n = inst.n(), m = inst.m();
  const auto& F = inst.upper();
  const auto& f = inst.lower();
  const Vector& xk = state.x;
  const Vector& yk = state.y;
  const double f_ref = f.value(xk, state.v);
  const Vector gx_ref = f.gradient_x(xk, state.v);
  const double tau = state.tau;

  auto split = [&](const Vector& z) { return std::pair<Vector, Vector>{z.head(n), z.tail(m)}; };
  const SmoothFn objective = [&](const Vector& z, Vector* grad) {
    const auto [x, y] = split(z);
    if (grad) {
      grad->resize(n + m);
      grad->head(n) = F.gradient_x(x, y) + tau * (x - xk);
      grad->tail(m) = F.gradient_y(x, y) + tau * (y - yk);
    }
    return F.value(x, y) + 0.5 * tau * ((x - xk).squaredNorm() + (y - yk).squaredNorm());
  };
  const SmoothFn coupling = [&](const Vector& z, Vector* grad) {
    const auto [x, y] = split(z);
    if (grad) {
      grad->resize(n + m);
      grad->head(n) = f.gradient_x(x, y) - gx_ref;
      grad->tail(m) = f.gradient_y(x, y);
    }
    return f.value(x, y) - f_ref - gx_ref.dot(x - xk) - eps;
  };
  const auto& xs = inst.leader_set();
  const auto& ys = inst.follower_set();
  const ProjectFn project = [&](const Vector& z) {
    Vector out(n + m);
    out.head(n) = xs.project(z.head(n), tol.projection_tol);
    out.tail(m) = ys.project(z.tail(m));
    return out;
  };

  Vector anchor(n + m), start(n + m);
  anchor << xk, state.v;
  start << xk, yk;
  const double slack = 1e-13 * std::max(1.0, std::abs(f_ref + eps));
  if (coupling(anchor, nullptr) > slack) {
    std::ostringstream msg;
    msg << "proximal_subproblem: linearized coupling infeasible at iteration " << state.iter
        << " (x_k = " << xk.transpose() << ", v_k = " << state.v.transpose() << ")";
    throw SolverError(msg.str());
  }

  ProximalStep out;
  out.objective_at_start = objective(start, nullptr);
  out.start_feasible = coupling(start, nullptr) <= slack;

  Vector best;
  double best_value = 0.0, best_lambda = 0.0;
  for (const Vector* z0 : {&start, &anchor}) {
    const auto run = minimize_penalized(objective, coupling, project, *z0, penalty_options(tol), state.lambda);
    const Vector z = restore_feasibility(coupling, run.z, anchor, slack);
    const double value = objective(z, nullptr);
    if (best.size() == 0 || improves(value, best_value)) {
      best = z;
      best_value = value;
      best_lambda = run.multiplier;
    }
  }
  // Never return a point worse than a feasible start.
  if (out.start_feasible && out.objective_at_start < best_value) {
    best = start;
    best_value = out.objective_at_start;
    best_lambda = state.lambda;
  }

  out.x = best.head(n);
  out.y = best.tail(m);
  out.lambda = std::max(0.0, best_lambda);
  out.objective = best_value;
  return out;
}

OptimisticRunReport run_optimistic(const BilevelInstance& inst, double eps, const Vector& x0,
                                   const ToleranceConfig& tol) {
  if (!inst.leader_set().contains(x0)) {
    throw InfeasibleInputError("run_optimistic: x0 is outside the leader set", inst.leader_set().project(x0));
  }
  const auto lower0 = solve_lower(inst, x0, tol);
  ProximalState state{x0, lower0.y_star, lower0.y_star, 0.0, tol.prox_tau, 0};

  OptimisticRunReport report;
  for (int k = 1; k <= tol.prox_max_iter; ++k) {
    const auto step = proximal_subproblem(inst, state, eps, tol);
    const auto lower = solve_lower(inst, step.x, tol);

    const double dz = std::sqrt((step.x - state.x).squaredNorm() + (step.y - state.y).squaredNorm());
    state = {step.x, step.y, lower.y_star, step.lambda, state.tau, k};

    OptimisticTraceRow row;
    row.iter = k;
    row.step = dz;
    row.r_ll = ll_residual(inst, state.x, state.y, eps, lower.phi);
    row.g_stat = fb_stationarity_residual(inst, state.x, state.y, state.v, state.lambda, eps);
    row.upper = eval_upper(inst, state.x, state.y);
    row.objective = step.objective;
    row.objective_at_start = step.objective_at_start;
    row.start_feasible = step.start_feasible;
    report.trace.push_back(row);

    report.iterations = k;
    report.step = row.step;
    report.r_ll = row.r_ll;
    report.g_stat = row.g_stat;
    if (std::max({row.step, row.r_ll, row.g_stat}) <= tol.prox_tol) {
      report.status = StatusLabel::converged;
      break;
    }
  }
  report.x = state.x;
  report.y = state.y;
  report.v = state.v;
  report.lambda = state.lambda;
  return report;
}

std::vector<OptimisticRunReport> optimistic_multistart(const BilevelInstance& inst, double eps, int n_starts,
                                                       const ToleranceConfig& tol) {
  std::vector<OptimisticRunReport> out;
  for (const auto& x0 : leader_starts(inst.leader_set(), n_starts, tol.master_seed, "optimistic")) {
    out.push_back(run_optimistic(inst, eps, x0, tol));
  }
  return out;
}

void write_optimistic_trace(std::ostream& out, const OptimisticRunReport& report) {
  out << "iter,step,r_ll,g_stat,F,objective\n";
  const auto precision = out.precision(10);
  for (const auto& row : report.trace) {
    out << row.iter << ',' << row.step << ',' << row.r_ll << ',' << row.g_stat << ',' << row.upper << ','
        << row.objective << '\n';
  }
  out.precision(precision);
}

}  // namespace bilevel
