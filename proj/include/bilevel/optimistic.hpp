#pragma once

#include <iosfwd>
#include <vector>

#include "bilevel/instance.hpp"
#include "bilevel/tolerance.hpp"

namespace bilevel {

/// Iterate of the proximal alternating scheme.
struct ProximalState {
  Vector x, y;
  Vector v;            ///< exact lower response at x
  double lambda = 0.0; ///< coupling multiplier from the last subproblem
  double tau = 2.0;
  int iter = 0;
};

struct ProximalStep {
  Vector x, y;
  double lambda = 0.0;
  /// F + proximal terms at the returned point and at (x_k, y_k).
  double objective = 0.0;
  double objective_at_start = 0.0;
  /// Whether (x_k, y_k) itself satisfies the linearized coupling constraint.
  bool start_feasible = false;
};

/**
 * min F(x,y) + tau/2 |x - x_k|^2 + tau/2 |y - y_k|^2 over X x Y subject to
 * f(x,y) <= f(x_k,v_k) + grad_x f(x_k,v_k)^T (x - x_k) + eps.
 * Throws SolverError (with the state in the message) if the linearization
 * leaves no feasible point near (x_k, v_k).
 */
ProximalStep proximal_subproblem(const BilevelInstance& inst, const ProximalState& state, double eps,
                                 const ToleranceConfig& tol = {});

struct OptimisticTraceRow {
  int iter = 0;
  double step = 0.0;
  double r_ll = 0.0;
  double g_stat = 0.0;
  double upper = 0.0;          ///< F(x_k, y_k)
  double objective = 0.0;      ///< subproblem objective at the accepted point
  double objective_at_start = 0.0;
  bool start_feasible = false;
};

struct OptimisticRunReport {
  Vector x, y, v;
  double lambda = 0.0;
  int iterations = 0;
  double step = 0.0;
  double r_ll = 0.0;
  double g_stat = 0.0;
  StatusLabel status = StatusLabel::incumbent;
  std::vector<OptimisticTraceRow> trace;
};

/// Alternates proximal_subproblem with v <- solve_lower(x).y_star until
/// max(step, r_LL, g_stat) <= prox_tol or prox_max_iter.
OptimisticRunReport run_optimistic(const BilevelInstance& inst, double eps, const Vector& x0,
                                   const ToleranceConfig& tol = {});

/// Runs from the leader set center plus LHS starts; best by F at the final point.
std::vector<OptimisticRunReport> optimistic_multistart(const BilevelInstance& inst, double eps, int n_starts,
                                                       const ToleranceConfig& tol = {});

/// CSV with columns iter,step,r_ll,g_stat,F,objective.
void write_optimistic_trace(std::ostream& out, const OptimisticRunReport& report);

}  // namespace bilevel
