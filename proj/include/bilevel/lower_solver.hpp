#pragma once

#include "bilevel/instance.hpp"
#include "bilevel/tolerance.hpp"

namespace bilevel {

enum class SolveStatus { converged, incumbent };
enum class Sense { min, max };

std::string_view to_string(SolveStatus status);

/// phi(x) = min_Y f(x, .) and one minimizer.
struct LowerSolution {
  double phi = 0.0;
  Vector y_star;
  /// |y - P_Y(y - grad_y f)|_inf at y_star.
  double kkt_residual = 0.0;
  SolveStatus status = SolveStatus::incumbent;
};

/// Extremum of F(x, .) over the sublevel set {y in Y : f(x, y) <= level}.
struct EpsExtremum {
  double value = 0.0;
  Vector y;
  Sense sense = Sense::min;
  /// level - f(x, y); at least -1e-13 max(1, |level|) (rounding slack).
  double feasibility_slack = 0.0;
  /// Multiplier of f(x, y) <= level at y.
  double multiplier = 0.0;
  SolveStatus status = SolveStatus::incumbent;
};

/**
 * Multistart projected-gradient solve of min_{y in Y} f(x, y).
 * Starts: center of Y then Latin-hypercube points, all from a stream derived
 * from x. The lowest value wins; ties keep the earliest start.
 */
LowerSolution solve_lower(const BilevelInstance& inst, const Vector& x,
                          const ToleranceConfig& tol = {});

/**
 * Optimizes F(x, .) over {y in Y : f(x, y) <= level} (min or max).
 *
 * `anchor` must satisfy f(x, anchor) <= level; it is the first start and the
 * point toward which penalty solutions are pulled when they end slightly
 * infeasible. Returned points are feasible up to the rounding slack above.
 */
EpsExtremum solve_level_extremum(const BilevelInstance& inst, const Vector& x, double level,
                                 const Vector& anchor, Sense sense, const ToleranceConfig& tol = {},
                                 int starts = -1);

/// psi^o (Sense::min) or psi^p (Sense::max) at tolerance eps, given the lower solution.
EpsExtremum solve_eps_extremum(const BilevelInstance& inst, const Vector& x, double eps,
                               const LowerSolution& lower, Sense sense,
                               const ToleranceConfig& tol = {});

}  // namespace bilevel
