#pragma once

#include <functional>
#include <optional>

#include "bilevel/core.hpp"

namespace bilevel {

/// Value-and-gradient oracle; writes the gradient when `grad` is non-null.
using SmoothFn = std::function<double(const Vector& z, Vector* grad)>;
/// In-place Euclidean projection onto a closed convex set.
using ProjectFn = std::function<Vector(const Vector& z)>;

struct SpgOptions {
  double grad_tol = 1e-10;
  int max_iter = 2000;
  int memory = 10;
  double step_min = 1e-12;
  double step_max = 1e12;
};

struct SpgResult {
  Vector z;
  double value = 0.0;
  /// Infinity norm of P(z - grad) - z.
  double pg_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/**
 * Spectral projected gradient with nonmonotone backtracking
 * (Birgin-Martinez-Raydan). Minimizes `objective` over the set described by
 * `project`.
 */
SpgResult minimize_spg(const SmoothFn& objective, const ProjectFn& project, const Vector& z0,
                       const SpgOptions& options = {});

struct PenaltyOptions {
  SpgOptions inner;
  double penalty_start = 10.0;
  double penalty_factor = 10.0;
  double penalty_max = 1e6;
  int max_rounds = 40;
  double feas_tol = 1e-8;
  /// Minimal violation decrease per round before the penalty is escalated.
  double decrease = 0.25;
  /// Projected-gradient norm accepted at the final round when the inner
  /// solve stalls at rounding level before reaching inner.grad_tol.
  double stationarity_tol = 1e-7;
  /// Relative multiplier change below which the augmented Lagrangian stops.
  double multiplier_tol = 1e-6;
};

struct PenaltyResult {
  Vector z;
  double value = 0.0;          ///< objective (without penalty) at z
  double constraint = 0.0;     ///< g(z); feasible when <= 0
  double multiplier = 0.0;     ///< estimate of the multiplier of g <= 0
  double penalty = 0.0;        ///< final penalty weight
  double pg_norm = 0.0;
  int rounds = 0;
  bool converged = false;      ///< stationary to stationarity_tol with g(z) <= feas_tol
};

/**
 * Minimizes objective(z) over {z in set : g(z) <= 0} with an exterior
 * quadratic penalty carrying a multiplier shift (augmented Lagrangian).
 * The penalty starts at penalty_start and grows by penalty_factor, up to
 * penalty_max, whenever the violation does not shrink fast enough.
 */
PenaltyResult minimize_penalized(const SmoothFn& objective, const SmoothFn& constraint,
                                 const ProjectFn& project, const Vector& z0,
                                 const PenaltyOptions& options = {},
                                 double initial_multiplier = 0.0);

/**
 * Moves `z` toward `anchor` (which must satisfy g(anchor) <= slack) along the
 * segment between them until g <= slack holds. Returns z unchanged when it is
 * already within slack.
 */
Vector restore_feasibility(const SmoothFn& constraint, const Vector& z, const Vector& anchor,
                           double slack = 0.0);

}  // namespace bilevel
