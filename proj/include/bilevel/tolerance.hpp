#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bilevel {

/**
 * Every numerical tolerance, budget, and schedule used by the solvers.
 *
 * Defaults reproduce the reference settings of both case studies. Values can
 * be overridden from a `[tolerances]` table in an instance file or from a
 * standalone TOML/JSON config (see load_tolerances()).
 */
struct ToleranceConfig {
  // Projected-gradient kernel.
  double pg_grad_tol = 1e-10;
  int pg_max_iter = 2000;

  // Exterior (augmented-Lagrangian) penalty schedule.
  double penalty_start = 10.0;
  double penalty_factor = 10.0;
  double penalty_max = 1e6;
  int penalty_max_rounds = 40;
  double feas_tol = 1e-8;

  // Multistart.
  int lower_starts = 5;
  int extremum_starts = 8;
  std::uint64_t master_seed = 7;

  // Optimistic proximal scheme.
  double prox_tau = 2.0;
  int prox_max_iter = 120;
  double prox_tol = 1e-6;

  // Pessimistic NI-gap penalization.
  std::vector<double> sigmas{10.0, 100.0, 1000.0, 10000.0};
  int ni_starts = 5;
  double gap_tol = 1e-6;
  int ni_max_iter = 60;

  // Diagnostics / frontier.
  int diam_samples = 64;
  double clamp_tol = 1e-9;
  double dominance_tol = 1e-9;
  double projection_tol = 1e-10;
};

/// Reads a TOML or JSON file (by extension) holding ToleranceConfig keys at top level
/// or under a `tolerances` table. Unknown keys are rejected.
ToleranceConfig load_tolerances(const std::string& path);

}  // namespace bilevel
