#pragma once

#include <functional>

#include "bilevel/core.hpp"
#include "bilevel/sets.hpp"

namespace bilevel {

struct NelderMeadOptions {
  int max_fevals = 400;
  /// Initial simplex edge as a fraction of each box width.
  double initial_step = 0.1;
  /// Stop when the simplex diameter falls below this.
  double x_tol = 1e-6;
  /// ...and the value spread across vertices below this.
  double f_tol = 1e-10;
};

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int fevals = 0;
  double simplex_diameter = 0.0;
  bool converged = false;
};

/**
 * Nelder-Mead restricted to a leader set. Trial points are projected onto the
 * set; the objective is evaluated at the projection and penalized by
 * (1 + |value|) * dist^2 so the simplex is pulled back inside.
 */
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& objective, const LeaderSet& set,
                             const Vector& x0, const NelderMeadOptions& options = {});

}  // namespace bilevel
