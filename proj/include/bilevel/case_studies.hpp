#pragma once

#include <array>
#include <optional>
#include <string>

#include "bilevel/instance.hpp"

namespace bilevel {

// ---------------------------------------------------------------------------
// Parallel-link toll pricing: two links, unit demand, linear follower cost.

struct Case1Params {
  std::array<double, 2> a{1.0, 1.2};  ///< access costs
  std::array<double, 2> c{1.5, 1.0};  ///< congestion weights
  double alpha = 0.3;                 ///< toll revenue weight
  double beta = 0.05;                 ///< toll magnitude penalty
  double x_lo = 0.0, x_hi = 2.0;      ///< X = [x_lo, x_hi]^2
};

/// Which part of the simplex is follower-optimal at a given toll vector.
enum class Case1Response { link1, link2, full_simplex };

/// Links with generalized costs within this band are treated as tied.
inline constexpr double kIndifferenceTol = 1e-12;

BilevelInstance case1_instance(const Case1Params& params = {});

/// (a2 + x2) - (a1 + x1): positive when link 1 is cheaper.
double case1_cost_gap(const Case1Params& params, const Vector& x);

Case1Response case1_exact_response_set(const Case1Params& params, const Vector& x);

/**
 * The eps-optimal responses as a segment of flow shifted off the cheaper
 * link: y = v + s (w - v), s in [0, s_max], where v is the cheaper link's
 * vertex and w the other one. On the indifference line s_max = 1.
 */
struct Case1Segment {
  Vector anchor;  ///< cheaper link's vertex (or (1,0) on the line)
  Vector other;
  double s_max = 0.0;
};

Case1Segment case1_eps_response_set(const Case1Params& params, const Vector& x, double eps);

struct Case1Diagnostics {
  double psi_o = 0.0;
  double psi_p = 0.0;
  double delta = 0.0;
  /// Share on link 1 of the unconstrained minimizer of F along the simplex, clipped to [0,1].
  double t_star = 0.0;
  Vector y_opt, y_pes;
};

/// Closed-form psi^o, psi^p and the premium from the quadratic in t = y1.
Case1Diagnostics case1_analytic_diagnostics(const Case1Params& params, const Vector& x, double eps);

// ---------------------------------------------------------------------------
// Generation-capacity planning with diversification constraints.

struct Case2Params {
  std::array<double, 4> kappa{0.1025, 0.1255, 0.0822, 0.1070};   ///< annualized capital, $B/GW-yr
  std::array<double, 4> var_cost{5.0, 7.0, 28.6, 8.2};           ///< $/MWh
  std::array<double, 4> capacity_factor{0.246, 0.345, 0.870, 0.200};
  std::array<double, 4> w{3.0, 2.5, 1.0, 2.0};
  double mu_d = 2.0;
  double demand = 5.0;
  std::array<double, 4> beta{0.15, 0.12, 0.05, 0.08};
  /// Dispatch-cost coefficients c~ in $B/GW-yr; see case2_calibrate_dispatch_cost().
  std::array<double, 4> dispatch_cost{0.0050, 0.0070, 0.0286, 0.0082};
  double lambda_d = 1.5;
  std::array<double, 4> x_lo{0.2, 0.2, 0.5, 0.1};
  std::array<double, 4> x_hi{8.0, 6.0, 10.0, 4.0};
  std::array<double, 4> y_hi{6.0, 5.0, 9.0, 3.5};
  double share_cap = 0.6;
  std::array<double, 4> min_build{0.2, 0.2, 0.5, 0.1};
};

/// Leader set: box (with min builds) and sum x >= D, x_i <= cap * sum x.
LeaderSet case2_leader_set(const Case2Params& params);

BilevelInstance case2_instance(const Case2Params& params = {});

struct Case2LowerClosedForm {
  Vector y;
  bool interior = false;  ///< false: the unconstrained stationary point leaves Y
};

/// Stationary point of f(x, .) from its aggregate linear system.
Case2LowerClosedForm case2_lower_closed_form(const Case2Params& params, const Vector& x);

/**
 * Fits c~ = k * var_cost by one-dimensional least squares so that the
 * computed (psi^o, premium) at each reference policy match the targets.
 * Returns the fitted scale k.
 */
struct Case2Reference {
  Vector x;
  double psi_o = 0.0;
  double delta = 0.0;
};

double case2_calibrate_dispatch_cost(const Case2Params& base, const std::vector<Case2Reference>& rows,
                                     double eps, double k_lo = 0.0, double k_hi = 0.01);

}  // namespace bilevel
