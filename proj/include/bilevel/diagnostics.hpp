#pragma once

#include <optional>
#include <vector>

#include "bilevel/instance.hpp"
#include "bilevel/lower_solver.hpp"
#include "bilevel/tolerance.hpp"

namespace bilevel {

/// How psi^p is computed: a direct constrained maximization, or the
/// NI-gap penalized lower equilibrium.
enum class PessimisticRoute { direct, ni_penalty };

std::string_view to_string(PessimisticRoute route);

struct DiagnosticOptions {
  ToleranceConfig tol;
  PessimisticRoute route = PessimisticRoute::direct;
};

/// Per-decision diagnostics: value interval, premium, ratio, and residuals.
struct DiagnosticRecord {
  Vector x;
  double eps = 0.0;
  double psi_o = 0.0;
  double psi_p = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double r_ll = 0.0;                ///< at the reported optimistic response
  std::optional<double> g_stat;     ///< only when a stationarity triple was supplied
  bool multiplier_fitted = false;   ///< g_stat used a fitted, not solver-returned, multiplier
  double ni_gap = 0.0;              ///< achieved by the pessimistic evaluation
  StatusLabel status = StatusLabel::incumbent;

  Vector y_optimistic, y_pessimistic;
  double phi = 0.0;
};

struct PremiumResult {
  double delta = 0.0;
  DiagnosticRecord record;
};

/// Premium psi^p - psi^o at x, with the full record (g_stat left empty).
PremiumResult ambiguity_premium(const BilevelInstance& inst, const Vector& x, double eps,
                                const DiagnosticOptions& options = {});

/// delta / (1 + |psi_o|).
double normalized_ratio(double delta, double psi_o);

/// max{0, f(x, y) - phi - eps}.
double ll_residual(const BilevelInstance& inst, const Vector& x, const Vector& y, double eps, double phi);

/// Fischer-Burmeister function a + b - sqrt(a^2 + b^2).
double fischer_burmeister(double a, double b);

/**
 * First-order residual of the optimistic GNEP KKT system at (x, y, v) with
 * coupling multiplier lambda: natural residuals of the x, y and v blocks and
 * the FB-encoded complementarity of f(x,y) - f(x,v) - eps <= 0.
 */
double fb_stationarity_residual(const BilevelInstance& inst, const Vector& x, const Vector& y,
                                const Vector& v, double lambda, double eps);

struct FittedMultiplier {
  double lambda = 0.0;
  double residual = 0.0;
};

/// Nonnegative lambda minimizing fb_stationarity_residual; used only when
/// no solver multiplier is at hand.
FittedMultiplier fit_multiplier(const BilevelInstance& inst, const Vector& x, const Vector& y,
                                const Vector& v, double eps);

struct DiameterCheck {
  double delta = 0.0;
  double diameter = 0.0;   ///< max pairwise distance over the pool (lower bound on diam S_eps)
  double lipschitz = 0.0;  ///< L_F(x)
  double bound = 0.0;      ///< lipschitz * diameter
  bool holds = false;
  /// Sampled eps-feasible points, the optimistic and pessimistic responses first.
  std::vector<Vector> pool;
  std::vector<double> pool_values;  ///< F(x, .) on the pool
};

/// Requires a Lipschitz evaluator on the instance.
DiameterCheck diameter_bound_check(const BilevelInstance& inst, const Vector& x, double eps,
                                   int n_samples, const ToleranceConfig& tol = {});

struct SqrtRatePoint {
  double eps = 0.0;
  double delta = 0.0;
  double ratio = 0.0;            ///< delta / sqrt(eps)
  std::optional<double> cap;     ///< 2 L_F sqrt(eps / mu) when mu and L_F are known
};

/// Premium scan over a positive, strictly ascending eps grid.
std::vector<SqrtRatePoint> sqrt_rate_scan(const BilevelInstance& inst, const Vector& x,
                                          const std::vector<double>& eps_grid,
                                          const DiagnosticOptions& options = {});

}  // namespace bilevel
