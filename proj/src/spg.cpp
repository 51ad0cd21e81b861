#include "bilevel/spg.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace bilevel {

namespace {

double projected_gradient_norm(const ProjectFn& project, const Vector& z, const Vector& g) {
  return (project(z - g) - z).lpNorm<Eigen::Infinity>();
}

}  // namespace

SpgResult minimize_spg(const SmoothFn& objective, const ProjectFn& project, const Vector& z0,
                       const SpgOptions& options) {
  constexpr double kArmijo = 1e-4;

  Vector z = project(z0);
  Vector g(z.size());
  double f = objective(z, &g);
  if (!std::isfinite(f)) throw SolverError("projected gradient: non-finite objective at start");

  SpgResult best{z, f, projected_gradient_norm(project, z, g), 0, false};
  double pg = best.pg_norm;
  if (pg <= options.grad_tol) {
    best.converged = true;
    return best;
  }

  double alpha = std::clamp(1.0 / pg, options.step_min, options.step_max);
  std::deque<double> history{f};
  Vector zn(z.size()), gn(z.size());

  int k = 0;
  for (; k < options.max_iter; ++k) {
    const Vector d = project(z - alpha * g) - z;
    const double gtd = g.dot(d);
    if (!(gtd < 0.0)) break;
    const double reference = *std::max_element(history.begin(), history.end());

    double lambda = 1.0;
    double fn = 0.0;
    bool accepted = false;
    while (lambda > 1e-18) {
      zn = z + lambda * d;
      fn = objective(zn, &gn);
      if (std::isfinite(fn) && fn <= reference + kArmijo * lambda * gtd) {
        accepted = true;
        break;
      }
      const double denom = fn - f - lambda * gtd;
      double trial = std::isfinite(fn) && denom > 0.0 ? -0.5 * lambda * lambda * gtd / denom : -1.0;
      lambda = (trial >= 0.1 * lambda && trial <= 0.9 * lambda) ? trial : 0.5 * lambda;
    }
    if (!accepted) break;

    const Vector s = zn - z;
    const Vector yv = gn - g;
    const double sty = s.dot(yv);
    alpha = sty > 0.0 ? std::clamp(s.squaredNorm() / sty, options.step_min, options.step_max)
                      : options.step_max;

    z = zn;
    g = gn;
    f = fn;
    history.push_back(f);
    if (static_cast<int>(history.size()) > options.memory) history.pop_front();

    pg = projected_gradient_norm(project, z, g);
    if (f <= best.value) best = {z, f, pg, k + 1, false};
    if (pg <= options.grad_tol) {
      best = {z, f, pg, k + 1, true};
      return best;
    }
  }

  best.iterations = k;
  best.converged = best.pg_norm <= options.grad_tol;
  return best;
}

PenaltyResult minimize_penalized(const SmoothFn& objective, const SmoothFn& constraint,
                                 const ProjectFn& project, const Vector& z0,
                                 const PenaltyOptions& options, double initial_multiplier) {
  double mu = std::max(0.0, initial_multiplier);
  double rho = options.penalty_start;
  double previous_violation = std::numeric_limits<double>::infinity();

  PenaltyResult out;
  out.z = project(z0);

  for (int round = 0; round < options.max_rounds; ++round) {
    const double mu_now = mu;
    const double rho_now = rho;
    const SmoothFn augmented = [&](const Vector& z, Vector* grad) {
      Vector gf, gc;
      const double fv = objective(z, grad ? &gf : nullptr);
      const double cv = constraint(z, grad ? &gc : nullptr);
      const double shifted = std::max(0.0, mu_now + rho_now * cv);
      if (grad) *grad = gf + shifted * gc;
      return fv + (shifted * shifted - mu_now * mu_now) / (2.0 * rho_now);
    };
    const SpgResult inner = minimize_spg(augmented, project, out.z, options.inner);

    out.z = inner.z;
    out.constraint = constraint(out.z, nullptr);
    out.value = objective(out.z, nullptr);
    out.pg_norm = inner.pg_norm;
    out.rounds = round + 1;

    const double violation = std::max(0.0, out.constraint);
    const double mu_next = std::max(0.0, mu + rho * out.constraint);
    const bool multiplier_settled = std::abs(mu_next - mu) <= options.multiplier_tol * std::max(1.0, mu);
    mu = mu_next;
    out.multiplier = mu;
    out.penalty = rho;

    if (violation <= options.feas_tol && multiplier_settled && inner.pg_norm <= options.stationarity_tol) {
      out.converged = true;
      return out;
    }
    if (violation > options.feas_tol && violation > options.decrease * previous_violation) {
      rho = std::min(rho * options.penalty_factor, options.penalty_max);
    }
    previous_violation = violation;
  }
  out.converged = false;
  return out;
}

Vector restore_feasibility(const SmoothFn& constraint, const Vector& z, const Vector& anchor,
                           double slack) {
  if (constraint(z, nullptr) <= slack) return z;
  double feasible = 0.0, infeasible = 1.0;
  for (int i = 0; i < 100 && infeasible - feasible > 1e-16; ++i) {
    const double mid = 0.5 * (feasible + infeasible);
    if (constraint(anchor + mid * (z - anchor), nullptr) <= slack) {
      feasible = mid;
    } else {
      infeasible = mid;
    }
  }
  return anchor + feasible * (z - anchor);
}

}  // namespace bilevel
