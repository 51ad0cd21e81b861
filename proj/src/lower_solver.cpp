#include "bilevel/lower_solver.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "bilevel/rng.hpp"
#include "bilevel/solver_options.hpp"
#include "bilevel/spg.hpp"

namespace bilevel {

std::string_view to_string(SolveStatus status) {
  return status == SolveStatus::converged ? "converged" : "incumbent";
}

SpgOptions spg_options(const ToleranceConfig& tol) {
  SpgOptions o;
  o.grad_tol = tol.pg_grad_tol;
  o.max_iter = tol.pg_max_iter;
  return o;
}

PenaltyOptions penalty_options(const ToleranceConfig& tol) {
  PenaltyOptions o;
  o.inner = spg_options(tol);
  o.penalty_start = tol.penalty_start;
  o.penalty_factor = tol.penalty_factor;
  o.penalty_max = tol.penalty_max;
  o.max_rounds = tol.penalty_max_rounds;
  o.feas_tol = tol.feas_tol;
  return o;
}

bool improves(double candidate, double incumbent) {
  return candidate < incumbent - 1e-12 * (1.0 + std::abs(incumbent));
}

std::vector<Vector> follower_starts(const FollowerSet& set, int count, std::uint64_t seed,
                                    const StreamKey& key) {
  std::vector<Vector> starts;
  if (count <= 0) return starts;
  starts.push_back(set.center());
  auto engine = make_engine(seed, key);
  for (auto& p : latin_hypercube(set.lo(), set.hi(), count - 1, engine)) starts.push_back(set.project(p));
  return starts;
}

LowerSolution solve_lower(const BilevelInstance& inst, const Vector& x, const ToleranceConfig& tol) {
  inst.require_gradients("solve_lower");
  const auto& lower = inst.lower();
  const auto& ys = inst.follower_set();
  const SmoothFn objective = [&](const Vector& y, Vector* grad) {
    if (grad) *grad = lower.gradient_y(x, y);
    return lower.value(x, y);
  };
  const ProjectFn project = [&](const Vector& y) { return ys.project(y); };

  const auto starts = follower_starts(ys, std::max(1, tol.lower_starts), tol.master_seed,
                                      StreamKey("lower").mix(x));
  std::optional<LowerSolution> best;
  for (const auto& y0 : starts) {
    SpgResult run;
    try {
      run = minimize_spg(objective, project, y0, spg_options(tol));
    } catch (const SolverError&) {
      continue;
    }
    if (!std::isfinite(run.value)) continue;
    if (!best || improves(run.value, best->phi)) {
      best = LowerSolution{run.value, run.z, run.pg_norm,
                           run.pg_norm <= 1e-8 ? SolveStatus::converged : SolveStatus::incumbent};
    }
  }
  if (!best) throw SolverError("solve_lower: every start failed");
  best->phi = eval_lower(inst, x, best->y_star);
  return *best;
}

EpsExtremum solve_level_extremum(const BilevelInstance& inst, const Vector& x, double level,
                                 const Vector& anchor, Sense sense, const ToleranceConfig& tol,
                                 int starts) {
  inst.require_gradients("solve_level_extremum");
  const auto& upper = inst.upper();
  const auto& lower = inst.lower();
  const auto& ys = inst.follower_set();
  const double sign = sense == Sense::min ? 1.0 : -1.0;

  const SmoothFn objective = [&](const Vector& y, Vector* grad) {
    if (grad) *grad = sign * upper.gradient_y(x, y);
    return sign * upper.value(x, y);
  };
  const SmoothFn constraint = [&](const Vector& y, Vector* grad) {
    if (grad) *grad = lower.gradient_y(x, y);
    return lower.value(x, y) - level;
  };
  const ProjectFn project = [&](const Vector& y) { return ys.project(y); };

  // Rounding-level slack: level sets of f that are flat up to a few ulps
  // (e.g. indifference points of linear followers) must not collapse.
  const double slack = 1e-13 * std::max(1.0, std::abs(level));
  if (constraint(anchor, nullptr) > slack) {
    throw SolverError("solve_level_extremum: anchor violates the level constraint (inconsistent phi)");
  }

  const int count = starts > 0 ? starts : std::max(1, tol.extremum_starts);
  std::vector<Vector> initial{anchor};
  for (auto& p : follower_starts(ys, count - 1, tol.master_seed,
                                 StreamKey("extremum").mix(x).mix(level).mix(std::uint64_t(sense == Sense::max)))) {
    initial.push_back(std::move(p));
  }

  const auto options = penalty_options(tol);
  std::optional<EpsExtremum> best;
  double best_score = std::numeric_limits<double>::infinity();
  for (const auto& y0 : initial) {
    PenaltyResult run;
    try {
      run = minimize_penalized(objective, constraint, project, y0, options);
    } catch (const SolverError&) {
      continue;
    }
    const Vector y = restore_feasibility(constraint, run.z, anchor, slack);
    const double score = objective(y, nullptr);
    if (!std::isfinite(score)) continue;
    if (!best || improves(score, best_score)) {
      best_score = score;
      best = EpsExtremum{sign * score, y, sense, -constraint(y, nullptr), run.multiplier,
                         run.converged ? SolveStatus::converged : SolveStatus::incumbent};
    }
  }
  if (!best) throw SolverError("solve_level_extremum: no feasible point found");
  best->value = eval_upper(inst, x, best->y);
  return *best;
}

EpsExtremum solve_eps_extremum(const BilevelInstance& inst, const Vector& x, double eps,
                               const LowerSolution& lower, Sense sense, const ToleranceConfig& tol) {
  if (!(eps >= 0.0)) throw ConfigError("solve_eps_extremum: eps must be nonnegative");
  return solve_level_extremum(inst, x, lower.phi + eps, lower.y_star, sense, tol);
}

}  // namespace bilevel
