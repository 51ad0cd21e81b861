#include "bilevel/pessimistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bilevel/lower_solver.hpp"
#include "bilevel/rng.hpp"
#include "bilevel/solver_options.hpp"
#include "bilevel/spg.hpp"

namespace bilevel {

std::vector<Vector> leader_starts(const LeaderSet& set, int count, std::uint64_t seed,
                                  std::string_view purpose) {
  std::vector<Vector> starts;
  if (count <= 0) return starts;
  starts.push_back(set.center());
  auto engine = make_engine(seed, StreamKey(purpose).mix(static_cast<std::uint64_t>(count)));
  for (auto& p : latin_hypercube(set.lo(), set.hi(), count - 1, engine)) starts.push_back(set.project(p));
  return starts;
}

NiGapTerms ni_gap_terms(const BilevelInstance& inst, const Vector& x, const Vector& y, const Vector& v,
                        double eps, const ToleranceConfig& tol) {
  const double phi = solve_lower(inst, x, tol).phi;
  const double f_v = eval_lower(inst, x, v);
  const double level = f_v + eps;
  const double slack = 1e-13 * std::max(1.0, std::abs(level));
  const double violation = std::max(0.0, eval_lower(inst, x, y) - level - slack);
  const bool admissible = violation == 0.0;
  const auto sup = solve_level_extremum(inst, x, level, admissible ? y : v, Sense::max, tol);
  const double f_upper = eval_upper(inst, x, y);

  NiGapTerms out;
  out.y_hat = sup.y;
  double best = sup.value;
  if (admissible && f_upper > best) {
    best = f_upper;
    out.y_hat = y;
  }
  out.worst_case = best - f_upper;
  out.suboptimality = f_v - phi;
  out.coupling_violation = violation;
  // An inadmissible y is scored by how far it is from an equilibrium, never below zero.
  const double total = admissible ? out.worst_case + out.suboptimality
                                  : std::abs(out.worst_case) + std::max(0.0, out.suboptimality) + violation;
  out.total = std::max(0.0, total);
  return out;
}

double ni_gap(const BilevelInstance& inst, const Vector& x, const Vector& y, const Vector& v, double eps,
              const ToleranceConfig& tol) {
  return ni_gap_terms(inst, x, y, v, eps, tol).total;
}

namespace {

struct PairState {
  Vector y, v;
};

// One penalized solve at fixed sigma, warm-started from `start`.
PairState penalized_step(const BilevelInstance& inst, const Vector& x, double eps, double phi, double sigma,
                         const PairState& start, const ToleranceConfig& tol) {
  const auto m = inst.m();
  const auto& upper = inst.upper();
  const auto& lower = inst.lower();
  const auto& ys = inst.follower_set();

  auto penalty = penalty_options(tol);
  penalty.inner.max_iter = tol.ni_max_iter;
  penalty.max_rounds = std::min(tol.penalty_max_rounds, 3);
  // Nested suprema are solved from the previous maximizer with a short budget.
  ToleranceConfig inner_tol = tol;
  inner_tol.pg_max_iter = std::min(tol.pg_max_iter, 100);
  auto inner_penalty = penalty_options(inner_tol);
  inner_penalty.max_rounds = std::min(tol.penalty_max_rounds, 6);

  Vector cached_hat = start.y;
  auto worst_case_value = [&](const Vector& y, const Vector& v, double& multiplier) {
    const double level = lower.value(x, v) + eps;
    const SmoothFn obj = [&](const Vector& h, Vector* g) {
      if (g) *g = -upper.gradient_y(x, h);
      return -upper.value(x, h);
    };
    const SmoothFn con = [&](const Vector& h, Vector* g) {
      if (g) *g = lower.gradient_y(x, h);
      return lower.value(x, h) - level;
    };
    const ProjectFn proj = [&](const Vector& h) { return ys.project(h); };
    const double slack = 1e-13 * std::max(1.0, std::abs(level));
    const auto run = minimize_penalized(obj, con, proj, cached_hat, inner_penalty);
    const Vector h = restore_feasibility(con, run.z, v, slack);
    double best = upper.value(x, h);
    multiplier = run.multiplier;
    cached_hat = h;
    // y itself is admissible whenever f(x, y) <= level.
    if (lower.value(x, y) <= level && upper.value(x, y) > best) {
      best = upper.value(x, y);
      cached_hat = y;
    }
    return best;
  };

  const SmoothFn objective = [&](const Vector& z, Vector* grad) {
    const Vector y = z.head(m), v = z.tail(m);
    double mu_hat = 0.0;
    const double f_y = upper.value(x, y);
    const double gap = worst_case_value(y, v, mu_hat) - f_y + lower.value(x, v) - phi;
    if (grad) {
      grad->resize(2 * m);
      const Vector gy = upper.gradient_y(x, y);
      if (gap > 0.0) {
        grad->head(m) = -(1.0 + sigma) * gy;
        grad->tail(m) = sigma * (mu_hat + 1.0) * lower.gradient_y(x, v);
      } else {
        grad->head(m) = -gy;
        grad->tail(m).setZero();
      }
    }
    return -f_y + sigma * std::max(0.0, gap);
  };
  const SmoothFn coupling = [&](const Vector& z, Vector* grad) {
    const Vector y = z.head(m), v = z.tail(m);
    if (grad) {
      grad->resize(2 * m);
      grad->head(m) = lower.gradient_y(x, y);
      grad->tail(m) = -lower.gradient_y(x, v);
    }
    return lower.value(x, y) - lower.value(x, v) - eps;
  };
  const ProjectFn project = [&](const Vector& z) {
    Vector out(2 * m);
    out.head(m) = ys.project(z.head(m));
    out.tail(m) = ys.project(z.tail(m));
    return out;
  };

  Vector z0(2 * m);
  z0 << start.y, start.v;
  const auto run = minimize_penalized(objective, coupling, project, z0, penalty);
  PairState out{run.z.head(m), run.z.tail(m)};
  // Player 1 must end inside its own feasible set; y = v is always admissible.
  const SmoothFn own = [&](const Vector& y, Vector*) {
    return lower.value(x, y) - lower.value(x, out.v) - eps;
  };
  const double slack = 1e-13 * std::max(1.0, std::abs(lower.value(x, out.v) + eps));
  out.y = restore_feasibility(own, out.y, out.v, slack);
  return out;
}

}  // namespace

PessimisticEval ni_penalized_eval(const BilevelInstance& inst, const Vector& x, double eps,
                                  const ToleranceConfig& tol, int n_starts) {
  inst.require_gradients("ni_penalized_eval");
  if (!(eps >= 0.0)) throw ConfigError("ni_penalized_eval: eps must be nonnegative");
  const auto& ys = inst.follower_set();
  const auto lower = solve_lower(inst, x, tol);
  const int count = n_starts > 0 ? n_starts : std::max(1, tol.ni_starts);

  // Start pairs: the lower solution for both players, then LHS pairs in Y x Y.
  std::vector<PairState> starts{{lower.y_star, lower.y_star}};
  {
    const auto m = inst.m();
    Vector lo(2 * m), hi(2 * m);
    lo << ys.lo(), ys.lo();
    hi << ys.hi(), ys.hi();
    auto engine = make_engine(tol.master_seed, StreamKey("ni-starts").mix(x).mix(eps));
    for (const auto& p : latin_hypercube(lo, hi, count - 1, engine)) {
      starts.push_back({ys.project(p.head(m)), ys.project(p.tail(m))});
    }
  }

  PessimisticEval out;
  out.x = x;
  bool have_best = false;
  double best_gap = 0.0, best_upper = 0.0;

  for (int s = 0; s < static_cast<int>(starts.size()); ++s) {
    PairState state = starts[s];
    {
      const SmoothFn own = [&](const Vector& y, Vector*) {
        return eval_lower(inst, x, y) - eval_lower(inst, x, state.v) - eps;
      };
      state.y = restore_feasibility(own, state.y, state.v);
    }
    PessimisticStartTrace trace;
    trace.index = s;
    trace.y0 = state.y;
    trace.v0 = state.v;

    double gap = ni_gap(inst, x, state.y, state.v, eps, tol);
    double sigma_used = 0.0;
    for (double sigma : tol.sigmas) {
      PairState next;
      try {
        next = penalized_step(inst, x, eps, lower.phi, sigma, state, tol);
      } catch (const SolverError&) {
        break;
      }
      double next_gap = ni_gap(inst, x, next.y, next.v, eps, tol);
      // Best-response sweep: v to the lower minimizer, then y to the worst case at that v.
      if (next_gap > tol.gap_tol) {
        const auto sweep = ni_gap_terms(inst, x, next.y, lower.y_star, eps, tol);
        const double polished = ni_gap(inst, x, sweep.y_hat, lower.y_star, eps, tol);
        if (polished < next_gap) {
          next = {sweep.y_hat, lower.y_star};
          next_gap = polished;
        }
      }
      // Warm-started chains never accept a larger gap than they started from.
      if (next_gap <= gap + 1e-12) {
        state = next;
        gap = next_gap;
      }
      sigma_used = sigma;
      trace.chain.push_back({sigma, gap, eval_upper(inst, x, state.y)});
      if (gap <= tol.gap_tol) break;
    }

    trace.final_gap = gap;
    trace.final_upper = eval_upper(inst, x, state.y);
    trace.status = gap <= tol.gap_tol ? StatusLabel::converged : StatusLabel::incumbent;

    const bool feasible = gap <= tol.gap_tol;
    bool better = false;
    if (!have_best) {
      better = true;
    } else if (feasible != (best_gap <= tol.gap_tol)) {
      better = feasible;
    } else if (feasible) {
      better = improves(-trace.final_upper, -best_upper);
    } else {
      better = gap < best_gap - 1e-12 || (std::abs(gap - best_gap) <= 1e-12 && trace.final_upper > best_upper);
    }
    if (better) {
      have_best = true;
      best_gap = gap;
      best_upper = trace.final_upper;
      out.psi_p = trace.final_upper;
      out.y = state.y;
      out.v = state.v;
      out.ni_gap = gap;
      out.sigma_final = sigma_used;
      out.status = trace.status;
    }
    out.trace.push_back(std::move(trace));
  }
  out.starts_used = static_cast<int>(starts.size());
  return out;
}

OuterSearchResult outer_pessimistic_search(const BilevelInstance& inst, double eps,
                                           const OuterSearchConfig& config, const ToleranceConfig& tol) {
  const auto& set = inst.leader_set();
  auto psi_p = [&](const Vector& x) {
    if (config.route == PessimisticRoute::ni_penalty) return ni_penalized_eval(inst, x, eps, tol).psi_p;
    const auto lower = solve_lower(inst, x, tol);
    return solve_eps_extremum(inst, x, eps, lower, Sense::max, tol).value;
  };

  OuterSearchResult out;
  auto options = config.nelder_mead;
  options.max_fevals = config.max_fevals;
  double best = std::numeric_limits<double>::infinity();
  bool best_converged = false;
  const auto starts = leader_starts(set, std::max(1, config.n_starts), tol.master_seed, "outer-pessimistic");
  for (int s = 0; s < static_cast<int>(starts.size()); ++s) {
    const auto run = nelder_mead(psi_p, set, starts[s], options);
    out.starts.push_back({s, starts[s], run.x, run.value, run.fevals,
                          run.converged ? StatusLabel::converged : StatusLabel::incumbent});
    if (out.x_best.size() == 0 || improves(run.value, best)) {
      best = run.value;
      out.x_best = run.x;
      best_converged = run.converged;
    }
  }
  out.eval = ni_penalized_eval(inst, out.x_best, eps, tol);
  if (!best_converged) out.eval.status = StatusLabel::incumbent;
  return out;
}

}  // namespace bilevel
