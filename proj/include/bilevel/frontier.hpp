#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bilevel/diagnostics.hpp"
#include "bilevel/nelder_mead.hpp"

namespace bilevel {

enum class PointSource { sweep, lhs, heuristic, external };

std::string_view to_string(PointSource source);
PointSource source_from_string(std::string_view name);

struct FrontierPoint {
  DiagnosticRecord record;
  PointSource source = PointSource::sweep;
  int index = 0;                 ///< position within its source
  std::optional<double> weight;  ///< omega for sweep points
  std::string label;             ///< free-form name (heuristics, external points)
  bool dominated = false;
  std::string error;             ///< nonempty when the evaluation failed

  double psi_o() const { return record.psi_o; }
  double delta() const { return record.delta; }
};

struct SweepConfig {
  int J = 21;
  int n_lhs = 80;
  std::uint64_t seed = 7;
  int n_starts = 5;              ///< Nelder-Mead starts per weight
  int max_fevals = 300;          ///< per start
  double nm_x_tol = 1e-6;
  double dominance_tol = 1e-9;
};

/// Throws ConfigError unless J >= 2, n_lhs >= 0, n_starts >= 1.
void validate(const SweepConfig& config);

/// omega_j = j / (J - 1), j = 0..J-1.
std::vector<double> sweep_weights(int J);

/**
 * Minimizes (1 - omega) psi^o + omega Delta over the leader set by multistart
 * Nelder-Mead (objective from the direct route), then certifies the best point
 * with the NI-penalized pessimistic evaluation. Converged only when the best
 * run's simplex collapsed below nm_x_tol and the NI gap met gap_tol.
 */
FrontierPoint scalarized_solve(const BilevelInstance& inst, double eps, double omega, const SweepConfig& config,
                               const ToleranceConfig& tol = {});

/// Latin-hypercube points in the leader box; infeasible ones are projected.
std::vector<Vector> lhs_sample(const LeaderSet& set, int n, std::uint64_t seed);

/// (u, d) dominates (u2, d2) when u <= u2, d <= d2 and one is strict, with
/// comparisons at tolerance tol.
bool dominates(double u, double d, double u2, double d2, double tol);

/**
 * Sets `dominated` on every point (failed evaluations are ignored and marked
 * dominated) and relabels nondominated lhs/heuristic points empirical_pareto.
 */
void pareto_filter(std::vector<FrontierPoint>& points, double tol = 1e-9);

struct NamedPoint {
  std::string label;
  Vector x;
};

struct FrontierReport {
  std::string instance;
  double eps = 0.0;
  SweepConfig config;
  ToleranceConfig tol;
  std::vector<FrontierPoint> points;  ///< sweep, lhs, heuristic, external, each in index order
};

/**
 * Sweep over J weights, LHS fill, heuristic and external evaluations, then
 * the Pareto filter. Heuristic points carry status heuristic; failures are
 * recorded per point and never abort the run.
 */
FrontierReport build_frontier(const BilevelInstance& inst, double eps, const SweepConfig& config,
                              const std::vector<NamedPoint>& heuristics = {},
                              const ToleranceConfig& tol = {},
                              const std::vector<NamedPoint>& external = {});

/// Evaluates fixed points (direct route) as frontier entries of the given source.
std::vector<FrontierPoint> evaluate_points(const BilevelInstance& inst, double eps, const std::vector<NamedPoint>& points,
                                           PointSource source, const ToleranceConfig& tol = {});

/// a + t (b - a) for each t.
std::vector<NamedPoint> convex_combinations(const Vector& a, const Vector& b, const std::vector<double>& ts);

}  // namespace bilevel
