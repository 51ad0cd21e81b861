#pragma once

#include <vector>

#include "bilevel/diagnostics.hpp"
#include "bilevel/instance.hpp"
#include "bilevel/nelder_mead.hpp"
#include "bilevel/tolerance.hpp"

namespace bilevel {

/// The two suprema of the Nikaido-Isoda gap, reported separately.
struct NiGapTerms {
  double worst_case = 0.0;   ///< sup F(x, y^) over f(x, y^) <= f(x, v) + eps, minus F(x, y)
  double suboptimality = 0.0;///< f(x, v) - phi(x)
  double coupling_violation = 0.0;  ///< f(x, y) - f(x, v) - eps beyond rounding slack
  double total = 0.0;        ///< sum for admissible y; a positive merit otherwise
  Vector y_hat;              ///< maximizer of the first supremum (y itself when it is the best found)
};

/**
 * NI gap of the pessimistic lower GNEP at (y, v): zero exactly at lower
 * equilibria, where F(x, y) = psi^p.
 */
NiGapTerms ni_gap_terms(const BilevelInstance& inst, const Vector& x, const Vector& y, const Vector& v,
                        double eps, const ToleranceConfig& tol = {});

double ni_gap(const BilevelInstance& inst, const Vector& x, const Vector& y, const Vector& v, double eps,
              const ToleranceConfig& tol = {});

struct SigmaStep {
  double sigma = 0.0;
  double gap = 0.0;
  double upper = 0.0;  ///< F(x, y) after the step
};

struct PessimisticStartTrace {
  int index = 0;
  Vector y0, v0;
  std::vector<SigmaStep> chain;
  double final_gap = 0.0;
  double final_upper = 0.0;
  StatusLabel status = StatusLabel::incumbent;
};

struct PessimisticEval {
  Vector x;
  double psi_p = 0.0;
  Vector y, v;
  double ni_gap = 0.0;
  double sigma_final = 0.0;
  int starts_used = 0;
  StatusLabel status = StatusLabel::incumbent;
  std::vector<PessimisticStartTrace> trace;
};

/**
 * psi^p_eps(x) by minimizing -F(x, y) + sigma [N_x(y, v)]_+ over the jointly
 * feasible (y, v) along the ascending sigma schedule, warm-starting each
 * sigma and stopping once the gap reaches gap_tol. Starts are the lower
 * solution pair followed by Latin-hypercube pairs in Y x Y.
 */
PessimisticEval ni_penalized_eval(const BilevelInstance& inst, const Vector& x, double eps,
                                  const ToleranceConfig& tol = {}, int n_starts = -1);

struct OuterSearchConfig {
  int n_starts = 8;
  int max_fevals = 300;  ///< per start
  PessimisticRoute route = PessimisticRoute::ni_penalty;
  NelderMeadOptions nelder_mead;
};

struct OuterStartReport {
  int index = 0;
  Vector x0;
  Vector x_final;
  double value = 0.0;
  int fevals = 0;
  StatusLabel status = StatusLabel::incumbent;
};

struct OuterSearchResult {
  Vector x_best;
  PessimisticEval eval;
  std::vector<OuterStartReport> starts;
};

/// Multistart Nelder-Mead on x -> psi^p_eps(x) over the leader set.
OuterSearchResult outer_pessimistic_search(const BilevelInstance& inst, double eps,
                                           const OuterSearchConfig& config = {},
                                           const ToleranceConfig& tol = {});

/// Leader start points: the set center followed by projected LHS points.
std::vector<Vector> leader_starts(const LeaderSet& set, int count, std::uint64_t seed,
                                  std::string_view purpose);

}  // namespace bilevel
