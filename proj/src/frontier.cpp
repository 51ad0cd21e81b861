#include "bilevel/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bilevel/batch.hpp"
#include "bilevel/pessimistic.hpp"
#include "bilevel/rng.hpp"
#include "bilevel/solver_options.hpp"

namespace bilevel {

std::string_view to_string(PointSource source) {
  switch (source) {
    case PointSource::sweep:
      return "sweep";
    case PointSource::lhs:
      return "lhs";
    case PointSource::heuristic:
      return "heuristic";
    case PointSource::external:
      return "external";
  }
  return "external";
}

PointSource source_from_string(std::string_view name) {
  if (name == "sweep") return PointSource::sweep;
  if (name == "lhs") return PointSource::lhs;
  if (name == "heuristic") return PointSource::heuristic;
  if (name == "external") return PointSource::external;
  throw ConfigError("unknown point source '" + std::string(name) + "'");
}

void validate(const SweepConfig& c) {
  if (c.J < 2) throw ConfigError("sweep: J must be at least 2");
  if (c.n_lhs < 0) throw ConfigError("sweep: n_lhs must be nonnegative");
  if (c.n_starts < 1) throw ConfigError("sweep: n_starts must be positive");
  if (c.max_fevals < 0) throw ConfigError("sweep: max_fevals must be nonnegative");
}

std::vector<double> sweep_weights(int J) {
  if (J < 2) throw ConfigError("sweep: J must be at least 2");
  std::vector<double> w(J);
  for (int j = 0; j < J; ++j) w[j] = static_cast<double>(j) / (J - 1);
  w.back() = 1.0;
  return w;
}

FrontierPoint scalarized_solve(const BilevelInstance& inst, double eps, double omega, const SweepConfig& config,
                               const ToleranceConfig& tol) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("scalarized_solve: omega must lie in [0, 1]");
  validate(config);
  ToleranceConfig seeded = tol;
  seeded.master_seed = config.seed;
  const DiagnosticOptions direct{seeded, PessimisticRoute::direct};
  auto scalarized = [&](const Vector& x) {
    try {
      const auto rec = ambiguity_premium(inst, x, eps, direct).record;
      return (1.0 - omega) * rec.psi_o + omega * rec.delta;
    } catch (const std::exception&) {
      return 1e10;
    }
  };

  NelderMeadOptions nm;
  nm.max_fevals = config.max_fevals;
  nm.x_tol = config.nm_x_tol;

  Vector best_x;
  double best_value = std::numeric_limits<double>::infinity();
  bool best_collapsed = false;
  for (const auto& x0 : leader_starts(inst.leader_set(), config.n_starts, config.seed, "sweep")) {
    const auto run = nelder_mead(scalarized, inst.leader_set(), x0, nm);
    if (best_x.size() == 0 || improves(run.value, best_value)) {
      best_x = run.x;
      best_value = run.value;
      best_collapsed = run.simplex_diameter <= config.nm_x_tol;
    }
  }

  FrontierPoint point;
  point.source = PointSource::sweep;
  point.weight = omega;
  point.record = ambiguity_premium(inst, best_x, eps, {seeded, PessimisticRoute::ni_penalty}).record;
  if (!best_collapsed) point.record.status = StatusLabel::incumbent;
  return point;
}

std::vector<Vector> lhs_sample(const LeaderSet& set, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("lhs_sample: n must be positive");
  auto engine = make_engine(seed, StreamKey("frontier-lhs").mix(static_cast<std::uint64_t>(n)));
  auto points = latin_hypercube(set.lo(), set.hi(), n, engine);
  for (auto& p : points) {
    if (!set.contains(p, 0.0)) p = set.project(p);
  }
  return points;
}

bool dominates(double u, double d, double u2, double d2, double tol) {
  return u <= u2 + tol && d <= d2 + tol && (u < u2 - tol || d < d2 - tol);
}

void pareto_filter(std::vector<FrontierPoint>& points, double tol) {
  // Sort by psi_o; a point is dominated either by some point clearly to its
  // left with no larger delta, or by a point in its psi_o tie band with a
  // clearly smaller delta.
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    if (points[i].error.empty()) order.push_back(i);
    else points[i].dominated = true;
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return points[a].psi_o() < points[b].psi_o(); });

  double prefix_min = std::numeric_limits<double>::infinity();
  std::size_t left = 0;  // order[0, left) have psi_o < current - tol
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& p = points[order[k]];
    while (left < order.size() && points[order[left]].psi_o() < p.psi_o() - tol) {
      prefix_min = std::min(prefix_min, points[order[left]].delta());
      ++left;
    }
    bool dominated = prefix_min <= p.delta() + tol;
    for (std::size_t j = left; !dominated && j < order.size(); ++j) {
      const auto& q = points[order[j]];
      if (q.psi_o() > p.psi_o() + tol) break;
      dominated = q.delta() < p.delta() - tol;
    }
    p.dominated = dominated;
  }
  for (auto& p : points) {
    if (!p.dominated && p.error.empty() && (p.source == PointSource::lhs || p.source == PointSource::heuristic)) {
      p.record.status = StatusLabel::empirical_pareto;
    }
  }
}

FrontierReport build_frontier(const BilevelInstance& inst, double eps, const SweepConfig& config,
                              const std::vector<NamedPoint>& heuristics, const ToleranceConfig& tol,
                              const std::vector<NamedPoint>& external) {
  validate(config);
  FrontierReport report;
  report.instance = inst.name();
  report.eps = eps;
  report.config = config;
  report.tol = tol;
  ToleranceConfig seeded = tol;
  seeded.master_seed = config.seed;

  const auto weights = sweep_weights(config.J);
  std::vector<FrontierPoint> sweep(weights.size());
  const auto sweep_errors = parallel_tasks(static_cast<int>(weights.size()), [&](int j) {
    sweep[j] = scalarized_solve(inst, eps, weights[j], config, seeded);
  });
  for (int j = 0; j < static_cast<int>(weights.size()); ++j) {
    sweep[j].source = PointSource::sweep;
    sweep[j].index = j;
    sweep[j].weight = weights[j];
    sweep[j].error = sweep_errors[j];
    if (!sweep_errors[j].empty()) sweep[j].record.status = StatusLabel::incumbent;
    report.points.push_back(std::move(sweep[j]));
  }

  auto append = [&](const std::vector<FrontierPoint>& pts) {
    report.points.insert(report.points.end(), pts.begin(), pts.end());
  };
  if (config.n_lhs > 0) {
    std::vector<NamedPoint> lhs;
    for (auto& x : lhs_sample(inst.leader_set(), config.n_lhs, config.seed)) lhs.push_back({"", std::move(x)});
    append(evaluate_points(inst, eps, lhs, PointSource::lhs, seeded));
  }
  append(evaluate_points(inst, eps, heuristics, PointSource::heuristic, seeded));
  append(evaluate_points(inst, eps, external, PointSource::external, seeded));

  pareto_filter(report.points, config.dominance_tol);
  return report;
}

std::vector<FrontierPoint> evaluate_points(const BilevelInstance& inst, double eps, const std::vector<NamedPoint>& points,
                                           PointSource source, const ToleranceConfig& tol) {
  std::vector<Vector> xs;
  for (const auto& p : points) xs.push_back(p.x);
  const auto items = evaluate_batch(inst, xs, eps, {tol, PessimisticRoute::direct});
  std::vector<FrontierPoint> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    FrontierPoint p;
    p.record = items[i].record;
    p.error = items[i].error;
    p.source = source;
    p.index = static_cast<int>(i);
    p.label = points[i].label;
    if (!p.error.empty()) p.record.status = StatusLabel::incumbent;
    if (source == PointSource::heuristic) p.record.status = StatusLabel::heuristic;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<NamedPoint> convex_combinations(const Vector& a, const Vector& b, const std::vector<double>& ts) {
  std::vector<NamedPoint> out;
  for (double t : ts) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("convex_combinations: t must lie in [0, 1]");
    out.push_back({"t=" + std::to_string(t).substr(0, 4), a + t * (b - a)});
  }
  return out;
}

}  // namespace bilevel
