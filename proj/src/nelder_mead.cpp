#include "bilevel/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace bilevel {

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& objective, const LeaderSet& set,
                             const Vector& x0, const NelderMeadOptions& options) {
  const int n = set.dim();
  int fevals = 0;
  auto evaluate = [&](const Vector& z) {
    const Vector p = set.project(z);
    const double d2 = (z - p).squaredNorm();
    const double v = objective(p);
    ++fevals;
    return v + (1.0 + std::abs(v)) * d2;
  };

  const Vector start = set.project(x0);
  if (options.max_fevals <= 0) {
    return {start, objective(start), 1, 0.0, false};
  }

  std::vector<Vector> simplex{start};
  const Vector width = set.hi() - set.lo();
  for (int i = 0; i < n; ++i) {
    Vector v = start;
    const double step = options.initial_step * std::max(width[i], 1e-3);
    // Step inward so the initial vertex stays in the box when the start sits on an upper bound.
    v[i] += (start[i] + step <= set.hi()[i]) ? step : -step;
    simplex.push_back(v);
  }
  std::vector<double> values;
  for (const auto& v : simplex) values.push_back(evaluate(v));

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
    std::vector<Vector> s;
    std::vector<double> f;
    for (int i : order) {
      s.push_back(simplex[i]);
      f.push_back(values[i]);
    }
    simplex = std::move(s);
    values = std::move(f);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (int i = 1; i <= n; ++i) d = std::max(d, (simplex[i] - simplex[0]).lpNorm<Eigen::Infinity>());
    return d;
  };

  bool converged = false;
  sort_simplex();
  while (fevals < options.max_fevals) {
    if (diameter() <= options.x_tol && values[n] - values[0] <= options.f_tol) {
      converged = true;
      break;
    }
    Vector centroid = Vector::Zero(n);
    for (int i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= n;

    const Vector reflected = centroid + (centroid - simplex[n]);
    const double fr = evaluate(reflected);
    if (fr < values[0]) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[n]);
      const double fe = evaluate(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        values[n] = fe;
      } else {
        simplex[n] = reflected;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = fr;
    } else {
      const bool outside = fr < values[n];
      const Vector contracted =
          outside ? Vector(centroid + 0.5 * (reflected - centroid)) : Vector(centroid + 0.5 * (simplex[n] - centroid));
      const double fc = evaluate(contracted);
      if (fc < std::min(fr, values[n])) {
        simplex[n] = contracted;
        values[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          values[i] = evaluate(simplex[i]);
        }
      }
    }
    sort_simplex();
  }

  const Vector best = set.project(simplex[0]);
  return {best, objective(best), fevals + 1, diameter(), converged};
}

}  // namespace bilevel
