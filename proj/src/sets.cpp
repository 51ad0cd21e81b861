#include "bilevel/sets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Dense>

namespace bilevel {

namespace {

Vector clamp(const Vector& z, const Vector& lo, const Vector& hi) {
  return z.cwiseMax(lo).cwiseMin(hi);
}

// Constraint row c^T x <= d in the unified form used by the active-set polish.
struct Row {
  Vector c;
  double d;
};

std::vector<Row> all_rows(const Vector& lo, const Vector& hi,
                          const std::vector<LinearInequality>& ineqs) {
  const auto n = lo.size();
  std::vector<Row> rows;
  rows.reserve(2 * n + ineqs.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = 1.0;
    rows.push_back({e, hi[i]});
    rows.push_back({-e, -lo[i]});
  }
  for (const auto& r : ineqs) rows.push_back({r.a, r.b});
  return rows;
}

// Solves min 1/2|x - z|^2 s.t. c_k^T x = d_k for k in the working set.
// Returns x and the multipliers nu (x = z - C^T nu).
std::pair<Vector, Vector> equality_projection(const Vector& z, const std::vector<Row>& rows,
                                              const std::vector<int>& working) {
  const auto n = z.size();
  const auto k = static_cast<Eigen::Index>(working.size());
  if (k == 0) return {z, Vector()};
  Matrix c(k, n);
  Vector d(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    c.row(r) = rows[working[r]].c.transpose();
    d[r] = rows[working[r]].d;
  }
  const Matrix gram = c * c.transpose();
  const Vector nu = gram.completeOrthogonalDecomposition().solve(c * z - d);
  return {z - c.transpose() * nu, nu};
}

}  // namespace

LeaderSet::LeaderSet(Vector lo, Vector hi, std::vector<LinearInequality> rows)
    : lo_(std::move(lo)), hi_(std::move(hi)), rows_(std::move(rows)) {
  if (lo_.size() == 0 || lo_.size() != hi_.size()) {
    throw ConfigError("leader set: box bounds must be nonempty and of equal length");
  }
  if (!lo_.allFinite() || !hi_.allFinite()) {
    throw ConfigError("leader set: box bounds must be finite");
  }
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (lo_[i] > hi_[i]) throw ConfigError("leader set: lo > hi in coordinate " + std::to_string(i));
  }
  for (const auto& r : rows_) {
    if (r.a.size() != lo_.size()) throw ConfigError("leader set: inequality row has wrong dimension");
    if (r.a.norm() == 0.0) throw ConfigError("leader set: inequality row with zero normal");
  }

  // Phase 1: projected subgradient on max_j (a_j^T x - b_j)_+ over the box,
  // Polyak step toward the known optimal value 0.
  Vector x = 0.5 * (lo_ + hi_);
  for (int it = 0; it < 20000; ++it) {
    double worst = 0.0;
    const LinearInequality* row = nullptr;
    for (const auto& r : rows_) {
      const double v = r.a.dot(x) - r.b;
      if (v > worst) {
        worst = v;
        row = &r;
      }
    }
    if (row == nullptr) break;
    x = clamp(x - (worst / row->a.squaredNorm()) * row->a, lo_, hi_);
  }
  if (max_violation(x) > 1e-9) {
    throw ConfigError("leader set: box and inequalities have empty intersection");
  }
  feasible_point_ = x;
}

double LeaderSet::max_violation(const Vector& x) const {
  double v = 0.0;
  v = std::max(v, (lo_ - x).maxCoeff());
  v = std::max(v, (x - hi_).maxCoeff());
  for (const auto& r : rows_) v = std::max(v, r.a.dot(x) - r.b);
  return std::max(v, 0.0);
}

bool LeaderSet::contains(const Vector& x, double tol) const {
  return x.size() == lo_.size() && max_violation(x) <= tol;
}

Vector LeaderSet::project(const Vector& z, double tol) const {
  if (rows_.empty()) return clamp(z, lo_, hi_);
  if (contains(z, 0.0)) return z;
  const auto rows = all_rows(lo_, hi_, rows_);
  const int n_rows = static_cast<int>(rows.size());

  // Primal active-set method for min 1/2|x - z|^2 s.t. rows, from the
  // phase-1 feasible point.
  Vector x = feasible_point_;
  std::vector<int> working;
  for (int iter = 0; iter < 50 * n_rows; ++iter) {
    auto [target, nu] = equality_projection(z, rows, working);
    const Vector p = target - x;
    if (p.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
      int drop = -1;
      double most_negative = -1e-12;
      for (Eigen::Index i = 0; i < nu.size(); ++i) {
        if (nu[i] < most_negative) {
          most_negative = nu[i];
          drop = static_cast<int>(i);
        }
      }
      if (drop < 0) return clamp(x, lo_, hi_);
      working.erase(working.begin() + drop);
      continue;
    }
    double alpha = 1.0;
    int block = -1;
    for (int k = 0; k < n_rows; ++k) {
      if (std::find(working.begin(), working.end(), k) != working.end()) continue;
      const double cp = rows[k].c.dot(p);
      if (cp <= 0.0) continue;
      const double room = std::max(0.0, rows[k].d - rows[k].c.dot(x));
      if (room / cp < alpha) {
        alpha = room / cp;
        block = k;
      }
    }
    x += alpha * p;
    if (block >= 0) working.push_back(block);
  }

  // Degenerate cycling: fall back to Dykstra's alternating projections.
  const std::size_t sets = rows_.size() + 1;
  std::vector<Vector> corrections(sets, Vector::Zero(z.size()));
  x = z;
  for (int cycle = 0; cycle < 50000; ++cycle) {
    const Vector before = x;
    for (std::size_t s = 0; s < sets; ++s) {
      const Vector shifted = x + corrections[s];
      Vector projected;
      if (s == 0) {
        projected = clamp(shifted, lo_, hi_);
      } else {
        const auto& r = rows_[s - 1];
        const double excess = r.a.dot(shifted) - r.b;
        projected = excess > 0.0 ? Vector(shifted - (excess / r.a.squaredNorm()) * r.a) : shifted;
      }
      corrections[s] = shifted - projected;
      x = projected;
    }
    if ((x - before).lpNorm<Eigen::Infinity>() < 1e-15 && max_violation(x) <= tol) break;
  }
  return clamp(x, lo_, hi_);
}

Vector LeaderSet::center() const { return project(0.5 * (lo_ + hi_)); }

FollowerSet::FollowerSet(Kind kind, Vector lo, Vector hi, double total)
    : kind_(kind), lo_(std::move(lo)), hi_(std::move(hi)), total_(total) {}

FollowerSet FollowerSet::box(Vector lo, Vector hi) {
  if (lo.size() == 0 || lo.size() != hi.size()) {
    throw ConfigError("follower box: bounds must be nonempty and of equal length");
  }
  if (!lo.allFinite() || !hi.allFinite() || (lo.array() > hi.array()).any()) {
    throw ConfigError("follower box: bounds must be finite with lo <= hi");
  }
  return FollowerSet(Kind::box, std::move(lo), std::move(hi), 0.0);
}

FollowerSet FollowerSet::simplex(int dim, double total) {
  if (dim < 1) throw ConfigError("follower simplex: dimension must be positive");
  if (!(total > 0.0) || !std::isfinite(total)) throw ConfigError("follower simplex: total must be positive");
  return FollowerSet(Kind::simplex, Vector::Zero(dim), Vector::Constant(dim, total), total);
}

bool FollowerSet::contains(const Vector& y, double tol) const {
  if (y.size() != lo_.size()) return false;
  if (kind_ == Kind::box) {
    return (y.array() >= lo_.array() - tol).all() && (y.array() <= hi_.array() + tol).all();
  }
  return (y.array() >= -tol).all() && std::abs(y.sum() - total_) <= tol;
}

Vector FollowerSet::project(const Vector& z) const {
  if (kind_ == Kind::box) return clamp(z, lo_, hi_);
  return project_simplex(z, total_);
}

Vector FollowerSet::center() const {
  if (kind_ == Kind::box) return 0.5 * (lo_ + hi_);
  return Vector::Constant(lo_.size(), total_ / static_cast<double>(lo_.size()));
}

std::vector<Vector> FollowerSet::vertices() const {
  const auto m = lo_.size();
  std::vector<Vector> out;
  if (kind_ == Kind::simplex) {
    for (Eigen::Index i = 0; i < m; ++i) {
      Vector v = Vector::Zero(m);
      v[i] = total_;
      out.push_back(v);
    }
    return out;
  }
  const unsigned long corners = 1UL << m;
  for (unsigned long mask = 0; mask < corners; ++mask) {
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v[i] = (mask >> i) & 1UL ? hi_[i] : lo_[i];
    out.push_back(v);
  }
  return out;
}

Vector project_simplex(const Vector& z, double total) {
  const auto m = z.size();
  std::vector<double> sorted(z.data(), z.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - total) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  Vector y = (z.array() - theta).cwiseMax(0.0);
  // Restore the exact sum lost to rounding on the largest coordinate.
  Eigen::Index top = 0;
  y.maxCoeff(&top);
  y[top] += total - y.sum();
  return y.cwiseMax(0.0);
}

}  // namespace bilevel
