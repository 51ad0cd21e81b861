#pragma once

#include <vector>

#include "bilevel/core.hpp"

namespace bilevel {

/// Half-space a^T x <= b.
struct LinearInequality {
  Vector a;
  double b = 0.0;
};

/**
 * Leader feasible set: a box intersected with finitely many half-spaces.
 *
 * Construction checks lo <= hi and runs a phase-1 feasibility solve, so every
 * LeaderSet object describes a nonempty compact polytope.
 */
class LeaderSet {
 public:
  LeaderSet(Vector lo, Vector hi, std::vector<LinearInequality> rows = {});

  int dim() const { return static_cast<int>(lo_.size()); }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  const std::vector<LinearInequality>& inequalities() const { return rows_; }

  /// Largest violation of any bound or inequality (0 when feasible).
  double max_violation(const Vector& x) const;
  bool contains(const Vector& x, double tol = 1e-9) const;

  /// Euclidean projection. Exact clamp for pure boxes; a primal active-set
  /// method otherwise, with Dykstra as a fallback on degenerate cycling.
  Vector project(const Vector& z, double tol = 1e-10) const;

  /// A feasible point, found at construction.
  const Vector& interior_point() const { return feasible_point_; }

  /// Projection of the box center onto the set.
  Vector center() const;

 private:
  Vector lo_, hi_;
  std::vector<LinearInequality> rows_;
  Vector feasible_point_;
};

/// Follower feasible set: a box, or a scaled simplex {y >= 0, sum y = total}.
class FollowerSet {
 public:
  enum class Kind { box, simplex };

  static FollowerSet box(Vector lo, Vector hi);
  static FollowerSet simplex(int dim, double total = 1.0);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(lo_.size()); }
  double simplex_total() const { return total_; }

  /// Bounding box; for the simplex this is [0, total]^m.
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }

  bool contains(const Vector& y, double tol = 1e-12) const;
  Vector project(const Vector& z) const;
  Vector center() const;

  /// Vertices of the set (all 2^m box corners, or the m simplex vertices).
  std::vector<Vector> vertices() const;

 private:
  FollowerSet(Kind kind, Vector lo, Vector hi, double total);

  Kind kind_;
  Vector lo_, hi_;
  double total_ = 0.0;
};

/// Sort-based Euclidean projection onto {y >= 0, sum y = total}.
Vector project_simplex(const Vector& z, double total);

}  // namespace bilevel
