#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "bilevel/core.hpp"
#include "bilevel/sets.hpp"

namespace bilevel {

/**
 * A smooth objective h(x, y) of leader and follower variables.
 *
 * Implementations must be pure: the same arguments always give the same
 * value, so instances can be shared across threads.
 */
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double value(const Vector& x, const Vector& y) const = 0;

  virtual bool has_gradient() const { return true; }
  virtual Vector gradient_x(const Vector& x, const Vector& y) const = 0;
  virtual Vector gradient_y(const Vector& x, const Vector& y) const = 0;
};

/// Objective assembled from callables; gradients may be left empty.
class FunctionObjective final : public Objective {
 public:
  using ValueFn = std::function<double(const Vector&, const Vector&)>;
  using GradFn = std::function<Vector(const Vector&, const Vector&)>;

  explicit FunctionObjective(ValueFn value, GradFn grad_x = {}, GradFn grad_y = {})
      : value_(std::move(value)), grad_x_(std::move(grad_x)), grad_y_(std::move(grad_y)) {}

  double value(const Vector& x, const Vector& y) const override { return value_(x, y); }
  bool has_gradient() const override { return grad_x_ && grad_y_; }
  Vector gradient_x(const Vector& x, const Vector& y) const override;
  Vector gradient_y(const Vector& x, const Vector& y) const override;

 private:
  ValueFn value_;
  GradFn grad_x_, grad_y_;
};

/**
 * Quadratic 1/2 z^T Q z + q^T z + c in the stacked variable z = (x, y).
 * Q is symmetrized on construction.
 */
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(int n, int m, Matrix q_matrix, Vector q_linear, double constant = 0.0);

  double value(const Vector& x, const Vector& y) const override;
  Vector gradient_x(const Vector& x, const Vector& y) const override;
  Vector gradient_y(const Vector& x, const Vector& y) const override;

 private:
  Vector stack(const Vector& x, const Vector& y) const;

  int n_, m_;
  Matrix q_;
  Vector linear_;
  double constant_;
};

using ScalarFieldFn = std::function<double(const Vector& x)>;

/**
 * Parametric bilevel problem: leader minimizes F(x, y) over x in X while the
 * follower picks y in Y near-optimal for f(x, .).
 *
 * Immutable after construction; copies share the objectives.
 */
class BilevelInstance {
 public:
  BilevelInstance(std::string name, std::shared_ptr<const Objective> upper,
                  std::shared_ptr<const Objective> lower, LeaderSet leader, FollowerSet follower,
                  ScalarFieldFn lipschitz_upper = {}, ScalarFieldFn growth_modulus = {});

  const std::string& name() const { return name_; }
  int n() const { return leader_.dim(); }
  int m() const { return follower_.dim(); }

  const Objective& upper() const { return *upper_; }
  const Objective& lower() const { return *lower_; }
  const LeaderSet& leader_set() const { return leader_; }
  const FollowerSet& follower_set() const { return follower_; }

  bool has_gradients() const { return upper_->has_gradient() && lower_->has_gradient(); }

  /// L_F(x): Lipschitz modulus of F(x, .) on Y, when known.
  const ScalarFieldFn& lipschitz_upper() const { return lipschitz_; }
  /// mu(x): quadratic-growth constant of f(x, .) around S(x), when known.
  const ScalarFieldFn& growth_modulus() const { return growth_; }

  /// Throws ConfigError unless both objectives carry gradients.
  void require_gradients(std::string_view who) const;

 private:
  std::string name_;
  std::shared_ptr<const Objective> upper_, lower_;
  LeaderSet leader_;
  FollowerSet follower_;
  ScalarFieldFn lipschitz_, growth_;
};

/// F(x, y). Requires x inside the leader box; throws EvaluationError on non-finite output.
double eval_upper(const BilevelInstance& inst, const Vector& x, const Vector& y);
/// f(x, y), same contract as eval_upper().
double eval_lower(const BilevelInstance& inst, const Vector& x, const Vector& y);

Vector project_leader(const LeaderSet& set, const Vector& z, double tol = 1e-10);
Vector project_follower(const FollowerSet& set, const Vector& z);

/// Worst relative error between analytic and central-difference gradients
/// (step h) of F and f at (x, y); relative to max(1, |analytic|).
double gradient_check(const BilevelInstance& inst, const Vector& x, const Vector& y, double h = 1e-6);

}  // namespace bilevel
