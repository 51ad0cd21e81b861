#include "bilevel/instance.hpp"

#include <algorithm>
#include <cmath>

namespace bilevel {

Vector FunctionObjective::gradient_x(const Vector& x, const Vector& y) const {
  if (!grad_x_) throw ConfigError("objective has no gradient with respect to x");
  return grad_x_(x, y);
}

Vector FunctionObjective::gradient_y(const Vector& x, const Vector& y) const {
  if (!grad_y_) throw ConfigError("objective has no gradient with respect to y");
  return grad_y_(x, y);
}

QuadraticObjective::QuadraticObjective(int n, int m, Matrix q_matrix, Vector q_linear,
                                       double constant)
    : n_(n), m_(m), q_(std::move(q_matrix)), linear_(std::move(q_linear)), constant_(constant) {
  if (q_.rows() != n + m || q_.cols() != n + m || linear_.size() != n + m) {
    throw ConfigError("quadratic objective: coefficient blocks must have size n+m");
  }
  q_ = 0.5 * (q_ + q_.transpose()).eval();
}

Vector QuadraticObjective::stack(const Vector& x, const Vector& y) const {
  Vector z(n_ + m_);
  z << x, y;
  return z;
}

double QuadraticObjective::value(const Vector& x, const Vector& y) const {
  const Vector z = stack(x, y);
  return 0.5 * z.dot(q_ * z) + linear_.dot(z) + constant_;
}

Vector QuadraticObjective::gradient_x(const Vector& x, const Vector& y) const {
  return (q_ * stack(x, y) + linear_).head(n_);
}

Vector QuadraticObjective::gradient_y(const Vector& x, const Vector& y) const {
  return (q_ * stack(x, y) + linear_).tail(m_);
}

BilevelInstance::BilevelInstance(std::string name, std::shared_ptr<const Objective> upper,
                                 std::shared_ptr<const Objective> lower, LeaderSet leader,
                                 FollowerSet follower, ScalarFieldFn lipschitz_upper,
                                 ScalarFieldFn growth_modulus)
    : name_(std::move(name)),
      upper_(std::move(upper)),
      lower_(std::move(lower)),
      leader_(std::move(leader)),
      follower_(std::move(follower)),
      lipschitz_(std::move(lipschitz_upper)),
      growth_(std::move(growth_modulus)) {
  if (!upper_ || !lower_) throw ConfigError("instance '" + name_ + "': missing objective");
}

void BilevelInstance::require_gradients(std::string_view who) const {
  if (!has_gradients()) {
    throw ConfigError(std::string(who) + " requires gradients of F and f (instance '" + name_ + "')");
  }
}

namespace {

void check_point(const BilevelInstance& inst, const Vector& x, const Vector& y) {
  if (x.size() != inst.n() || y.size() != inst.m()) {
    throw EvaluationError("dimension mismatch in objective evaluation");
  }
  const auto& box = inst.leader_set();
  if ((x.array() < box.lo().array() - 1e-9).any() || (x.array() > box.hi().array() + 1e-9).any()) {
    throw EvaluationError("leader point outside the leader box");
  }
  if (!y.allFinite()) throw EvaluationError("non-finite follower point");
}

}  // namespace

double eval_upper(const BilevelInstance& inst, const Vector& x, const Vector& y) {
  check_point(inst, x, y);
  const double v = inst.upper().value(x, y);
  if (!std::isfinite(v)) throw EvaluationError("upper objective returned a non-finite value");
  return v;
}

double eval_lower(const BilevelInstance& inst, const Vector& x, const Vector& y) {
  check_point(inst, x, y);
  const double v = inst.lower().value(x, y);
  if (!std::isfinite(v)) throw EvaluationError("lower objective returned a non-finite value");
  return v;
}

Vector project_leader(const LeaderSet& set, const Vector& z, double tol) { return set.project(z, tol); }

Vector project_follower(const FollowerSet& set, const Vector& z) { return set.project(z); }

double gradient_check(const BilevelInstance& inst, const Vector& x, const Vector& y, double h) {
  inst.require_gradients("gradient_check");
  double worst = 0.0;
  auto compare = [&](const Objective& obj) {
    const Vector gx = obj.gradient_x(x, y);
    const Vector gy = obj.gradient_y(x, y);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (obj.value(xp, y) - obj.value(xm, y)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - gx[i]) / std::max(1.0, std::abs(gx[i])));
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      Vector yp = y, ym = y;
      yp[i] += h;
      ym[i] -= h;
      const double fd = (obj.value(x, yp) - obj.value(x, ym)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - gy[i]) / std::max(1.0, std::abs(gy[i])));
    }
  };
  compare(inst.upper());
  compare(inst.lower());
  return worst;
}

}  // namespace bilevel
