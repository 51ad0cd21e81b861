#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace bilevel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Provenance of a reported number.
enum class StatusLabel { converged, incumbent, heuristic, empirical_pareto };

std::string_view to_string(StatusLabel label);
StatusLabel status_from_string(std::string_view name);

/// Objective evaluation produced a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A local solver could not produce any usable point.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed instance, feasible-set descriptor, or configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A leader point outside the leader set was supplied where feasibility is required.
class InfeasibleInputError : public std::runtime_error {
 public:
  InfeasibleInputError(const std::string& what, Vector suggestion)
      : std::runtime_error(what), suggestion_(std::move(suggestion)) {}

  /// Projection of the offending point onto the leader set.
  const Vector& suggestion() const { return suggestion_; }

 private:
  Vector suggestion_;
};

inline Vector make_vector(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double value : values) v[i++] = value;
  return v;
}

}  // namespace bilevel
