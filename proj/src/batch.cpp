#include "bilevel/batch.hpp"

#include <exception>

#include <omp.h>

namespace bilevel {

namespace {

BatchItem evaluate_one(const BilevelInstance& inst, const Vector& x, double eps, const DiagnosticOptions& options) {
  BatchItem item;
  try {
    item.record = ambiguity_premium(inst, x, eps, options).record;
  } catch (const std::exception& e) {
    item.record.x = x;
    item.record.eps = eps;
    item.error = e.what();
  }
  return item;
}

}  // namespace

std::vector<std::string> parallel_tasks(int count, const std::function<void(int)>& task) {
  std::vector<std::string> errors(count > 0 ? count : 0);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    try {
      task(i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (errors[i].empty()) errors[i] = "unknown error";
    }
  }
  return errors;
}

std::vector<BatchItem> evaluate_batch(const BilevelInstance& inst, const std::vector<Vector>& xs, double eps,
                                      const DiagnosticOptions& options) {
  std::vector<BatchItem> out(xs.size());
  const int count = static_cast<int>(xs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) out[i] = evaluate_one(inst, xs[i], eps, options);
  return out;
}

std::vector<BatchItem> evaluate_batch_serial(const BilevelInstance& inst, const std::vector<Vector>& xs,
                                             double eps, const DiagnosticOptions& options) {
  std::vector<BatchItem> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(evaluate_one(inst, x, eps, options));
  return out;
}

int batch_threads() { return omp_get_max_threads(); }

}  // namespace bilevel
