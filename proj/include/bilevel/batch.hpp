#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bilevel/diagnostics.hpp"

namespace bilevel {

/// One evaluation outcome; `error` is nonempty when the evaluation threw.
struct BatchItem {
  DiagnosticRecord record;
  std::string error;
};

/// Evaluates the diagnostic record at every x, in parallel (OpenMP).
/// Results are in input order and identical to evaluate_batch_serial().
std::vector<BatchItem> evaluate_batch(const BilevelInstance& inst, const std::vector<Vector>& xs, double eps,
                                      const DiagnosticOptions& options = {});

/// Single-threaded reference for evaluate_batch().
std::vector<BatchItem> evaluate_batch_serial(const BilevelInstance& inst, const std::vector<Vector>& xs,
                                             double eps, const DiagnosticOptions& options = {});

/// Runs task(i) for i in [0, count) on the OpenMP pool (dynamic schedule).
/// Exceptions are caught per task and returned as messages (empty on success).
std::vector<std::string> parallel_tasks(int count, const std::function<void(int)>& task);

/// Threads the parallel kernels will use.
int batch_threads();

}  // namespace bilevel
