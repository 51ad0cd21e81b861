#include "bilevel/tolerance.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <string_view>

#include <json.hpp>

#include "bilevel/config_io.hpp"
#include "bilevel/core.hpp"

namespace bilevel {

std::string_view to_string(StatusLabel label) {
  switch (label) {
    case StatusLabel::converged:
      return "converged";
    case StatusLabel::incumbent:
      return "incumbent";
    case StatusLabel::heuristic:
      return "heuristic";
    case StatusLabel::empirical_pareto:
      return "empirical_pareto";
  }
  return "incumbent";
}

StatusLabel status_from_string(std::string_view name) {
  if (name == "converged") return StatusLabel::converged;
  if (name == "incumbent") return StatusLabel::incumbent;
  if (name == "heuristic") return StatusLabel::heuristic;
  if (name == "empirical_pareto") return StatusLabel::empirical_pareto;
  throw ConfigError("unknown status label '" + std::string(name) + "'");
}

void apply_tolerances(const nlohmann::json& table, ToleranceConfig& t) {
  if (!table.is_object()) throw ConfigError("tolerances: expected a table");
  for (const auto& [key, value] : table.items()) {
    if (key == "pg_grad_tol") t.pg_grad_tol = value.get<double>();
    else if (key == "pg_max_iter") t.pg_max_iter = value.get<int>();
    else if (key == "penalty_start") t.penalty_start = value.get<double>();
    else if (key == "penalty_factor") t.penalty_factor = value.get<double>();
    else if (key == "penalty_max") t.penalty_max = value.get<double>();
    else if (key == "penalty_max_rounds") t.penalty_max_rounds = value.get<int>();
    else if (key == "feas_tol") t.feas_tol = value.get<double>();
    else if (key == "lower_starts") t.lower_starts = value.get<int>();
    else if (key == "extremum_starts") t.extremum_starts = value.get<int>();
    else if (key == "master_seed") t.master_seed = value.get<std::uint64_t>();
    else if (key == "prox_tau") t.prox_tau = value.get<double>();
    else if (key == "prox_max_iter") t.prox_max_iter = value.get<int>();
    else if (key == "prox_tol") t.prox_tol = value.get<double>();
    else if (key == "sigmas") t.sigmas = value.get<std::vector<double>>();
    else if (key == "ni_starts") t.ni_starts = value.get<int>();
    else if (key == "gap_tol") t.gap_tol = value.get<double>();
    else if (key == "ni_max_iter") t.ni_max_iter = value.get<int>();
    else if (key == "diam_samples") t.diam_samples = value.get<int>();
    else if (key == "clamp_tol") t.clamp_tol = value.get<double>();
    else if (key == "dominance_tol") t.dominance_tol = value.get<double>();
    else if (key == "projection_tol") t.projection_tol = value.get<double>();
    else throw ConfigError("tolerances: unknown key '" + key + "'");
  }
  if (t.sigmas.empty() || !std::is_sorted(t.sigmas.begin(), t.sigmas.end())) {
    throw ConfigError("tolerances: sigmas must be a nonempty ascending list");
  }
}

nlohmann::json tolerances_to_json(const ToleranceConfig& t) {
  return {{"pg_grad_tol", t.pg_grad_tol},     {"pg_max_iter", t.pg_max_iter},
          {"penalty_start", t.penalty_start}, {"penalty_factor", t.penalty_factor},
          {"penalty_max", t.penalty_max},     {"penalty_max_rounds", t.penalty_max_rounds},
          {"feas_tol", t.feas_tol},           {"lower_starts", t.lower_starts},
          {"extremum_starts", t.extremum_starts}, {"master_seed", t.master_seed},
          {"prox_tau", t.prox_tau},           {"prox_max_iter", t.prox_max_iter},
          {"prox_tol", t.prox_tol},           {"sigmas", t.sigmas},
          {"ni_starts", t.ni_starts},         {"gap_tol", t.gap_tol},
          {"ni_max_iter", t.ni_max_iter},     {"diam_samples", t.diam_samples},
          {"clamp_tol", t.clamp_tol},         {"dominance_tol", t.dominance_tol},
          {"projection_tol", t.projection_tol}};
}

ToleranceConfig load_tolerances(const std::string& path) {
  const auto doc = read_config_file(path);
  ToleranceConfig t;
  apply_tolerances(doc.contains("tolerances") ? doc.at("tolerances") : doc, t);
  return t;
}

}  // namespace bilevel
