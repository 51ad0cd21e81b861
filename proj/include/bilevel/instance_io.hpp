#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "bilevel/case_studies.hpp"
#include "bilevel/instance.hpp"
#include "bilevel/tolerance.hpp"

namespace bilevel {

/**
 * An instance read from a declarative TOML/JSON description.
 *
 *   name = "..."
 *   objective = "case1" | "case2" | "custom-quadratic"
 *   eps = 0.1                      # default tolerance for commands
 *   [params]                       # case1 / case2 data (defaults fill gaps)
 *   [leader]  lo, hi, [[leader.inequalities]] a, b     # custom-quadratic only
 *   [follower] kind = "box" | "simplex", lo, hi, total # custom-quadratic only
 *   [upper] / [lower]  Q, q, c     # custom-quadratic blocks over z = (x, y)
 *   [tolerances]                   # ToleranceConfig overrides
 *   [frontier]                     # J, n_lhs, seed, n_starts, max_fevals
 */
struct LoadedInstance {
  BilevelInstance instance;
  ToleranceConfig tol;
  double eps = 0.0;
  std::optional<Case1Params> case1;
  std::optional<Case2Params> case2;
  nlohmann::json source;
};

LoadedInstance instance_from_json(const nlohmann::json& doc);
LoadedInstance load_instance(const std::string& path);

}  // namespace bilevel
