#pragma once

#include <string>

#include <json.hpp>

#include "bilevel/tolerance.hpp"

namespace bilevel {

/// Parses a .toml or .json file into a JSON document (TOML tables become objects).
nlohmann::json read_config_file(const std::string& path);
nlohmann::json parse_toml_text(const std::string& text, const std::string& source = "<string>");

void apply_tolerances(const nlohmann::json& table, ToleranceConfig& tol);
nlohmann::json tolerances_to_json(const ToleranceConfig& tol);

}  // namespace bilevel
