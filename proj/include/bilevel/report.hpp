#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bilevel/diagnostics.hpp"
#include "bilevel/frontier.hpp"

namespace bilevel {

/// Six significant digits, as used in every CSV cell.
std::string format_number(double value);

/// x1..xn,eps,psi_o,psi_p,delta,rho,r_ll,g_stat,ni_gap,status
std::string record_csv_header(int n);
std::string record_csv_row(const DiagnosticRecord& rec);
/// Full precision; fixed key order.
nlohmann::ordered_json record_to_json(const DiagnosticRecord& rec);

/// source,weight,x1..xn,psi_o,psi_p,delta,rho,r_ll,ni_gap,status,dominated
void write_frontier_csv(std::ostream& out, const FrontierReport& report);
nlohmann::ordered_json frontier_to_json(const FrontierReport& report);
/// Two-column (psi_o, delta) blocks, one gnuplot index per source.
void write_frontier_plotdata(std::ostream& out, const FrontierReport& report);
void write_frontier_gnuplot(std::ostream& out, const std::string& data_file, const std::string& title);

nlohmann::ordered_json sweep_config_to_json(const SweepConfig& config);

/// Provenance record written next to every set of outputs.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config;
  std::vector<std::pair<std::string, std::string>> statuses;  ///< (point id, status label)
  double wall_clock_seconds = 0.0;
  std::vector<std::string> artifacts;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);

/// Writes `content` to dir/name, creating dir; returns the path.
std::string write_artifact(const std::string& dir, const std::string& name, const std::string& content);

}  // namespace bilevel
