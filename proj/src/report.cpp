#include "bilevel/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bilevel/core.hpp"

namespace bilevel {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::string record_csv_header(int n) {
  std::ostringstream out;
  for (int i = 1; i <= n; ++i) out << 'x' << i << ',';
  out << "eps,psi_o,psi_p,delta,rho,r_ll,g_stat,ni_gap,status";
  return out.str();
}

std::string record_csv_row(const DiagnosticRecord& rec) {
  std::ostringstream out;
  for (auto v : rec.x) out << format_number(v) << ',';
  out << format_number(rec.eps) << ',' << format_number(rec.psi_o) << ',' << format_number(rec.psi_p) << ','
      << format_number(rec.delta) << ',' << format_number(rec.rho) << ',' << format_number(rec.r_ll) << ','
      << (rec.g_stat ? format_number(*rec.g_stat) : std::string()) << ',' << format_number(rec.ni_gap) << ','
      << to_string(rec.status);
  return out.str();
}

nlohmann::ordered_json record_to_json(const DiagnosticRecord& rec) {
  nlohmann::ordered_json j;
  j["x"] = std::vector<double>(rec.x.begin(), rec.x.end());
  j["eps"] = rec.eps;
  j["psi_o"] = rec.psi_o;
  j["psi_p"] = rec.psi_p;
  j["delta"] = rec.delta;
  j["rho"] = rec.rho;
  j["r_ll"] = rec.r_ll;
  j["g_stat"] = rec.g_stat ? nlohmann::ordered_json(*rec.g_stat) : nlohmann::ordered_json(nullptr);
  j["multiplier_fitted"] = rec.multiplier_fitted;
  j["ni_gap"] = rec.ni_gap;
  j["status"] = std::string(to_string(rec.status));
  j["phi"] = rec.phi;
  j["y_optimistic"] = std::vector<double>(rec.y_optimistic.begin(), rec.y_optimistic.end());
  j["y_pessimistic"] = std::vector<double>(rec.y_pessimistic.begin(), rec.y_pessimistic.end());
  return j;
}

namespace {

int report_dim(const FrontierReport& report) {
  for (const auto& p : report.points) {
    if (p.record.x.size() > 0) return static_cast<int>(p.record.x.size());
  }
  return 0;
}

}  // namespace

void write_frontier_csv(std::ostream& out, const FrontierReport& report) {
  const int n = report_dim(report);
  out << "source,weight,";
  for (int i = 1; i <= n; ++i) out << 'x' << i << ',';
  out << "psi_o,psi_p,delta,rho,r_ll,ni_gap,status,dominated\n";
  for (const auto& p : report.points) {
    out << to_string(p.source) << ',' << (p.weight ? format_number(*p.weight) : std::string()) << ',';
    for (int i = 0; i < n; ++i) out << (i < p.record.x.size() ? format_number(p.record.x[i]) : std::string()) << ',';
    out << format_number(p.record.psi_o) << ',' << format_number(p.record.psi_p) << ','
        << format_number(p.record.delta) << ',' << format_number(p.record.rho) << ','
        << format_number(p.record.r_ll) << ',' << format_number(p.record.ni_gap) << ','
        << to_string(p.record.status) << ',' << (p.dominated ? "true" : "false") << '\n';
  }
}

nlohmann::ordered_json sweep_config_to_json(const SweepConfig& c) {
  return {{"J", c.J},
          {"n_lhs", c.n_lhs},
          {"seed", c.seed},
          {"n_starts", c.n_starts},
          {"max_fevals", c.max_fevals},
          {"nm_x_tol", c.nm_x_tol},
          {"dominance_tol", c.dominance_tol}};
}

nlohmann::ordered_json frontier_to_json(const FrontierReport& report) {
  nlohmann::ordered_json j;
  j["instance"] = report.instance;
  j["eps"] = report.eps;
  j["sweep"] = sweep_config_to_json(report.config);
  auto points = nlohmann::ordered_json::array();
  for (const auto& p : report.points) {
    nlohmann::ordered_json e;
    e["source"] = std::string(to_string(p.source));
    e["index"] = p.index;
    e["weight"] = p.weight ? nlohmann::ordered_json(*p.weight) : nlohmann::ordered_json(nullptr);
    e["label"] = p.label;
    e["dominated"] = p.dominated;
    e["error"] = p.error;
    e["record"] = record_to_json(p.record);
    points.push_back(std::move(e));
  }
  j["points"] = std::move(points);
  return j;
}

void write_frontier_plotdata(std::ostream& out, const FrontierReport& report) {
  bool first = true;
  for (auto source : {PointSource::sweep, PointSource::lhs, PointSource::heuristic, PointSource::external}) {
    if (!first) out << "\n\n";
    first = false;
    out << "# " << to_string(source) << ": psi_o delta\n";
    for (const auto& p : report.points) {
      if (p.source != source || !p.error.empty()) continue;
      out << format_number(p.record.psi_o) << ' ' << format_number(p.record.delta) << '\n';
    }
  }
}

void write_frontier_gnuplot(std::ostream& out, const std::string& data_file, const std::string& title) {
  out << "set terminal pngcairo size 900,650\n"
      << "set output 'frontier.png'\n"
      << "set title '" << title << "'\n"
      << "set xlabel 'psi^o'\n"
      << "set ylabel 'Delta'\n"
      << "set key outside\n"
      << "plot '" << data_file << "' index 1 with points pt 7 ps 0.6 lc rgb 'gray' title 'LHS', \\\n"
      << "     '' index 0 with points pt 7 ps 1.0 lc rgb 'blue' title 'sweep', \\\n"
      << "     '' index 2 with points pt 5 ps 1.2 lc rgb 'red' title 'heuristic', \\\n"
      << "     '' index 3 with points pt 9 ps 1.2 lc rgb 'dark-green' title 'external'\n";
}

nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config"] = m.config;
  auto statuses = nlohmann::ordered_json::array();
  for (const auto& [id, status] : m.statuses) statuses.push_back({{"point", id}, {"status", status}});
  j["statuses"] = std::move(statuses);
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  j["artifacts"] = m.artifacts;
  for (const auto& [key, value] : m.extra.items()) j[key] = value;
  return j;
}

std::string write_artifact(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  return path;
}

}  // namespace bilevel
