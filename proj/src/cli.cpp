#include "bilevel/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bilevel/batch.hpp"
#include "bilevel/case_studies.hpp"
#include "bilevel/config_io.hpp"
#include "bilevel/core.hpp"
#include "bilevel/diagnostics.hpp"
#include "bilevel/frontier.hpp"
#include "bilevel/instance_io.hpp"
#include "bilevel/lower_solver.hpp"
#include "bilevel/report.hpp"

#ifndef BILEVEL_DATA_DIR
#define BILEVEL_DATA_DIR "data"
#endif

namespace bilevel {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::vector<double> kScanGrid{0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0};
const std::vector<double> kCaseTwoScanX{1.08, 0.72, 3.79, 1.08};

// Everything a command needs once flags, files and defaults are merged. The
// manifest stores this verbatim so that replay skips the merge.
struct Resolved {
  std::string command;
  std::string target;  // case1 / case2 for reproduce, the file name otherwise
  json instance_doc;
  ToleranceConfig tol;
  double eps = 0.0;
  SweepConfig sweep;
  std::vector<double> x;
  bool scan_eps = false;
  bool frontier = true;
  std::vector<NamedPoint> heuristics;
  std::string out_dir = "out";
  std::string data_dir = BILEVEL_DATA_DIR;
};

json resolved_to_json(const Resolved& r) {
  json heur = json::array();
  for (const auto& h : r.heuristics) heur.push_back({{"label", h.label}, {"x", std::vector<double>(h.x.begin(), h.x.end())}});
  return {{"command", r.command},
          {"target", r.target},
          {"instance", r.instance_doc},
          {"tolerances", tolerances_to_json(r.tol)},
          {"eps", r.eps},
          {"sweep", json(sweep_config_to_json(r.sweep))},
          {"x", r.x},
          {"scan_eps", r.scan_eps},
          {"frontier", r.frontier},
          {"heuristics", heur},
          {"out_dir", r.out_dir},
          {"data_dir", r.data_dir}};
}

Resolved resolved_from_json(const json& j) {
  Resolved r;
  r.command = j.at("command").get<std::string>();
  r.target = j.at("target").get<std::string>();
  r.instance_doc = j.at("instance");
  apply_tolerances(j.at("tolerances"), r.tol);
  r.eps = j.at("eps").get<double>();
  const auto& s = j.at("sweep");
  r.sweep.J = s.at("J").get<int>();
  r.sweep.n_lhs = s.at("n_lhs").get<int>();
  r.sweep.seed = s.at("seed").get<std::uint64_t>();
  r.sweep.n_starts = s.at("n_starts").get<int>();
  r.sweep.max_fevals = s.at("max_fevals").get<int>();
  r.sweep.nm_x_tol = s.at("nm_x_tol").get<double>();
  r.sweep.dominance_tol = s.at("dominance_tol").get<double>();
  r.x = j.at("x").get<std::vector<double>>();
  r.scan_eps = j.at("scan_eps").get<bool>();
  r.frontier = j.at("frontier").get<bool>();
  for (const auto& h : j.at("heuristics")) {
    const auto v = h.at("x").get<std::vector<double>>();
    r.heuristics.push_back({h.at("label").get<std::string>(), Eigen::Map<const Vector>(v.data(), v.size())});
  }
  r.out_dir = j.at("out_dir").get<std::string>();
  r.data_dir = j.at("data_dir").get<std::string>();
  return r;
}

// ---------------------------------------------------------------------------
// Small CSV reader for the golden tables and heuristic point files.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) t.header = split_csv_line(line);
    else t.rows.push_back(split_csv_line(line));
  }
  if (t.header.empty()) throw ConfigError("'" + path + "' has no header");
  return t;
}

double parse_cell(const std::string& cell, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": '" + cell + "' is not a number");
  }
}

std::optional<double> optional_cell(const CsvTable& t, const std::vector<std::string>& row, const std::string& name,
                                    const std::string& where) {
  const int c = t.column(name);
  if (c < 0 || c >= static_cast<int>(row.size()) || row[c].empty()) return std::nullopt;
  return parse_cell(row[c], where + "." + name);
}

Vector row_x(const CsvTable& t, const std::vector<std::string>& row, const std::string& where) {
  std::vector<double> xs;
  for (int i = 1;; ++i) {
    const int c = t.column("x" + std::to_string(i));
    if (c < 0) break;
    if (c >= static_cast<int>(row.size())) throw ConfigError(where + ": short row");
    xs.push_back(parse_cell(row[c], where + ".x" + std::to_string(i)));
  }
  if (xs.empty()) throw ConfigError(where + ": no x1.. columns");
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

std::vector<NamedPoint> read_points(const std::string& path) {
  const auto t = read_csv(path);
  const int label = t.column("label");
  std::vector<NamedPoint> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto where = path + ":" + std::to_string(i + 2);
    out.push_back({label >= 0 ? t.rows[i][label] : "point" + std::to_string(i + 1), row_x(t, t.rows[i], where)});
  }
  return out;
}

// ---------------------------------------------------------------------------

struct GoldenCheck {
  std::string row, column;
  double expected = 0.0, actual = 0.0, tol = 0.0;
  bool upper_bound = false;  // actual <= expected instead of |actual - expected| <= tol
  bool pass() const { return upper_bound ? actual <= expected : std::abs(actual - expected) <= tol + 1e-12; }
};

struct Outputs {
  RunManifest manifest;
  std::vector<GoldenCheck> checks;

  void artifact(const Resolved& r, const std::string& name, const std::string& content) {
    write_artifact(r.out_dir, name, content);
    manifest.artifacts.push_back(name);
  }
};

Vector as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void require_feasible(const BilevelInstance& inst, const Vector& x) {
  if (x.size() != inst.n()) {
    throw ConfigError("x has " + std::to_string(x.size()) + " coordinates, the instance expects " +
                      std::to_string(inst.n()));
  }
  if (!inst.leader_set().contains(x)) {
    throw InfeasibleInputError("x lies outside the leader set", inst.leader_set().project(x));
  }
}

// NI-route record with the stationarity residual at a fitted multiplier.
DiagnosticRecord full_record(const BilevelInstance& inst, const Vector& x, double eps, const ToleranceConfig& tol) {
  auto rec = ambiguity_premium(inst, x, eps, {tol, PessimisticRoute::ni_penalty}).record;
  const auto lower = solve_lower(inst, x, tol);
  rec.g_stat = fit_multiplier(inst, x, rec.y_optimistic, lower.y_star, eps).residual;
  rec.multiplier_fitted = true;
  return rec;
}

std::string vector_text(const Vector& x) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_number(x[i]);
  return s + ")";
}

void print_record(std::ostream& out, const DiagnosticRecord& rec) {
  out << "x = " << vector_text(rec.x) << "  eps = " << format_number(rec.eps) << '\n'
      << "  psi_o  " << format_number(rec.psi_o) << "\n  psi_p  " << format_number(rec.psi_p) << "\n  delta  "
      << format_number(rec.delta) << "\n  rho    " << format_number(rec.rho) << "\n  r_ll   "
      << format_number(rec.r_ll) << "\n  g_stat " << (rec.g_stat ? format_number(*rec.g_stat) : std::string("-"))
      << (rec.multiplier_fitted ? " (fitted multiplier)" : "") << "\n  ni_gap " << format_number(rec.ni_gap)
      << "\n  status " << to_string(rec.status) << '\n';
}

void write_scan(Outputs& o, const Resolved& r, const BilevelInstance& inst, const Vector& x, std::ostream& out) {
  const auto scan = sqrt_rate_scan(inst, x, kScanGrid, {r.tol, PessimisticRoute::ni_penalty});
  std::ostringstream csv;
  csv << "eps,delta,ratio,cap\n";
  out << "sqrt-rate scan at " << vector_text(x) << '\n';
  for (const auto& p : scan) {
    csv << format_number(p.eps) << ',' << format_number(p.delta) << ',' << format_number(p.ratio) << ','
        << (p.cap ? format_number(*p.cap) : std::string()) << '\n';
    out << "  eps " << std::setw(5) << format_number(p.eps) << "  delta " << std::setw(9) << format_number(p.delta)
        << "  ratio " << format_number(p.ratio) << '\n';
  }
  o.artifact(r, "sqrt_scan.csv", csv.str());
  if (r.target != "case2") return;
  const auto golden = read_csv(r.data_dir + "/golden_sqrt_scan.csv");
  for (const auto& row : golden.rows) {
    const double eps = parse_cell(row[golden.column("eps")], "golden_sqrt_scan.eps");
    const double ratio = parse_cell(row[golden.column("ratio")], "golden_sqrt_scan.ratio");
    const double rel = parse_cell(row[golden.column("rel_tol")], "golden_sqrt_scan.rel_tol");
    for (const auto& p : scan) {
      if (std::abs(p.eps - eps) <= 1e-12) o.checks.push_back({"eps=" + format_number(eps), "ratio", ratio, p.ratio, rel * ratio});
    }
  }
}

void write_frontier(Outputs& o, const Resolved& r, const FrontierReport& report) {
  std::ostringstream csv, dat, gp;
  write_frontier_csv(csv, report);
  write_frontier_plotdata(dat, report);
  write_frontier_gnuplot(gp, "plotdata_frontier.dat", report.instance + " frontier, eps = " + format_number(report.eps));
  o.artifact(r, "frontier.csv", csv.str());
  o.artifact(r, "frontier.json", frontier_to_json(report).dump(2) + "\n");
  o.artifact(r, "plotdata_frontier.dat", dat.str());
  o.artifact(r, "plot_frontier.gp", gp.str());
  for (const auto& p : report.points) {
    std::string id = std::string(to_string(p.source)) + "[" + std::to_string(p.index) + "]";
    if (!p.label.empty()) id += " " + p.label;
    o.manifest.statuses.emplace_back(id, std::string(to_string(p.record.status)));
  }
}

void print_frontier_summary(std::ostream& out, const FrontierReport& report) {
  int failures = 0;
  for (const auto& p : report.points) failures += !p.error.empty();
  out << "frontier: " << report.points.size() << " points, " << failures << " failed evaluations\n"
      << "nondominated (psi_o, delta):\n";
  std::vector<const FrontierPoint*> front;
  for (const auto& p : report.points) {
    if (!p.dominated) front.push_back(&p);
  }
  std::stable_sort(front.begin(), front.end(), [](auto* a, auto* b) { return a->psi_o() < b->psi_o(); });
  for (const auto* p : front) {
    out << "  " << std::left << std::setw(10) << to_string(p->source) << std::right << std::setw(11)
        << format_number(p->psi_o()) << std::setw(11) << format_number(p->delta()) << "  "
        << to_string(p->record.status);
    if (p->weight) out << "  omega=" << format_number(*p->weight);
    if (!p->label.empty()) out << "  " << p->label;
    out << "  x=" << vector_text(p->record.x) << '\n';
  }
}

// ---------------------------------------------------------------------------

void reproduce_case1(Outputs& o, const Resolved& r, const LoadedInstance& li, std::ostream& out) {
  const auto& inst = li.instance;
  const auto golden = read_csv(r.data_dir + "/golden_table1.csv");
  struct Row {
    std::vector<std::string> cells;
    bool checked;
  };
  std::vector<Row> rows;
  for (const auto& row : golden.rows) {
    const double eps = parse_cell(row[golden.column("eps")], "golden_table1.eps");
    if (std::abs(eps - r.eps) <= 1e-12) rows.push_back({row, true});
  }
  if (rows.empty()) {
    for (const auto& row : golden.rows) {
      const double eps = parse_cell(row[golden.column("eps")], "golden_table1.eps");
      if (std::abs(eps - 0.1) <= 1e-12) rows.push_back({row, false});
    }
  }

  std::ostringstream csv;
  csv << "label," << record_csv_header(inst.n()) << ",t_star\n";
  for (const auto& [row, checked] : rows) {
    const auto label = row[golden.column("label")];
    const Vector x = row_x(golden, row, "golden_table1");
    require_feasible(inst, x);
    const auto rec = full_record(inst, x, r.eps, r.tol);
    const double t_star = li.case1 ? case1_analytic_diagnostics(*li.case1, x, r.eps).t_star : std::nan("");
    csv << label << ',' << record_csv_row(rec) << ',' << format_number(t_star) << '\n';
    o.manifest.statuses.emplace_back(label, std::string(to_string(rec.status)));
    out << std::left << std::setw(44) << label << std::right << " psi_o " << std::setw(8) << format_number(rec.psi_o)
        << "  delta " << std::setw(8) << format_number(rec.delta) << "  rho " << std::setw(8) << format_number(rec.rho)
        << "  " << to_string(rec.status) << '\n';
    if (!checked) continue;
    const auto tol = optional_cell(golden, row, "tol", label);
    if (!tol) continue;
    const std::pair<const char*, double> cells[] = {
        {"psi_o", rec.psi_o}, {"delta", rec.delta}, {"rho", rec.rho}, {"t_star", t_star}};
    for (const auto& [name, actual] : cells) {
      const auto own = optional_cell(golden, row, std::string("tol_") + name, label);
      if (const auto expected = optional_cell(golden, row, name, label)) {
        o.checks.push_back({label, name, *expected, actual, own ? *own : *tol});
      }
    }
  }
  o.artifact(r, "table1.csv", csv.str());

  if (r.frontier) {
    const auto report = build_frontier(inst, r.eps, r.sweep, r.heuristics, r.tol);
    write_frontier(o, r, report);
    print_frontier_summary(out, report);
  }
}

void reproduce_case2(Outputs& o, const Resolved& r, const LoadedInstance& li, std::ostream& out) {
  const auto& inst = li.instance;
  const auto golden = read_csv(r.data_dir + "/golden_table4.csv");
  std::ostringstream csv;
  csv << "label," << record_csv_header(inst.n()) << '\n';
  for (const auto& row : golden.rows) {
    auto label = row[golden.column("label")];
    Vector x = row_x(golden, row, "golden_table4");
    if (!inst.leader_set().contains(x)) {
      // Printed coordinates are rounded; snap them back onto the leader set.
      const Vector p = inst.leader_set().project(x);
      label += " (projected by " + format_number((p - x).norm()) + ")";
      x = p;
    }
    const auto rec = full_record(inst, x, r.eps, r.tol);
    csv << label << ',' << record_csv_row(rec) << '\n';
    o.manifest.statuses.emplace_back(label, std::string(to_string(rec.status)));
    out << std::left << std::setw(28) << label << std::right << " psi_o " << std::setw(8) << format_number(rec.psi_o)
        << "  delta " << std::setw(8) << format_number(rec.delta) << "  rho " << std::setw(8) << format_number(rec.rho)
        << "  ni_gap " << format_number(rec.ni_gap) << '\n';
    const double eps = parse_cell(row[golden.column("eps")], "golden_table4.eps");
    if (std::abs(eps - r.eps) > 1e-12) continue;
    const auto tol_psi = optional_cell(golden, row, "tol_psi_o", label);
    const auto tol_delta = optional_cell(golden, row, "tol_delta", label);
    if (tol_psi) o.checks.push_back({label, "psi_o", *optional_cell(golden, row, "psi_o", label), rec.psi_o, *tol_psi});
    if (tol_delta) o.checks.push_back({label, "delta", *optional_cell(golden, row, "delta", label), rec.delta, *tol_delta});
  }
  o.artifact(r, "table4.csv", csv.str());

  if (r.scan_eps) write_scan(o, r, inst, as_vector(kCaseTwoScanX), out);

  if (r.frontier) {
    auto report = build_frontier(inst, r.eps, r.sweep, r.heuristics, r.tol);
    // Blends of the two extreme sweep incumbents, evaluated as external points.
    const auto& first = report.points.front();
    const auto& last = report.points[static_cast<std::size_t>(r.sweep.J - 1)];
    if (first.error.empty() && last.error.empty()) {
      auto blends = evaluate_points(inst, r.eps, convex_combinations(first.record.x, last.record.x, {0.25, 0.5, 0.75}),
                                    PointSource::external, r.tol);
      report.points.insert(report.points.end(), blends.begin(), blends.end());
      pareto_filter(report.points, r.sweep.dominance_tol);
    }
    write_frontier(o, r, report);
    print_frontier_summary(out, report);

    if (std::abs(r.eps - 0.5) <= 1e-12) {
      double min_psi = INFINITY, min_delta = INFINITY;
      for (int j = 0; j < r.sweep.J; ++j) {
        const auto& p = report.points[static_cast<std::size_t>(j)];
        if (!p.error.empty()) continue;
        min_psi = std::min(min_psi, p.psi_o());
        min_delta = std::min(min_delta, p.delta());
      }
      // The sweep must reach at least as far as the reported incumbents.
      o.checks.push_back({"sweep", "min psi_o", 0.61, min_psi, 0.0, true});
      o.checks.push_back({"sweep", "min delta", 0.40, min_delta, 0.0, true});
    }
  }
}

void cmd_reproduce(Outputs& o, const Resolved& r, std::ostream& out) {
  const auto li = instance_from_json(r.instance_doc);
  if (r.target == "case1") reproduce_case1(o, r, li, out);
  else reproduce_case2(o, r, li, out);
}

void cmd_diagnose(Outputs& o, const Resolved& r, std::ostream& out) {
  const auto li = instance_from_json(r.instance_doc);
  const Vector x = as_vector(r.x);
  require_feasible(li.instance, x);
  const auto rec = full_record(li.instance, x, r.eps, r.tol);
  print_record(out, rec);
  o.artifact(r, "diagnose.csv", record_csv_header(li.instance.n()) + "\n" + record_csv_row(rec) + "\n");
  o.artifact(r, "diagnose.json", record_to_json(rec).dump(2) + "\n");
  o.manifest.statuses.emplace_back("x", std::string(to_string(rec.status)));
  if (r.scan_eps) write_scan(o, r, li.instance, x, out);
}

void cmd_frontier(Outputs& o, const Resolved& r, std::ostream& out) {
  const auto li = instance_from_json(r.instance_doc);
  const auto report = build_frontier(li.instance, r.eps, r.sweep, r.heuristics, r.tol);
  write_frontier(o, r, report);
  print_frontier_summary(out, report);
}

int execute(const Resolved& r, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Outputs o;
  if (r.command == "reproduce") cmd_reproduce(o, r, out);
  else if (r.command == "diagnose") cmd_diagnose(o, r, out);
  else if (r.command == "frontier") cmd_frontier(o, r, out);
  else throw ConfigError("unknown command '" + r.command + "'");

  int failed = 0;
  std::ostringstream diff;
  if (!o.checks.empty()) {
    diff << "row,column,expected,actual,tol,result\n";
    for (const auto& c : o.checks) {
      diff << c.row << ',' << c.column << ',' << format_number(c.expected) << ',' << format_number(c.actual) << ','
           << format_number(c.tol) << ',' << (c.pass() ? "pass" : "FAIL") << '\n';
      if (!c.pass()) {
        ++failed;
        err << "golden mismatch: " << c.row << " / " << c.column << ": expected " << format_number(c.expected)
            << " +- " << format_number(c.tol) << ", got " << format_number(c.actual) << '\n';
      }
    }
    o.artifact(r, "golden_check.csv", diff.str());
    out << "golden checks: " << o.checks.size() - failed << "/" << o.checks.size() << " passed\n";
  }

  o.manifest.command = r.command + (r.target.empty() ? "" : " " + r.target);
  ordered_json config;
  config["eps"] = r.eps;
  config["tolerances"] = tolerances_to_json(r.tol);
  config["sweep"] = sweep_config_to_json(r.sweep);
  config["threads"] = batch_threads();
  o.manifest.config = config;
  o.manifest.extra["replay"] = resolved_to_json(r);
  o.manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.manifest.artifacts.push_back("manifest.json");
  write_artifact(r.out_dir, "manifest.json", manifest_to_json(o.manifest).dump(2) + "\n");
  out << "wrote " << o.manifest.artifacts.size() << " files to " << r.out_dir << '\n';
  return failed ? exit_golden : exit_ok;
}

// ---------------------------------------------------------------------------

struct Flags {
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  std::optional<double> sigma_max;
  std::string tol_file;
  std::string out_dir = "out";
  bool scan_eps = false;
  std::string heuristics_file;
  bool no_frontier = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--eps", f.eps, "tolerance on the follower's optimal value")->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", f.seed, "master seed for all random streams");
  sub->add_option("--starts", f.starts, "multistart count (NI starts and sweep starts)")->check(CLI::PositiveNumber);
  sub->add_option("--sigma-max", f.sigma_max, "truncate the sigma schedule at this value")->check(CLI::PositiveNumber);
  sub->add_option("--tol", f.tol_file, "TOML/JSON file with tolerance overrides");
  sub->add_option("--out", f.out_dir, "output directory")->capture_default_str();
  sub->add_flag("--scan-eps", f.scan_eps, "also run the sqrt(eps) premium scan");
  sub->add_option("--heuristics", f.heuristics_file, "CSV of labelled leader points (label,x1,..,xn)");
  sub->add_flag("--no-frontier", f.no_frontier, "skip the frontier sweep");
}

void apply_sweep_table(const json& t, SweepConfig& s) {
  for (const auto& [key, value] : t.items()) {
    if (key == "J") s.J = value.get<int>();
    else if (key == "n_lhs") s.n_lhs = value.get<int>();
    else if (key == "seed") s.seed = value.get<std::uint64_t>();
    else if (key == "n_starts") s.n_starts = value.get<int>();
    else if (key == "max_fevals") s.max_fevals = value.get<int>();
    else if (key == "nm_x_tol") s.nm_x_tol = value.get<double>();
    else if (key == "dominance_tol") s.dominance_tol = value.get<double>();
    else throw ConfigError("frontier: unknown key '" + key + "'");
  }
}

Resolved resolve(const std::string& command, const std::string& target, const json& doc, const Flags& f,
                 const std::vector<double>& x, const std::string& data_dir) {
  Resolved r;
  r.data_dir = data_dir;
  r.command = command;
  r.target = target;
  r.instance_doc = doc;
  const auto li = instance_from_json(doc);
  r.tol = li.tol;
  r.eps = li.eps;
  r.sweep.dominance_tol = r.tol.dominance_tol;
  if (doc.contains("frontier")) apply_sweep_table(doc.at("frontier"), r.sweep);
  if (!f.tol_file.empty()) {
    const auto t = read_config_file(f.tol_file);
    apply_tolerances(t.contains("tolerances") ? t.at("tolerances") : t, r.tol);
  }
  if (f.eps) r.eps = *f.eps;
  if (f.seed) r.tol.master_seed = r.sweep.seed = *f.seed;
  if (f.starts) r.tol.ni_starts = r.sweep.n_starts = *f.starts;
  if (f.sigma_max) {
    std::vector<double> kept;
    for (double s : r.tol.sigmas) {
      if (s <= *f.sigma_max) kept.push_back(s);
    }
    if (kept.empty()) throw ConfigError("--sigma-max leaves an empty sigma schedule");
    r.tol.sigmas = kept;
  }
  validate(r.sweep);
  r.x = x;
  r.scan_eps = f.scan_eps;
  r.frontier = !f.no_frontier;
  r.out_dir = f.out_dir;
  if (!f.heuristics_file.empty()) {
    r.heuristics = read_points(f.heuristics_file);
  } else if (command == "reproduce" && target == "case2") {
    r.heuristics = read_points(r.data_dir + "/heuristics_case2.csv");
  }
  for (const auto& h : r.heuristics) {
    if (h.x.size() != li.instance.n()) throw ConfigError("heuristic point '" + h.label + "' has the wrong dimension");
  }
  return r;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InfeasibleInputError& e) {
    err << "error: " << e.what() << "\n  nearest feasible point: ";
    for (Eigen::Index i = 0; i < e.suggestion().size(); ++i) err << (i ? "," : "") << std::setprecision(10) << e.suggestion()[i];
    err << '\n';
    return exit_infeasible;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed configuration: " << e.what() << '\n';
    return exit_usage;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return exit_solver;
  } catch (const EvaluationError& e) {
    err << "evaluation failure: " << e.what() << '\n';
    return exit_solver;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ambiguity-premium diagnostics for bilevel decisions", "bilevel"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Flags f;
  std::vector<double> x;
  std::string target, file, manifest_path, replay_out;
  std::string data_dir = BILEVEL_DATA_DIR;

  auto* reproduce = app.add_subcommand("reproduce", "regenerate the case-study tables and check them");
  reproduce->add_option("case", target, "case1 or case2")->required()->check(CLI::IsMember({"case1", "case2"}));
  reproduce->add_option("--data", data_dir, "directory holding case1.toml / case2.toml")->capture_default_str();
  add_common(reproduce, f);

  auto* diagnose = app.add_subcommand("diagnose", "diagnostics at one leader decision");
  diagnose->add_option("instance", file, "instance file (TOML or JSON)")->required();
  diagnose->add_option("--x", x, "leader decision, comma separated")->required()->delimiter(',');
  add_common(diagnose, f);

  auto* frontier = app.add_subcommand("frontier", "robustness/efficiency frontier of an instance");
  frontier->add_option("instance", file, "instance file (TOML or JSON)")->required();
  add_common(frontier, f);

  auto* replay = app.add_subcommand("replay", "rerun a previous invocation from its manifest");
  replay->add_option("manifest", manifest_path, "manifest.json written by an earlier run")->required();
  replay->add_option("--out", replay_out, "output directory (default: the recorded one)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nrun 'bilevel --help' for usage\n";
    return exit_usage;
  }

  return guarded(err, [&]() -> int {
    if (reproduce->parsed()) {
      const auto doc = read_config_file((fs::path(data_dir) / (target + ".toml")).string());
      return execute(resolve("reproduce", target, doc, f, {}, data_dir), out, err);
    }
    if (diagnose->parsed()) {
      return execute(resolve("diagnose", fs::path(file).filename().string(), read_config_file(file), f, x, data_dir), out, err);
    }
    if (frontier->parsed()) {
      return execute(resolve("frontier", fs::path(file).filename().string(), read_config_file(file), f, {}, data_dir), out, err);
    }
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("cannot read '" + manifest_path + "'");
    json manifest;
    try {
      manifest = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(manifest_path + ": " + e.what());
    }
    if (!manifest.contains("replay")) throw ConfigError(manifest_path + ": no replay record");
    auto r = resolved_from_json(manifest.at("replay"));
    if (!replay_out.empty()) r.out_dir = replay_out;
    return execute(r, out, err);
  });
}

}  // namespace bilevel
