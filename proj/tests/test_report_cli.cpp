#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bilevel/case_studies.hpp"
#include "bilevel/cli.hpp"
#include "bilevel/diagnostics.hpp"
#include "bilevel/report.hpp"

using namespace bilevel;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bilevel_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const std::string kData = BILEVEL_DATA_DIR;

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.38164) == "0.38164");
  CHECK(format_number(1.0 / 3.0) == "0.333333");
  CHECK(format_number(1234567.0) == "1.23457e+06");
  CHECK(record_csv_header(2) == "x1,x2,eps,psi_o,psi_p,delta,rho,r_ll,g_stat,ni_gap,status");
}

TEST_CASE("record serialization") {
  const auto rec = ambiguity_premium(case1_instance(), make_vector({0.0, 0.0}), 0.1).record;
  const auto row = record_csv_row(rec);
  CHECK(row.rfind("0,0,0.1,0.625,1.5,0.875,0.538462,", 0) == 0);
  CHECK(row.find(",,") != std::string::npos);  // g_stat left empty
  const auto j = record_to_json(rec);
  CHECK(j["status"] == "converged");
  CHECK(j["g_stat"].is_null());
  CHECK(j["psi_o"].get<double>() == rec.psi_o);
}

TEST_CASE("usage errors exit 1") {
  CHECK(cli({}).code == exit_usage);
  CHECK(cli({"bogus"}).code == exit_usage);
  CHECK(cli({"diagnose", kData + "/case1.toml"}).code == exit_usage);  // --x missing
  CHECK(cli({"diagnose", kData + "/case1.toml", "--x", "0"}).code == exit_usage);
  CHECK(cli({"diagnose", kData + "/missing.toml", "--x", "0,0"}).code == exit_usage);
  CHECK(cli({"diagnose", kData + "/case1.toml", "--x", "0,0", "--sigma-max", "1"}).code == exit_usage);
  CHECK(cli({"reproduce", "case3"}).code == exit_usage);
  const auto dir = scratch("bad_toml");
  spit(dir / "bad.toml", "objective = \"case1\"\n[params\n");
  const auto bad = cli({"diagnose", (dir / "bad.toml").string(), "--x", "0,0", "--out", (dir / "o").string()});
  CHECK(bad.code == exit_usage);
  CHECK(bad.err.find("line") != std::string::npos);
  CHECK(cli({"--help"}).code == exit_ok);
}

TEST_CASE("infeasible input exits 2 with a suggestion") {
  const auto dir = scratch("infeasible");
  const auto r = cli({"diagnose", kData + "/case1.toml", "--x", "3,0.5", "--out", dir.string()});
  CHECK(r.code == exit_infeasible);
  CHECK(r.err.find("nearest feasible point: 2,0.5") != std::string::npos);
}

TEST_CASE("solver failure exits 3") {
  const auto dir = scratch("solver");
  spit(dir / "huge.toml", R"(
objective = "custom-quadratic"
eps = 0.1
[leader]
lo = [1.0]
hi = [2.0]
[follower]
kind = "box"
lo = [0.0]
hi = [1.0]
[upper]
Q = [[1e308, 0.0], [0.0, 1e308]]
[lower]
Q = [[0.0, 0.0], [0.0, 2.0]]
)");
  const auto r = cli({"diagnose", (dir / "huge.toml").string(), "--x", "1.5", "--out", (dir / "o").string()});
  CHECK(r.code == exit_solver);
}

TEST_CASE("diagnose writes a record and replays byte for byte") {
  const auto dir = scratch("diagnose");
  const auto r = cli({"diagnose", kData + "/case1.toml", "--x", "0,0", "--out", (dir / "a").string()});
  REQUIRE(r.code == exit_ok);
  CHECK(r.out.find("rho    0.538462") != std::string::npos);
  const auto csv = slurp(dir / "a" / "diagnose.csv");
  CHECK(csv.find("0.538462") != std::string::npos);
  CHECK(fs::exists(dir / "a" / "manifest.json"));
  const auto again = cli({"replay", (dir / "a" / "manifest.json").string(), "--out", (dir / "b").string()});
  REQUIRE(again.code == exit_ok);
  CHECK(slurp(dir / "b" / "diagnose.csv") == csv);
  CHECK(slurp(dir / "b" / "diagnose.json") == slurp(dir / "a" / "diagnose.json"));
}

TEST_CASE("eps = 0 with a strictly convex follower") {
  const auto dir = scratch("eps0");
  const auto r = cli({"diagnose", kData + "/case2.toml", "--x", "1.08,0.72,3.79,1.08", "--eps", "0", "--out",
                      dir.string()});
  REQUIRE(r.code == exit_ok);
  std::ifstream in(dir / "diagnose.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(std::abs(j["delta"].get<double>()) < 1e-6);
}

TEST_CASE("reproduce checks golden tables") {
  const auto dir = scratch("reproduce");
  const auto ok = cli({"reproduce", "case1", "--no-frontier", "--out", (dir / "ok").string()});
  CHECK(ok.code == exit_ok);
  CHECK(ok.out.find("golden checks: 21/21 passed") != std::string::npos);
  const auto exact = cli({"reproduce", "case1", "--eps", "0", "--no-frontier", "--out", (dir / "exact").string()});
  CHECK(exact.code == exit_ok);
  CHECK(slurp(dir / "exact" / "golden_check.csv").find("t_star,0.412,0.412") != std::string::npos);

  // A doctored golden file must be reported cell by cell.
  const auto data = dir / "data";
  fs::create_directories(data);
  fs::copy_file(kData + "/case1.toml", data / "case1.toml");
  auto golden = slurp(kData + "/golden_table1.csv");
  golden.replace(golden.find("0.625,0.875,0.538"), 17, "0.625,0.900,0.538");
  spit(data / "golden_table1.csv", golden);
  const auto bad = cli({"reproduce", "case1", "--no-frontier", "--data", data.string(), "--out", (dir / "bad").string()});
  CHECK(bad.code == exit_golden);
  CHECK(bad.err.find("heuristic no toll / delta: expected 0.9") != std::string::npos);
  CHECK(slurp(dir / "bad" / "golden_check.csv").find("heuristic no toll,delta,0.9,0.875,0.001,FAIL") !=
        std::string::npos);
}

TEST_CASE("frontier command") {
  const auto dir = scratch("frontier");
  spit(dir / "small.toml", R"(
objective = "case1"
eps = 0.1
[frontier]
J = 2
n_lhs = 4
n_starts = 2
max_fevals = 60
)");
  spit(dir / "heur.csv", "label,x1,x2\nno toll,0,0\nsymmetric,1,1\n");
  const auto r = cli({"frontier", (dir / "small.toml").string(), "--heuristics", (dir / "heur.csv").string(), "--out",
                      (dir / "o").string()});
  REQUIRE(r.code == exit_ok);
  CHECK(r.out.find("nondominated") != std::string::npos);
  const auto csv = slurp(dir / "o" / "frontier.csv");
  CHECK(csv.rfind("source,weight,x1,x2,psi_o,psi_p,delta,rho,r_ll,ni_gap,status,dominated\n", 0) == 0);
  CHECK(csv.find("heuristic,,1,1,0.425") != std::string::npos);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 1 + 2 + 4 + 2);
  for (const char* f : {"frontier.json", "plotdata_frontier.dat", "plot_frontier.gp", "manifest.json"}) {
    CHECK(fs::exists(dir / "o" / f));
  }
  spit(dir / "bad.csv", "label,x1\nshort,1\n");
  CHECK(cli({"frontier", (dir / "small.toml").string(), "--heuristics", (dir / "bad.csv").string(), "--out",
             (dir / "o2").string()})
            .code == exit_usage);
}
