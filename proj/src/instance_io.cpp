#include "bilevel/instance_io.hpp"

#include "bilevel/config_io.hpp"
#include "bilevel/core.hpp"

namespace bilevel {

namespace {

using nlohmann::json;

Vector read_vector(const json& node, const std::string& where) {
  if (!node.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) throw ConfigError(where + ": entry " + std::to_string(i) + " is not a number");
    v[static_cast<Eigen::Index>(i)] = node[i].get<double>();
  }
  return v;
}

Matrix read_matrix(const json& node, int rows, int cols, const std::string& where) {
  if (!node.is_array() || static_cast<int>(node.size()) != rows) {
    throw ConfigError(where + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const Vector row = read_vector(node[i], where + "[" + std::to_string(i) + "]");
    if (row.size() != cols) throw ConfigError(where + ": row " + std::to_string(i) + " has wrong length");
    m.row(i) = row.transpose();
  }
  return m;
}

template <std::size_t N>
void read_array(const json& table, const char* key, std::array<double, N>& out, const std::string& where) {
  if (!table.contains(key)) return;
  const Vector v = read_vector(table.at(key), where + "." + key);
  if (v.size() != static_cast<Eigen::Index>(N)) {
    throw ConfigError(where + "." + key + ": expected " + std::to_string(N) + " entries");
  }
  for (std::size_t i = 0; i < N; ++i) out[i] = v[static_cast<Eigen::Index>(i)];
}

void read_scalar(const json& table, const char* key, double& out, const std::string& where) {
  if (!table.contains(key)) return;
  if (!table.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  out = table.at(key).get<double>();
}

void reject_unknown(const json& table, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : table.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

Case1Params read_case1(const json& p) {
  Case1Params out;
  reject_unknown(p, {"a", "c", "alpha", "beta", "x_lo", "x_hi"}, "params");
  read_array(p, "a", out.a, "params");
  read_array(p, "c", out.c, "params");
  read_scalar(p, "alpha", out.alpha, "params");
  read_scalar(p, "beta", out.beta, "params");
  read_scalar(p, "x_lo", out.x_lo, "params");
  read_scalar(p, "x_hi", out.x_hi, "params");
  return out;
}

Case2Params read_case2(const json& p) {
  Case2Params out;
  reject_unknown(p,
                 {"kappa", "var_cost", "capacity_factor", "w", "mu_d", "demand", "beta", "dispatch_cost",
                  "lambda_d", "x_lo", "x_hi", "y_hi", "share_cap", "min_build"},
                 "params");
  read_array(p, "kappa", out.kappa, "params");
  read_array(p, "var_cost", out.var_cost, "params");
  read_array(p, "capacity_factor", out.capacity_factor, "params");
  read_array(p, "w", out.w, "params");
  read_scalar(p, "mu_d", out.mu_d, "params");
  read_scalar(p, "demand", out.demand, "params");
  read_array(p, "beta", out.beta, "params");
  read_array(p, "dispatch_cost", out.dispatch_cost, "params");
  read_scalar(p, "lambda_d", out.lambda_d, "params");
  read_array(p, "x_lo", out.x_lo, "params");
  read_array(p, "x_hi", out.x_hi, "params");
  read_array(p, "y_hi", out.y_hi, "params");
  read_scalar(p, "share_cap", out.share_cap, "params");
  read_array(p, "min_build", out.min_build, "params");
  return out;
}

LeaderSet read_leader(const json& t) {
  reject_unknown(t, {"lo", "hi", "inequalities"}, "leader");
  const Vector lo = read_vector(t.at("lo"), "leader.lo");
  const Vector hi = read_vector(t.at("hi"), "leader.hi");
  std::vector<LinearInequality> rows;
  if (t.contains("inequalities")) {
    for (const auto& row : t.at("inequalities")) {
      LinearInequality ineq{read_vector(row.at("a"), "leader.inequalities.a"), row.at("b").get<double>()};
      if (ineq.a.size() != lo.size()) throw ConfigError("leader.inequalities: row dimension mismatch");
      rows.push_back(std::move(ineq));
    }
  }
  return LeaderSet(lo, hi, rows);
}

FollowerSet read_follower(const json& t) {
  reject_unknown(t, {"kind", "lo", "hi", "dim", "total"}, "follower");
  const auto kind = t.value("kind", std::string("box"));
  if (kind == "box") {
    return FollowerSet::box(read_vector(t.at("lo"), "follower.lo"), read_vector(t.at("hi"), "follower.hi"));
  }
  if (kind == "simplex") return FollowerSet::simplex(t.at("dim").get<int>(), t.value("total", 1.0));
  throw ConfigError("follower.kind: expected 'box' or 'simplex', got '" + kind + "'");
}

std::shared_ptr<const Objective> read_quadratic(const json& t, int n, int m, const std::string& where) {
  reject_unknown(t, {"Q", "q", "c"}, where);
  const int d = n + m;
  Matrix q = t.contains("Q") ? read_matrix(t.at("Q"), d, d, where + ".Q") : Matrix::Zero(d, d);
  Vector lin = t.contains("q") ? read_vector(t.at("q"), where + ".q") : Vector::Zero(d);
  if (lin.size() != d) throw ConfigError(where + ".q: expected " + std::to_string(d) + " entries");
  return std::make_shared<QuadraticObjective>(n, m, std::move(q), std::move(lin), t.value("c", 0.0));
}

}  // namespace

LoadedInstance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("instance: expected a table at top level");
  reject_unknown(doc, {"name", "objective", "eps", "params", "leader", "follower", "upper", "lower", "tolerances", "frontier"},
                 "instance");
  const auto objective = doc.value("objective", std::string());
  const json empty = json::object();
  const json& params = doc.contains("params") ? doc.at("params") : empty;

  ToleranceConfig tol;
  if (doc.contains("tolerances")) apply_tolerances(doc.at("tolerances"), tol);
  const double eps = doc.value("eps", 0.0);
  if (eps < 0.0) throw ConfigError("instance: eps must be nonnegative");

  try {
    if (objective == "case1" || objective == "case2") {
      if (doc.contains("leader") || doc.contains("follower") || doc.contains("upper") || doc.contains("lower")) {
        throw ConfigError("instance: builtin objectives take their sets from [params]");
      }
      if (objective == "case1") {
        const auto p = read_case1(params);
        return {case1_instance(p), tol, eps, p, std::nullopt, doc};
      }
      const auto p = read_case2(params);
      return {case2_instance(p), tol, eps, std::nullopt, p, doc};
    }
    if (objective == "custom-quadratic") {
      if (!doc.contains("leader") || !doc.contains("follower") || !doc.contains("upper") || !doc.contains("lower")) {
        throw ConfigError("instance: custom-quadratic needs [leader], [follower], [upper] and [lower]");
      }
      auto leader = read_leader(doc.at("leader"));
      auto follower = read_follower(doc.at("follower"));
      const int n = leader.dim(), m = follower.dim();
      auto upper = read_quadratic(doc.at("upper"), n, m, "upper");
      auto lower = read_quadratic(doc.at("lower"), n, m, "lower");
      BilevelInstance inst(doc.value("name", std::string("custom")), upper, lower, std::move(leader),
                           std::move(follower));
      return {std::move(inst), tol, eps, std::nullopt, std::nullopt, doc};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  }
  throw ConfigError("instance: objective must be 'case1', 'case2' or 'custom-quadratic'");
}

LoadedInstance load_instance(const std::string& path) { return instance_from_json(read_config_file(path)); }

}  // namespace bilevel
