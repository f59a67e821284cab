#include "selex/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace selex::model {

void validate(const ModelParams& p) {
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
    throw ArgumentError("model params: lambda must be > 0");
  if (!(p.theta > 0.0) || !std::isfinite(p.theta))
    throw ArgumentError("model params: theta must be > 0");
}

void validate(const MaximumSpec& m, int dim) {
  if (m.x.dim() != dim) throw DimensionError("maximum spec: wrong dimension");
  if (!(m.kappa >= 0.0)) throw ArgumentError("maximum spec: kappa must be >= 0");
  if (!(m.gamma_at > 0.0))
    throw ArgumentError("maximum spec: gamma_at must be > 0");
  // negative definiteness of the declared Hessian
  const auto& h = m.alpha_second;
  if (dim == 1) {
    if (!(h[0][0] < 0.0))
      throw ArgumentError("maximum spec: alpha_second must be negative definite");
  } else {
    const double det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if (!(h[0][0] < 0.0 && det > 0.0))
      throw ArgumentError("maximum spec: alpha_second must be negative definite");
    if (h[0][1] != h[1][0])
      throw ArgumentError("maximum spec: alpha_second must be symmetric");
  }
}

void validate(const Scenario& sc) {
  validate(sc.params);
  if (!(sc.S0 >= 0.0)) throw ArgumentError("scenario: S0 must be >= 0");
  if (sc.dim != 1 && sc.dim != 2)
    throw DimensionError("scenario: dim must be 1 or 2");
  if (!sc.I0.empty() && sc.I0.dim() != sc.dim)
    throw DimensionError("scenario: I0 dimension mismatch");
  for (const MaximumSpec& m : sc.maxima) {
    validate(m, sc.dim);
    // declared maxima must sit on (or within a cell radius of) the support
    double best = std::numeric_limits<double>::infinity();
    double radius = 0.0;
    for (std::size_t i = 0; i < sc.I0.size(); ++i) {
      best = std::min(best, measures::distance(sc.I0.point(i), m.x));
      if (sc.I0.kind() == measures::Kind::grid)
        radius = std::max(radius, std::pow(sc.I0.cell_volume(i),
                                           1.0 / sc.dim));
    }
    if (sc.I0.empty() || best > std::max(radius, 1e-9))
      throw ArgumentError("scenario: declared maximum lies off the support");
  }
  for (const Point& p : sc.watch)
    if (p.dim() != sc.dim)
      throw DimensionError("scenario: watch point dimension mismatch");
  if (sc.gamma_floor < 0.0)
    throw ArgumentError("scenario: gamma_floor must be >= 0");
}

ScenarioTables make_tables(const Scenario& sc) {
  ScenarioTables t;
  const std::size_t n = sc.I0.size();
  t.alpha.resize(n);
  t.gamma.resize(n);
  t.w0.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = sc.I0.point(i);
    const double a = sc.alpha(p);
    const double g = sc.gamma(p);
    if (!std::isfinite(a) || !std::isfinite(g))
      throw EvaluationError("scenario: non-finite trait value on support");
    if (!(g > 0.0))
      throw ArgumentError("scenario: gamma must be positive on support");
    t.alpha[i] = a;
    t.gamma[i] = g;
    t.w0[i] = sc.I0.weight(i);
  }
  return t;
}

double alpha_star(const ScenarioTables& t) {
  if (t.size() == 0) throw ArgumentError("alpha_star: empty support");
  return *std::max_element(t.alpha.begin(), t.alpha.end());
}

double alpha_star(const Scenario& sc) { return alpha_star(make_tables(sc)); }

double r0(const Scenario& sc) {
  return sc.params.lambda * alpha_star(sc) / sc.params.theta;
}

SupportSet argmax_set(const ScenarioTables& t, double tol) {
  if (tol < 0.0) throw ArgumentError("argmax_set: tol must be >= 0");
  const double astar = alpha_star(t);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t.alpha[i] >= astar - tol) idx.push_back(i);
  return SupportSet{std::move(idx)};
}

SupportSet argmax_set(const Scenario& sc, double tol) {
  return argmax_set(make_tables(sc), tol);
}

SupportSet level_set(const Scenario& sc, double eps) {
  if (!(eps > 0.0)) throw ArgumentError("level_set: eps must be > 0");
  return argmax_set(make_tables(sc), eps);
}

double gamma_star_on(const ScenarioTables& t, const SupportSet& s) {
  if (s.empty()) throw ArgumentError("gamma_star_on: empty support set");
  double g = -std::numeric_limits<double>::infinity();
  for (std::size_t i : s.indices) {
    if (i >= t.size()) throw ArgumentError("gamma_star_on: index out of range");
    g = std::max(g, t.gamma[i]);
  }
  return g;
}

double gamma_star_on(const Scenario& sc, const SupportSet& s) {
  return gamma_star_on(make_tables(sc), s);
}

namespace {

nlohmann::json point_json(const Point& p) {
  nlohmann::json c = nlohmann::json::array();
  for (int k = 0; k < p.dim(); ++k) c.push_back(p[k]);
  return c;
}

Point point_from(const nlohmann::json& j) {
  const auto coords = j.get<std::vector<double>>();
  return Point::of(coords);
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  j["spec_version"] = "1.0";
  j["lambda"] = sc.params.lambda;
  j["theta"] = sc.params.theta;
  j["S0"] = sc.S0;
  j["dim"] = sc.dim;
  j["alpha"] = nlohmann::json::parse(sc.alpha.to_json());
  j["gamma"] = nlohmann::json::parse(sc.gamma.to_json());
  j["I0"] = nlohmann::json::parse(measures::measure_to_json(sc.I0));
  nlohmann::json ms = nlohmann::json::array();
  for (const MaximumSpec& m : sc.maxima) {
    nlohmann::json mj;
    mj["x"] = point_json(m.x);
    mj["kappa"] = m.kappa;
    mj["gamma_at"] = m.gamma_at;
    nlohmann::json h = nlohmann::json::array();
    for (int r = 0; r < sc.dim; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < sc.dim; ++c)
        row.push_back(m.alpha_second[static_cast<std::size_t>(r)]
                                    [static_cast<std::size_t>(c)]);
      h.push_back(std::move(row));
    }
    mj["alpha_second"] = std::move(h);
    ms.push_back(std::move(mj));
  }
  j["maxima"] = std::move(ms);
  nlohmann::json ws = nlohmann::json::array();
  for (const Point& p : sc.watch) ws.push_back(point_json(p));
  j["watch"] = std::move(ws);
  j["alpha_constant_on_support"] = sc.alpha_constant_on_support;
  j["reg_bound_claimed"] = sc.reg_bound_claimed;
  j["gamma_floor"] = sc.gamma_floor;
  j["name"] = sc.name;
  return j.dump();
}

Scenario scenario_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Scenario sc;
  sc.params.lambda = j.at("lambda");
  sc.params.theta = j.at("theta");
  sc.S0 = j.at("S0");
  sc.dim = j.at("dim");
  sc.alpha = TraitFn::from_json(j.at("alpha").dump());
  sc.gamma = TraitFn::from_json(j.at("gamma").dump());
  sc.I0 = measures::measure_from_json(j.at("I0").dump());
  for (const auto& mj : j.value("maxima", nlohmann::json::array())) {
    MaximumSpec m;
    m.x = point_from(mj.at("x"));
    m.kappa = mj.at("kappa");
    m.gamma_at = mj.at("gamma_at");
    const auto h = mj.at("alpha_second");
    for (std::size_t r = 0; r < h.size(); ++r)
      for (std::size_t c = 0; c < h[r].size(); ++c)
        m.alpha_second[r][c] = h[r][c];
    sc.maxima.push_back(std::move(m));
  }
  for (const auto& wj : j.value("watch", nlohmann::json::array()))
    sc.watch.push_back(point_from(wj));
  sc.alpha_constant_on_support = j.value("alpha_constant_on_support", false);
  sc.reg_bound_claimed = j.value("reg_bound_claimed", false);
  sc.gamma_floor = j.value("gamma_floor", 0.0);
  sc.name = j.value("name", std::string{});
  validate(sc);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write scenario file: " + path);
  out << scenario_to_json(sc) << "\n";
}

}  // namespace selex::model
