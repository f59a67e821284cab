#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "selex/measure.hpp"
#include "selex/trait_fn.hpp"

namespace selex::model {

using measures::DiscreteMeasure;
using measures::SupportSet;

struct ModelParams {
  double lambda = 1.0;  // resource renewal rate
  double theta = 1.0;   // resource disappearance rate
};

void validate(const ModelParams& p);

// Declared structure of a fitness maximum: location, vanishing order of the
// initial density, gamma there, and the (negative definite) Hessian of
// alpha. Declared by the scenario author, never estimated.
struct MaximumSpec {
  Point x;
  double kappa = 0.0;
  double gamma_at = 1.0;
  std::array<std::array<double, 2>, 2> alpha_second{{{0.0, 0.0}, {0.0, 0.0}}};
};

void validate(const MaximumSpec& m, int dim);

struct Scenario {
  ModelParams params;
  TraitFn alpha;
  TraitFn gamma;
  double S0 = 0.0;
  DiscreteMeasure I0;
  std::vector<MaximumSpec> maxima;  // declared global maxima (may be empty)
  std::vector<Point> watch;         // window centers tracked by trajectories
  int dim = 1;
  bool alpha_constant_on_support = false;
  bool reg_bound_claimed = false;
  double gamma_floor = 0.0;  // declared positive lower bound for gamma
  std::string name;
};

void validate(const Scenario& sc);

// alpha, gamma, w0 evaluated once over the support of I0.
struct ScenarioTables {
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<double> w0;
  std::size_t size() const { return w0.size(); }
};

ScenarioTables make_tables(const Scenario& sc);

inline constexpr double kArgmaxTol = 1e-12;

double alpha_star(const Scenario& sc);
double alpha_star(const ScenarioTables& t);
double r0(const Scenario& sc);
SupportSet argmax_set(const Scenario& sc, double tol = kArgmaxTol);
SupportSet argmax_set(const ScenarioTables& t, double tol = kArgmaxTol);
SupportSet level_set(const Scenario& sc, double eps);
double gamma_star_on(const Scenario& sc, const SupportSet& s);
double gamma_star_on(const ScenarioTables& t, const SupportSet& s);

std::string scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& sc, const std::string& path);

}  // namespace selex::model
