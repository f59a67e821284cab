#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selex/integrator.hpp"
#include "selex/model.hpp"

namespace selex::asymptotics {

using integrator::Trajectory;
using measures::DiscreteMeasure;
using model::ModelParams;
using model::Scenario;

enum class CaseKind {
  case_i,                // argmax carries initial mass
  case_ii_regular,       // zero argmax mass, uniform positivity claimed
  case_ii_finite_maxima, // zero argmax mass, declared regular maxima
  subcritical,           // R0 <= 1
};

std::string to_string(CaseKind k);

struct Prediction {
  CaseKind kind;
  double S_inf = 0.0;
  std::optional<double> tau;
  std::optional<DiscreteMeasure> I_inf;
  std::optional<double> mass_inf;
  std::optional<double> rho;
  std::vector<std::size_t> J;      // 0-based indices into the maxima list
  std::vector<double> exponents;   // gamma_i rho - (N+kappa_i)/2 per maximum
};

// Unique root of sum_k gamma_k w_k e^{tau gamma_k} = rhs (monotone in tau).
double solve_tau_weighted(std::span<const double> gammas,
                          std::span<const double> weights, double rhs);

// tau for the scenario's discretized argmax restriction.
double solve_tau(const Scenario& sc);

Prediction predict(const Scenario& sc);

struct CountableLimit {
  double alpha_star;  // declared limit of alpha_n
  double gamma_inf;   // declared limit of gamma_n
};

Prediction predict_finite(std::span<const double> alphas,
                          std::span<const double> gammas,
                          std::span<const double> w0s, const ModelParams& params,
                          const std::optional<CountableLimit>& limit = {});

struct EtaSeries {
  std::vector<double> t;
  std::vector<double> eta;           // alpha* B/t - 1
  std::vector<double> rho_estimate;  // t eta / ln t
};

EtaSeries eta_series(const Trajectory& tr, const Scenario& sc);

// Least-squares slope of ln(value) against ln(t) over samples in the window.
double loglog_slope(std::span<const double> times,
                    std::span<const double> values, double t_lo, double t_hi);

// Pearson correlation between the rescaled weight profile near maximum i at
// time t and |z|^kappa exp(gamma/(2 alpha*) alpha'' z^2), both
// max-normalized. 1D scenarios only.
double selfsimilar_check(const Trajectory& tr, const Scenario& sc,
                         std::size_t max_index, double t,
                         double window_radius = 0.1, std::size_t min_points = 30);

struct OmegaLimitOptions {
  double tail_fraction = 0.5;  // tail = last fraction of the time range
  double band_lo = 0.5;        // in-J window mass within [lo,hi] x tail median
  double band_hi = 2.0;
  double mass_floor = 1e-3;    // persistence floor for in-J medians
  double off_j_threshold = 0.02;
  double leak_threshold = 0.05;
};

struct OmegaLimitReport {
  struct Clause {
    std::string name;
    bool pass;
    double measured;
    double bound_lo;
    double bound_hi;
  };
  std::vector<Clause> clauses;
  bool all_pass = true;
};

OmegaLimitReport omega_limit_check(const Trajectory& tr, const Prediction& pred,
                                   double window_radius,
                                   const OmegaLimitOptions& opts = {});

// Window-mass time series around a center, recomputed from the reduced
// states at the trajectory's sample times.
std::vector<double> window_mass_series(const Trajectory& tr,
                                       const measures::Point& center,
                                       double radius);

std::string prediction_to_json(const Prediction& p);

}  // namespace selex::asymptotics
