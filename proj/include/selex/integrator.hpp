#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "selex/model.hpp"
#include "selex/ode.hpp"

namespace selex::integrator {

using measures::DiscreteMeasure;
using measures::Point;
using model::Scenario;
using model::ScenarioTables;

struct ReducedState {
  double t = 0.0;
  double S = 0.0;
  double B = 0.0;  // integral of S over [0, t]
};

struct SolverConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double t_end = 100.0;
  double max_step = 10.0;
  double min_step = 1e-10;
  std::size_t sample_count = 2001;   // uniform output grid incl. endpoints
  double exponent_cap = 700.0;       // growth-exponent guard
  std::size_t oracle_cap = 20000;    // max support for the direct oracle
  double window_radius = 0.1;
  std::vector<double> snapshot_times;
};

void validate(const SolverConfig& cfg);

struct Sample {
  double t, S, B;
  double total_mass;
  double eta;            // alpha* B/t - 1 (continuously extended at t=0)
  double gamma_moment;   // integral of gamma dI
  double interaction;    // integral of alpha gamma dI
  std::vector<double> window_mass;  // one per watch point
};

struct Snapshot {
  double t;
  DiscreteMeasure measure;
};

struct Trajectory {
  std::shared_ptr<const Scenario> scenario;
  double window_radius = 0.1;
  std::vector<Sample> samples;
  std::vector<Snapshot> snapshots;
};

// Weights of I(t, dx) from the closed-form solution: same support as I0,
// w_i(t) = w_i(0) exp(gamma_i (alpha_i B - t)). Exponents above the cap
// raise DivergenceError; underflow flushes to exact zero.
DiscreteMeasure weights_at(const Scenario& sc, const ReducedState& st,
                           double exponent_cap = 700.0);

std::vector<double> weights_at(const ScenarioTables& t, const ReducedState& st,
                               double exponent_cap = 700.0);

// Coupling term integral alpha gamma dI(t).
double q_interaction(const Scenario& sc, const ReducedState& st,
                     double exponent_cap = 700.0);

// Reduced (S, B) integration; exact in the I-direction.
Trajectory simulate(const Scenario& sc, const SolverConfig& cfg);

// Full per-weight ODE oracle; same sampling contract as simulate.
Trajectory simulate_direct(const Scenario& sc, const SolverConfig& cfg);

// Lyapunov functional for constant-alpha scenarios:
// V = S* g(S/S*) + sum_k W*_k g(i_k w0_k / W*_k), g(s) = s - ln s,
// where istar is the equilibrium measure on the support of I0.
double lyapunov_value(const Scenario& sc, const ReducedState& st,
                      const DiscreteMeasure& istar, double Sstar);

// Interpolated reduced state at time t within the sample range.
ReducedState state_at(const Trajectory& tr, double t);

void write_trajectory_csv(const Trajectory& tr, std::ostream& out);

struct TrajectoryTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

TrajectoryTable read_trajectory_csv(std::istream& in);

}  // namespace selex::integrator
