#include "selex/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "selex/summation.hpp"

namespace selex::integrator {

void validate(const SolverConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw ArgumentError("solver config: tolerances must be > 0");
  if (!(cfg.t_end > 0.0)) throw ArgumentError("solver config: t_end must be > 0");
  if (!(cfg.min_step > 0.0) || !(cfg.min_step <= cfg.max_step))
    throw ArgumentError("solver config: need 0 < min_step <= max_step");
  if (cfg.sample_count < 2)
    throw ArgumentError("solver config: need at least 2 samples");
  if (!(cfg.exponent_cap > 0.0))
    throw ArgumentError("solver config: exponent cap must be > 0");
}

namespace {

// Support data compressed to the points that carry initial mass; index
// tables keep the pairwise-summation tree shape fixed across calls.
struct Engine {
  const Scenario* sc;
  ScenarioTables tab;
  std::vector<std::size_t> nz;          // indices with w0 > 0
  std::vector<double> a_nz, g_nz, w_nz; // alpha, gamma, w0 on nz
  std::vector<double> agw_nz;           // alpha*gamma*w0 on nz
  std::vector<std::vector<std::size_t>> windows;  // nz positions per watch pt
  double astar;
  double cap;

  explicit Engine(const Scenario& s, double exponent_cap,
                  double window_radius)
      : sc(&s), tab(model::make_tables(s)), cap(exponent_cap) {
    astar = tab.size() ? model::alpha_star(tab) : 0.0;
    for (std::size_t i = 0; i < tab.size(); ++i) {
      if (tab.w0[i] > 0.0) {
        nz.push_back(i);
        a_nz.push_back(tab.alpha[i]);
        g_nz.push_back(tab.gamma[i]);
        w_nz.push_back(tab.w0[i]);
        agw_nz.push_back(tab.alpha[i] * tab.gamma[i] * tab.w0[i]);
      }
    }
    windows.resize(s.watch.size());
    for (std::size_t w = 0; w < s.watch.size(); ++w)
      for (std::size_t k = 0; k < nz.size(); ++k)
        if (measures::distance(s.I0.point(nz[k]), s.watch[w]) <=
            window_radius)
          windows[w].push_back(k);
  }

  double exponent(std::size_t k, double t, double B) const {
    return g_nz[k] * (a_nz[k] * B - t);
  }

  void check_cap(double e, std::size_t k) const {
    if (e > cap) {
      const Point& p = sc->I0.point(nz[k]);
      std::ostringstream msg;
      msg << "growth exponent " << e << " exceeds cap " << cap
          << " at support point (";
      for (int d = 0; d < p.dim(); ++d) msg << (d ? ", " : "") << p[d];
      msg << ")";
      throw DivergenceError(msg.str());
    }
  }

  double q(double t, double B) const {
    return sum_pairwise(nz.size(), [&](std::size_t k) {
      const double e = exponent(k, t, B);
      check_cap(e, k);
      return agw_nz[k] * std::exp(e);
    });
  }

  // diagnostics shared by both integrators; `wk(k)` is the current weight
  // of nz entry k
  template <class WeightFn>
  Sample sample_from(double t, double S, double B, WeightFn&& wk) const {
    Sample s;
    s.t = t;
    s.S = S;
    s.B = B;
    s.total_mass =
        sum_pairwise(nz.size(), [&](std::size_t k) { return wk(k); });
    s.gamma_moment = sum_pairwise(
        nz.size(), [&](std::size_t k) { return g_nz[k] * wk(k); });
    s.interaction = sum_pairwise(
        nz.size(), [&](std::size_t k) { return a_nz[k] * g_nz[k] * wk(k); });
    s.eta = t > 0.0 ? astar * B / t - 1.0 : astar * S - 1.0;
    s.window_mass.resize(windows.size());
    for (std::size_t w = 0; w < windows.size(); ++w)
      s.window_mass[w] = sum_pairwise(
          windows[w].size(), [&](std::size_t j) { return wk(windows[w][j]); });
    return s;
  }

  Sample sample_reduced(double t, double S, double B) const {
    return sample_from(t, S, B, [&](std::size_t k) {
      const double e = exponent(k, t, B);
      check_cap(e, k);
      return w_nz[k] * std::exp(e);
    });
  }

  DiscreteMeasure measure_at(double t, double B) const {
    std::vector<double> w(tab.size(), 0.0);
    for (std::size_t k = 0; k < nz.size(); ++k) {
      const double e = exponent(k, t, B);
      check_cap(e, k);
      w[nz[k]] = w_nz[k] * std::exp(e);
    }
    return sc->I0.with_weights(std::move(w));
  }
};

std::vector<double> sample_times(const SolverConfig& cfg) {
  std::vector<double> ts(cfg.sample_count);
  for (std::size_t k = 0; k < cfg.sample_count; ++k)
    ts[k] = cfg.t_end * static_cast<double>(k) /
            static_cast<double>(cfg.sample_count - 1);
  ts.back() = cfg.t_end;
  return ts;
}

}  // namespace

std::vector<double> weights_at(const ScenarioTables& tab,
                               const ReducedState& st, double exponent_cap) {
  if (!(st.t >= 0.0) || !(st.B >= 0.0))
    throw ArgumentError("weights_at: need t >= 0 and B >= 0");
  std::vector<double> w(tab.size());
  for (std::size_t i = 0; i < tab.size(); ++i) {
    const double e = tab.gamma[i] * (tab.alpha[i] * st.B - st.t);
    if (e > exponent_cap)
      throw DivergenceError("weights_at: growth exponent exceeds cap");
    w[i] = tab.w0[i] > 0.0 ? tab.w0[i] * std::exp(e) : 0.0;
  }
  return w;
}

DiscreteMeasure weights_at(const Scenario& sc, const ReducedState& st,
                           double exponent_cap) {
  Engine eng(sc, exponent_cap, 0.0);
  if (!(st.t >= 0.0) || !(st.B >= 0.0))
    throw ArgumentError("weights_at: need t >= 0 and B >= 0");
  return eng.measure_at(st.t, st.B);
}

double q_interaction(const Scenario& sc, const ReducedState& st,
                     double exponent_cap) {
  if (!(st.t >= 0.0) || !(st.B >= 0.0))
    throw ArgumentError("q_interaction: need t >= 0 and B >= 0");
  Engine eng(sc, exponent_cap, 0.0);
  return eng.q(st.t, st.B);
}

Trajectory simulate(const Scenario& sc, const SolverConfig& cfg) {
  validate(cfg);
  model::validate(sc);
  Engine eng(sc, cfg.exponent_cap, cfg.window_radius);

  Trajectory tr;
  tr.scenario = std::make_shared<Scenario>(sc);
  tr.window_radius = cfg.window_radius;
  const std::vector<double> ts = sample_times(cfg);
  tr.samples.reserve(ts.size());
  tr.samples.push_back(eng.sample_reduced(0.0, sc.S0, 0.0));
  std::size_t next = 1;

  std::vector<double> snap_times = cfg.snapshot_times;
  std::sort(snap_times.begin(), snap_times.end());
  std::size_t next_snap = 0;
  while (next_snap < snap_times.size() && snap_times[next_snap] <= 0.0) {
    tr.snapshots.push_back({snap_times[next_snap], eng.measure_at(0.0, 0.0)});
    ++next_snap;
  }

  RkOptions opt{cfg.rel_tol, cfg.abs_tol, cfg.min_step, cfg.max_step};
  auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    const double S = y[0];
    const double Q = eng.q(t, y[1]);
    dy[0] = sc.params.lambda - sc.params.theta * S - S * Q;
    dy[1] = S;
  };
  auto guard = [](std::span<const double> y) { return y[0] >= 0.0; };
  std::vector<double> yi(2);
  auto sink = [&](const RkStep& step) {
    while (next < ts.size() && ts[next] <= step.t1) {
      hermite_eval(step, ts[next], yi);
      tr.samples.push_back(eng.sample_reduced(ts[next], yi[0], yi[1]));
      ++next;
    }
    while (next_snap < snap_times.size() && snap_times[next_snap] <= step.t1) {
      hermite_eval(step, snap_times[next_snap], yi);
      tr.snapshots.push_back(
          {snap_times[next_snap], eng.measure_at(snap_times[next_snap], yi[1])});
      ++next_snap;
    }
  };

  rk45_integrate(rhs, {sc.S0, 0.0}, 0.0, cfg.t_end, opt, guard, sink);
  return tr;
}

Trajectory simulate_direct(const Scenario& sc, const SolverConfig& cfg) {
  validate(cfg);
  model::validate(sc);
  if (sc.I0.size() > cfg.oracle_cap) {
    std::ostringstream msg;
    msg << "simulate_direct: support size " << sc.I0.size()
        << " exceeds oracle cap " << cfg.oracle_cap;
    throw CapacityError(msg.str());
  }
  Engine eng(sc, cfg.exponent_cap, cfg.window_radius);
  const std::size_t m = eng.nz.size();

  Trajectory tr;
  tr.scenario = std::make_shared<Scenario>(sc);
  tr.window_radius = cfg.window_radius;
  const std::vector<double> ts = sample_times(cfg);
  tr.samples.reserve(ts.size());

  // state: (S, B, w_1..w_m); B is carried so samples expose eta
  std::vector<double> y0(2 + m);
  y0[0] = sc.S0;
  y0[1] = 0.0;
  for (std::size_t k = 0; k < m; ++k) y0[2 + k] = eng.w_nz[k];

  auto weight_of = [](std::span<const double> y) {
    return [y](std::size_t k) { return y[2 + k]; };
  };
  tr.samples.push_back(
      eng.sample_from(0.0, sc.S0, 0.0, weight_of(std::span<const double>(y0))));
  std::size_t next = 1;

  std::vector<double> snap_times = cfg.snapshot_times;
  std::sort(snap_times.begin(), snap_times.end());
  std::size_t next_snap = 0;
  auto push_snapshot = [&](double t, std::span<const double> y) {
    std::vector<double> w(eng.tab.size(), 0.0);
    for (std::size_t k = 0; k < m; ++k) w[eng.nz[k]] = std::max(0.0, y[2 + k]);
    tr.snapshots.push_back({t, sc.I0.with_weights(std::move(w))});
  };
  while (next_snap < snap_times.size() && snap_times[next_snap] <= 0.0) {
    push_snapshot(snap_times[next_snap], y0);
    ++next_snap;
  }

  RkOptions opt{cfg.rel_tol, cfg.abs_tol, cfg.min_step, cfg.max_step};
  auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    (void)t;
    const double S = y[0];
    const double Q = sum_pairwise(m, [&](std::size_t k) {
      return eng.a_nz[k] * eng.g_nz[k] * y[2 + k];
    });
    dy[0] = sc.params.lambda - sc.params.theta * S - S * Q;
    dy[1] = S;
    for (std::size_t k = 0; k < m; ++k)
      dy[2 + k] = (eng.a_nz[k] * S - 1.0) * eng.g_nz[k] * y[2 + k];
  };
  auto guard = [](std::span<const double> y) {
    for (double v : y)
      if (v < 0.0) return false;
    return true;
  };
  std::vector<double> yi(2 + m);
  auto sink = [&](const RkStep& step) {
    while (next < ts.size() && ts[next] <= step.t1) {
      hermite_eval(step, ts[next], yi);
      tr.samples.push_back(eng.sample_from(
          ts[next], yi[0], yi[1], weight_of(std::span<const double>(yi))));
      ++next;
    }
    while (next_snap < snap_times.size() && snap_times[next_snap] <= step.t1) {
      hermite_eval(step, snap_times[next_snap], yi);
      push_snapshot(snap_times[next_snap], yi);
      ++next_snap;
    }
  };

  rk45_integrate(rhs, std::move(y0), 0.0, cfg.t_end, opt, guard, sink);
  return tr;
}

double lyapunov_value(const Scenario& sc, const ReducedState& st,
                      const DiscreteMeasure& istar, double Sstar) {
  if (istar.size() != sc.I0.size())
    throw ArgumentError("lyapunov_value: istar support mismatch");
  if (!(Sstar > 0.0)) throw ArgumentError("lyapunov_value: Sstar must be > 0");
  if (!(st.S > 0.0))
    throw Error("lyapunov_value: S must be positive");
  const ScenarioTables tab = model::make_tables(sc);
  auto g = [](double s) { return s - std::log(s); };
  ExactSum acc;
  for (std::size_t i = 0; i < tab.size(); ++i) {
    if (tab.w0[i] <= 0.0) continue;
    const double Wk = istar.weight(i);
    if (!(Wk > 0.0))
      throw Error("lyapunov_value: istar must be positive on supp I0");
    // log of i_k(t) w0_k / W*_k, evaluated without materializing i_k
    const double lr = tab.gamma[i] * (tab.alpha[i] * st.B - st.t) +
                      std::log(tab.w0[i]) - std::log(Wk);
    acc.add(Wk * (std::exp(lr) - lr));
  }
  return Sstar * g(st.S / Sstar) + acc.value();
}

ReducedState state_at(const Trajectory& tr, double t) {
  const auto& ss = tr.samples;
  if (ss.empty()) throw ArgumentError("state_at: empty trajectory");
  if (t <= ss.front().t) return {ss.front().t, ss.front().S, ss.front().B};
  if (t >= ss.back().t) return {ss.back().t, ss.back().S, ss.back().B};
  auto it = std::lower_bound(
      ss.begin(), ss.end(), t,
      [](const Sample& s, double v) { return s.t < v; });
  const Sample& b = *it;
  const Sample& a = *(it - 1);
  const double th = (t - a.t) / (b.t - a.t);
  // B interpolated with Hermite using S = B'; S linearly
  const double h = b.t - a.t;
  const double B = a.B + (b.B - a.B) * th * th * (3 - 2 * th) +
                   th * (th - 1) * ((th - 1) * a.S + th * b.S) * h;
  const double S = a.S + th * (b.S - a.S);
  return {t, S, B};
}

void write_trajectory_csv(const Trajectory& tr, std::ostream& out) {
  out << "t,S,B,total_mass,eta";
  for (std::size_t w = 0; w < tr.scenario->watch.size(); ++w)
    out << ",mass_w" << (w + 1);
  out << "\n";
  char buf[32];
  auto emit = [&](double v, bool lead_comma) {
    if (lead_comma) out << ',';
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (const Sample& s : tr.samples) {
    emit(s.t, false);
    emit(s.S, true);
    emit(s.B, true);
    emit(s.total_mass, true);
    emit(s.eta, true);
    for (double w : s.window_mass) emit(w, true);
    out << "\n";
  }
}

TrajectoryTable read_trajectory_csv(std::istream& in) {
  TrajectoryTable t;
  std::string line;
  if (!std::getline(in, line))
    throw ArgumentError("trajectory csv: missing header");
  std::stringstream hs(line);
  std::string col;
  while (std::getline(hs, col, ',')) t.columns.push_back(col);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(t.columns.size());
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      row.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str())
        throw ArgumentError("trajectory csv: bad number '" + cell + "'");
    }
    if (row.size() != t.columns.size())
      throw ArgumentError("trajectory csv: ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace selex::integrator
