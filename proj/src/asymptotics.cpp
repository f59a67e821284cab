#include "selex/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "selex/summation.hpp"
#include "json.hpp"

namespace selex::asymptotics {

std::string to_string(CaseKind k) {
  switch (k) {
    case CaseKind::case_i: return "case_i";
    case CaseKind::case_ii_regular: return "case_ii_regular";
    case CaseKind::case_ii_finite_maxima: return "case_ii_finite_maxima";
    case CaseKind::subcritical: return "subcritical";
  }
  return "?";
}

double solve_tau_weighted(std::span<const double> gammas,
                          std::span<const double> weights, double rhs) {
  if (gammas.size() != weights.size())
    throw ArgumentError("solve_tau: gamma/weight size mismatch");
  if (!(rhs > 0.0)) throw ArgumentError("solve_tau: rhs must be > 0");
  double wsum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw ArgumentError("solve_tau: negative weight");
    if (!(gammas[i] > 0.0)) throw ArgumentError("solve_tau: gamma must be > 0");
    wsum += weights[i];
  }
  if (!(wsum > 0.0)) throw CaseError("solve_tau: zero mass on the argmax set");

  auto residual = [&](double tau) {
    ExactSum s;
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      if (weights[i] == 0.0) continue;
      s.add(gammas[i] * weights[i] * std::exp(tau * gammas[i]));
    }
    return s.value() - rhs;  // strictly increasing in tau
  };

  double lo = -1.0, hi = 1.0;
  int guard = 0;
  while (residual(lo) > 0.0) {
    lo *= 2.0;
    if (++guard > 200) throw Error("solve_tau: bracket expansion failed (low)");
  }
  guard = 0;
  while (residual(hi) < 0.0) {
    hi *= 2.0;
    if (++guard > 200) throw Error("solve_tau: bracket expansion failed (high)");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (std::abs(r) <= 1e-12 * rhs) break;
    (r < 0.0 ? lo : hi) = mid;
  }
  return mid;
}

namespace {

struct Classified {
  model::ScenarioTables tab;
  measures::SupportSet argmax;
  double astar = 0.0;
  double r0 = 0.0;
  double argmax_mass = 0.0;
};

Classified classify(const Scenario& sc) {
  Classified c;
  c.tab = model::make_tables(sc);
  if (c.tab.size() == 0) throw ArgumentError("predict: empty initial measure");
  c.astar = model::alpha_star(c.tab);
  c.r0 = sc.params.lambda * c.astar / sc.params.theta;
  c.argmax = model::argmax_set(c.tab);
  ExactSum m;
  for (std::size_t i : c.argmax.indices) m.add(c.tab.w0[i]);
  c.argmax_mass = m.value();
  return c;
}

}  // namespace

double solve_tau(const Scenario& sc) {
  const Classified c = classify(sc);
  if (!(c.r0 > 1.0)) throw SubcriticalError("solve_tau: R0 <= 1");
  if (!(c.argmax_mass > 0.0))
    throw CaseError("solve_tau: I0 puts no mass on the argmax set");
  std::vector<double> g, w;
  for (std::size_t i : c.argmax.indices) {
    g.push_back(c.tab.gamma[i]);
    w.push_back(c.tab.w0[i]);
  }
  const double rhs = sc.params.theta / c.astar * (c.r0 - 1.0);
  return solve_tau_weighted(g, w, rhs);
}

Prediction predict(const Scenario& sc) {
  model::validate(sc);
  const Classified c = classify(sc);
  Prediction p;

  if (!(c.r0 > 1.0)) {
    p.kind = CaseKind::subcritical;
    p.S_inf = sc.params.lambda / sc.params.theta;
    p.mass_inf = 0.0;
    return p;
  }
  p.S_inf = 1.0 / c.astar;

  if (c.argmax_mass > 0.0) {
    p.kind = CaseKind::case_i;
    std::vector<double> g, w;
    for (std::size_t i : c.argmax.indices) {
      g.push_back(c.tab.gamma[i]);
      w.push_back(c.tab.w0[i]);
    }
    const double rhs = sc.params.theta / c.astar * (c.r0 - 1.0);
    const double tau = solve_tau_weighted(g, w, rhs);
    p.tau = tau;
    DiscreteMeasure on_max = restrict_to(sc.I0, c.argmax);
    std::vector<double> winf(on_max.size());
    for (std::size_t k = 0; k < on_max.size(); ++k)
      winf[k] = std::exp(tau * g[k]) * w[k];
    p.I_inf = on_max.with_weights(std::move(winf));
    p.mass_inf = p.I_inf->total_mass();
    return p;
  }

  if (!sc.maxima.empty()) {
    p.kind = CaseKind::case_ii_finite_maxima;
    const double N = static_cast<double>(sc.dim);
    std::vector<double> ratio(sc.maxima.size());
    double rho = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sc.maxima.size(); ++i) {
      ratio[i] = (N + sc.maxima[i].kappa) / (2.0 * sc.maxima[i].gamma_at);
      rho = std::min(rho, ratio[i]);
    }
    p.rho = rho;
    p.exponents.resize(sc.maxima.size());
    for (std::size_t i = 0; i < sc.maxima.size(); ++i) {
      // gamma_i (rho - ratio_i): exactly zero for the argmin entries
      p.exponents[i] = sc.maxima[i].gamma_at * (rho - ratio[i]);
      if (ratio[i] == rho) p.J.push_back(i);
    }
    // total mass is pinned by stationarity when gamma is shared across J
    bool shared = true;
    for (std::size_t k = 1; k < p.J.size(); ++k)
      if (sc.maxima[p.J[k]].gamma_at != sc.maxima[p.J[0]].gamma_at)
        shared = false;
    if (!p.J.empty() && shared)
      p.mass_inf = sc.params.theta * (c.r0 - 1.0) /
                   (c.astar * sc.maxima[p.J[0]].gamma_at);
    return p;
  }

  p.kind = CaseKind::case_ii_regular;
  if (sc.reg_bound_claimed) {
    const double gstar = model::gamma_star_on(c.tab, c.argmax);
    p.mass_inf = sc.params.theta * (c.r0 - 1.0) / (c.astar * gstar);
  }
  return p;
}

Prediction predict_finite(std::span<const double> alphas,
                          std::span<const double> gammas,
                          std::span<const double> w0s, const ModelParams& params,
                          const std::optional<CountableLimit>& limit) {
  model::validate(params);
  const std::size_t n = alphas.size();
  if (gammas.size() != n || w0s.size() != n)
    throw ArgumentError("predict_finite: size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(gammas[i] > 0.0))
      throw ArgumentError("predict_finite: gamma must be > 0");
    if (!(w0s[i] > 0.0)) throw ArgumentError("predict_finite: w0 must be > 0");
  }

  const double astar =
      limit ? limit->alpha_star : *std::max_element(alphas.begin(), alphas.end());
  const double r0 = params.lambda * astar / params.theta;
  Prediction p;
  if (!(r0 > 1.0)) throw SubcriticalError("predict_finite: R0 <= 1");
  p.S_inf = 1.0 / astar;

  std::vector<double> g, w;
  std::vector<std::size_t> survivors;
  const double tol = model::kArgmaxTol * std::max(1.0, std::abs(astar));
  for (std::size_t i = 0; i < n; ++i)
    if (alphas[i] >= astar - tol) {
      survivors.push_back(i);
      g.push_back(gammas[i]);
      w.push_back(w0s[i]);
    }

  std::vector<measures::Point> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.emplace_back(static_cast<double>(i));

  if (!survivors.empty()) {
    p.kind = CaseKind::case_i;
    const double rhs = params.theta / astar * (r0 - 1.0);
    const double tau = solve_tau_weighted(g, w, rhs);
    p.tau = tau;
    std::vector<double> winf(n, 0.0);
    for (std::size_t k = 0; k < survivors.size(); ++k)
      winf[survivors[k]] = std::exp(tau * g[k]) * w[k];
    p.I_inf = DiscreteMeasure::atomic(pts, winf);
    p.mass_inf = p.I_inf->total_mass();
    p.J = survivors;
    return p;
  }

  // truncated countable tail: alpha_n increases to a declared limit that no
  // component attains
  if (!limit)
    throw CaseError("predict_finite: no survivors and no declared limit");
  p.kind = CaseKind::case_ii_regular;
  p.mass_inf = params.theta * (r0 - 1.0) / (astar * limit->gamma_inf);
  return p;
}

EtaSeries eta_series(const Trajectory& tr, const Scenario& sc) {
  const double astar = model::alpha_star(sc);
  EtaSeries es;
  for (const auto& s : tr.samples) {
    if (!(s.t > 1.0)) continue;
    const double eta = astar * s.B / s.t - 1.0;
    es.t.push_back(s.t);
    es.eta.push_back(eta);
    es.rho_estimate.push_back(s.t * eta / std::log(s.t));
  }
  return es;
}

double loglog_slope(std::span<const double> times,
                    std::span<const double> values, double t_lo, double t_hi) {
  if (times.size() != values.size())
    throw ArgumentError("loglog_slope: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(values[i] > 0.0))
      throw ArgumentError("loglog_slope: values must be positive in window");
    lx.push_back(std::log(times[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 10)
    throw ArgumentError("loglog_slope: fewer than 10 samples in window");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("loglog_slope: degenerate window");
  return sxy / sxx;
}

double selfsimilar_check(const Trajectory& tr, const Scenario& sc,
                         std::size_t max_index, double t, double window_radius,
                         std::size_t min_points) {
  if (sc.dim != 1)
    throw DimensionError("selfsimilar_check: 1D scenarios only");
  if (max_index >= sc.maxima.size())
    throw ArgumentError("selfsimilar_check: maximum index out of range");
  const model::MaximumSpec& mx = sc.maxima[max_index];
  const double astar = model::alpha_star(sc);

  const integrator::ReducedState st = integrator::state_at(tr, t);
  const DiscreteMeasure w = integrator::weights_at(sc, st);

  const double sq = std::sqrt(t);
  const double coef = mx.gamma_at / (2.0 * astar) * mx.alpha_second[0][0];
  std::vector<double> emp, pred;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double dx = w.point(i)[0] - mx.x[0];
    if (std::abs(dx) > window_radius) continue;
    const double z = dx * sq;
    emp.push_back(w.weight(i));
    pred.push_back(std::pow(std::abs(z), mx.kappa) * std::exp(coef * z * z));
  }
  if (emp.size() < min_points)
    throw ResolutionError("selfsimilar_check: window under-resolved");

  const double me = *std::max_element(emp.begin(), emp.end());
  const double mp = *std::max_element(pred.begin(), pred.end());
  if (!(me > 0.0) || !(mp > 0.0))
    throw ResolutionError("selfsimilar_check: empty profile");
  double se = 0.0, sp = 0.0;
  const double n = static_cast<double>(emp.size());
  for (std::size_t i = 0; i < emp.size(); ++i) {
    emp[i] /= me;
    pred[i] /= mp;
    se += emp[i];
    sp += pred[i];
  }
  se /= n;
  sp /= n;
  double cee = 0.0, cpp = 0.0, cep = 0.0;
  for (std::size_t i = 0; i < emp.size(); ++i) {
    cee += (emp[i] - se) * (emp[i] - se);
    cpp += (pred[i] - sp) * (pred[i] - sp);
    cep += (emp[i] - se) * (pred[i] - sp);
  }
  if (!(cee > 0.0) || !(cpp > 0.0))
    throw ResolutionError("selfsimilar_check: constant profile");
  return cep / std::sqrt(cee * cpp);
}

std::vector<double> window_mass_series(const Trajectory& tr,
                                       const measures::Point& center,
                                       double radius) {
  const Scenario& sc = *tr.scenario;
  const model::ScenarioTables tab = model::make_tables(sc);
  std::vector<std::size_t> mask;
  for (std::size_t i = 0; i < sc.I0.size(); ++i)
    if (tab.w0[i] > 0.0 &&
        measures::distance(sc.I0.point(i), center) <= radius)
      mask.push_back(i);
  std::vector<double> out;
  out.reserve(tr.samples.size());
  for (const auto& s : tr.samples) {
    out.push_back(sum_pairwise(mask.size(), [&](std::size_t k) {
      const std::size_t i = mask[k];
      return tab.w0[i] * std::exp(tab.gamma[i] * (tab.alpha[i] * s.B - s.t));
    }));
  }
  return out;
}

OmegaLimitReport omega_limit_check(const Trajectory& tr, const Prediction& pred,
                                   double window_radius,
                                   const OmegaLimitOptions& opts) {
  if (pred.kind != CaseKind::case_ii_finite_maxima)
    throw CaseError("omega_limit_check: needs a case_ii_finite_maxima prediction");
  const Scenario& sc = *tr.scenario;
  OmegaLimitReport rep;
  const double t_end = tr.samples.back().t;
  const double t_tail = t_end * (1.0 - opts.tail_fraction);

  std::vector<std::vector<double>> series;
  for (const auto& m : sc.maxima)
    series.push_back(window_mass_series(tr, m.x, window_radius));

  std::vector<std::size_t> tail_idx;
  for (std::size_t k = 0; k < tr.samples.size(); ++k)
    if (tr.samples[k].t >= t_tail) tail_idx.push_back(k);

  auto median_of = [&](const std::vector<double>& v) {
    std::vector<double> tail;
    for (std::size_t k : tail_idx) tail.push_back(v[k]);
    std::sort(tail.begin(), tail.end());
    return tail.empty() ? 0.0 : tail[tail.size() / 2];
  };

  for (std::size_t i = 0; i < sc.maxima.size(); ++i) {
    const bool in_j = std::find(pred.J.begin(), pred.J.end(), i) != pred.J.end();
    const double last = series[i].back();
    if (in_j) {
      const double med = median_of(series[i]);
      double lo = opts.band_lo * med, hi = opts.band_hi * med;
      bool pass = med > opts.mass_floor;
      for (std::size_t k : tail_idx)
        pass = pass && series[i][k] >= lo && series[i][k] <= hi;
      rep.clauses.push_back(
          {"window_" + std::to_string(i + 1) + "_tail_band", pass, med, lo, hi});
    } else {
      const bool pass = last < opts.off_j_threshold;
      rep.clauses.push_back({"window_" + std::to_string(i + 1) + "_vanishes",
                             pass, last, 0.0, opts.off_j_threshold});
    }
  }

  // leak clause: mass outside the union of windows at the end
  double windows_sum = 0.0;
  for (const auto& s : series) windows_sum += s.back();
  const double leak = tr.samples.back().total_mass - windows_sum;
  rep.clauses.push_back({"mass_outside_windows", leak < opts.leak_threshold,
                         leak, 0.0, opts.leak_threshold});

  for (const auto& c : rep.clauses) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

std::string prediction_to_json(const Prediction& p) {
  nlohmann::json j;
  j["spec_version"] = "1.0";
  j["case"] = to_string(p.kind);
  j["S_inf"] = p.S_inf;
  if (p.tau) j["tau"] = *p.tau;
  if (p.mass_inf) j["mass_inf"] = *p.mass_inf;
  if (p.rho) j["rho"] = *p.rho;
  if (!p.J.empty()) j["J"] = p.J;
  if (!p.exponents.empty()) j["exponents"] = p.exponents;
  if (p.I_inf)
    j["I_inf"] = nlohmann::json::parse(measures::measure_to_json(*p.I_inf));
  return j.dump();
}

}  // namespace selex::asymptotics
