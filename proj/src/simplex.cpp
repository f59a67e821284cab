#include "selex/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "selex/errors.hpp"
#include "selex/summation.hpp"

namespace selex::metric {

namespace {

constexpr double kRcTol = 1e-11;
constexpr double kPivotTol = 1e-11;
constexpr double kDegenerateStep = 1e-13;
constexpr std::size_t kBlandTrigger = 40;
constexpr std::size_t kRefactorEvery = 512;

struct Tableau {
  std::size_t p, q, m;
  const std::vector<double>* s;
  const std::vector<double>* r;
  std::vector<double> cost;   // arc costs, p*q dense (capped arcs excluded by pricing)
  std::vector<std::size_t> basis;
  std::vector<double> binv;   // m x m row-major
  std::vector<double> xb;

  double& B(std::size_t i, std::size_t k) { return binv[i * m + k]; }
  double Bc(std::size_t i, std::size_t k) const { return binv[i * m + k]; }

  std::size_t arc_id(std::size_t i, std::size_t j) const { return i * q + j; }
  bool is_arc(std::size_t id) const { return id < p * q; }

  double col_cost(std::size_t id) const {
    return is_arc(id) ? cost[id] : 1.0;
  }

  // rows touched by a column: arcs hit (i, p+j), slacks a_i hit i, b_j hit p+j
  void col_rows(std::size_t id, std::size_t rows[2], std::size_t& nrows) const {
    if (is_arc(id)) {
      rows[0] = id / q;
      rows[1] = p + id % q;
      nrows = 2;
    } else if (id < p * q + p) {
      rows[0] = id - p * q;
      nrows = 1;
    } else {
      rows[0] = p + (id - p * q - p);
      nrows = 1;
    }
  }

  void refactor() {
    // rebuild binv by Gauss-Jordan on the basis matrix
    std::vector<double> a(m * m, 0.0);
    std::vector<double> inv(m * m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      inv[k * m + k] = 1.0;
      std::size_t rows[2];
      std::size_t nr;
      col_rows(basis[k], rows, nr);
      for (std::size_t t = 0; t < nr; ++t) a[rows[t] * m + k] = 1.0;
    }
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      double best = std::abs(a[col * m + col]);
      for (std::size_t i = col + 1; i < m; ++i)
        if (std::abs(a[i * m + col]) > best) {
          best = std::abs(a[i * m + col]);
          piv = i;
        }
      if (best < 1e-14) throw Error("transport simplex: singular basis");
      if (piv != col) {
        for (std::size_t k = 0; k < m; ++k) {
          std::swap(a[piv * m + k], a[col * m + k]);
          std::swap(inv[piv * m + k], inv[col * m + k]);
        }
      }
      const double s0 = 1.0 / a[col * m + col];
      for (std::size_t k = 0; k < m; ++k) {
        a[col * m + k] *= s0;
        inv[col * m + k] *= s0;
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (i == col) continue;
        const double f = a[i * m + col];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m; ++k) {
          a[i * m + k] -= f * a[col * m + k];
          inv[i * m + k] -= f * inv[col * m + k];
        }
      }
    }
    binv = std::move(inv);
    // xb = binv * b
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < p; ++k) acc += Bc(i, k) * (*s)[k];
      for (std::size_t k = 0; k < q; ++k) acc += Bc(i, p + k) * (*r)[k];
      xb[i] = acc;
    }
  }
};

}  // namespace

TransportResult solve_flat_transport(
    const std::vector<double>& supply, const std::vector<double>& demand,
    const std::function<double(std::size_t, std::size_t)>& dist) {
  Tableau T;
  T.p = supply.size();
  T.q = demand.size();
  T.m = T.p + T.q;
  T.s = &supply;
  T.r = &demand;
  for (double v : supply)
    if (!(v >= 0.0)) throw ArgumentError("transport: negative supply");
  for (double v : demand)
    if (!(v >= 0.0)) throw ArgumentError("transport: negative demand");

  TransportResult res;
  if (T.m == 0) return res;

  T.cost.resize(T.p * T.q);
  for (std::size_t i = 0; i < T.p; ++i)
    for (std::size_t j = 0; j < T.q; ++j) T.cost[T.arc_id(i, j)] = dist(i, j);

  // initial basis: all-disposal/creation, B = I
  T.basis.resize(T.m);
  for (std::size_t i = 0; i < T.p; ++i) T.basis[i] = T.p * T.q + i;
  for (std::size_t j = 0; j < T.q; ++j) T.basis[T.p + j] = T.p * T.q + T.p + j;
  T.binv.assign(T.m * T.m, 0.0);
  for (std::size_t i = 0; i < T.m; ++i) T.B(i, i) = 1.0;
  T.xb.resize(T.m);
  for (std::size_t i = 0; i < T.p; ++i) T.xb[i] = supply[i];
  for (std::size_t j = 0; j < T.q; ++j) T.xb[T.p + j] = demand[j];

  std::vector<double> y(T.m);
  std::vector<double> u(T.m);
  std::size_t degenerate_streak = 0;
  bool bland = false;
  double last_obj = std::numeric_limits<double>::infinity();
  const std::size_t max_iter = 2000 + 200 * T.m * T.m;

  while (true) {
    if (res.iterations > max_iter)
      throw Error("transport simplex: iteration limit exceeded");
    if (res.iterations > 0 && res.iterations % kRefactorEvery == 0) T.refactor();

    // y^T = c_B^T B^-1
    for (std::size_t k = 0; k < T.m; ++k) {
      double acc = 0.0;
      for (std::size_t l = 0; l < T.m; ++l)
        acc += T.col_cost(T.basis[l]) * T.Bc(l, k);
      y[k] = acc;
    }

    // price: arcs with d >= 2 never beat disposal+creation and are skipped
    std::size_t enter = static_cast<std::size_t>(-1);
    double best_rc = -kRcTol;
    auto consider = [&](std::size_t id, double rc) {
      if (bland) {
        if (rc < -kRcTol && (enter == static_cast<std::size_t>(-1) || id < enter))
          enter = id;
      } else if (rc < best_rc) {
        best_rc = rc;
        enter = id;
      }
    };
    for (std::size_t i = 0; i < T.p; ++i) {
      const double yi = y[i];
      for (std::size_t j = 0; j < T.q; ++j) {
        const double d = T.cost[T.arc_id(i, j)];
        if (d >= 2.0) continue;
        consider(T.arc_id(i, j), d - yi - y[T.p + j]);
      }
    }
    for (std::size_t i = 0; i < T.p; ++i)
      consider(T.p * T.q + i, 1.0 - y[i]);
    for (std::size_t j = 0; j < T.q; ++j)
      consider(T.p * T.q + T.p + j, 1.0 - y[T.p + j]);

    if (enter == static_cast<std::size_t>(-1)) break;  // optimal

    // direction u = B^-1 A_enter
    std::size_t rows[2];
    std::size_t nr;
    T.col_rows(enter, rows, nr);
    for (std::size_t k = 0; k < T.m; ++k) {
      double acc = T.Bc(k, rows[0]);
      if (nr == 2) acc += T.Bc(k, rows[1]);
      u[k] = acc;
    }

    // ratio test, Bland tie-break on the basis column id
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = static_cast<std::size_t>(-1);
    for (std::size_t k = 0; k < T.m; ++k) {
      if (u[k] > kPivotTol) {
        const double ratio = T.xb[k] / u[k];
        if (ratio < theta - 1e-15 ||
            (ratio < theta + 1e-15 &&
             (leave == static_cast<std::size_t>(-1) ||
              T.basis[k] < T.basis[leave]))) {
          theta = ratio;
          leave = k;
        }
      }
    }
    if (leave == static_cast<std::size_t>(-1))
      throw Error("transport simplex: unbounded direction");

    if (theta <= kDegenerateStep) {
      if (++degenerate_streak > kBlandTrigger && !bland) {
        bland = true;
        last_obj = 0.0;
        for (std::size_t k = 0; k < T.m; ++k)
          last_obj += T.col_cost(T.basis[k]) * T.xb[k];
      }
    } else {
      degenerate_streak = 0;
    }

    // pivot: update xb and binv
    for (std::size_t k = 0; k < T.m; ++k)
      if (k != leave) T.xb[k] -= theta * u[k];
    T.xb[leave] = theta;
    const double piv = u[leave];
    for (std::size_t k = 0; k < T.m; ++k) T.B(leave, k) /= piv;
    for (std::size_t k = 0; k < T.m; ++k) {
      if (k == leave) continue;
      const double f = u[k];
      if (f == 0.0) continue;
      for (std::size_t l = 0; l < T.m; ++l) T.B(k, l) -= f * T.B(leave, l);
    }
    T.basis[leave] = enter;
    ++res.iterations;

    if (bland) {
      double obj = 0.0;
      for (std::size_t k = 0; k < T.m; ++k)
        obj += T.col_cost(T.basis[k]) * T.xb[k];
      if (obj < last_obj - 1e-13) {
        bland = false;
        degenerate_streak = 0;
        last_obj = obj;
      }
    }
  }

  // primal value, dual value, feasibility residual
  ExactSum primal;
  for (std::size_t k = 0; k < T.m; ++k) {
    if (T.xb[k] < -1e-9) throw Error("transport simplex: negative basic value");
    primal.add(T.col_cost(T.basis[k]) * std::max(0.0, T.xb[k]));
  }
  ExactSum dual;
  for (std::size_t i = 0; i < T.p; ++i) dual.add(y[i] * supply[i]);
  for (std::size_t j = 0; j < T.q; ++j) dual.add(y[T.p + j] * demand[j]);
  res.value = primal.value();
  res.gap = std::abs(res.value - dual.value());

  std::vector<double> lhs(T.m, 0.0);
  for (std::size_t k = 0; k < T.m; ++k) {
    std::size_t rows[2];
    std::size_t nr;
    T.col_rows(T.basis[k], rows, nr);
    for (std::size_t t = 0; t < nr; ++t) lhs[rows[t]] += T.xb[k];
  }
  double resid = 0.0;
  for (std::size_t i = 0; i < T.p; ++i)
    resid = std::max(resid, std::abs(lhs[i] - supply[i]));
  for (std::size_t j = 0; j < T.q; ++j)
    resid = std::max(resid, std::abs(lhs[T.p + j] - demand[j]));
  res.residual = resid;
  return res;
}

}  // namespace selex::metric
