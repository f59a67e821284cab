#include "selex/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "selex/simplex.hpp"
#include "selex/summation.hpp"

namespace selex::metric {

namespace {

struct SignedSupport {
  std::vector<Point> points;
  std::vector<double> net;  // mu - nu
};

// Union support with coordinates matched within match_tol.
SignedSupport union_support(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, double match_tol) {
  if (!mu.empty() && !nu.empty() && mu.dim() != nu.dim())
    throw DimensionError("metric: measures have different dimensions");
  struct Entry {
    Point p;
    double w;
  };
  std::vector<Entry> all;
  all.reserve(mu.size() + nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    all.push_back({mu.point(i), mu.weight(i)});
  for (std::size_t i = 0; i < nu.size(); ++i)
    all.push_back({nu.point(i), -nu.weight(i)});
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    for (int k = 0; k < a.p.dim(); ++k) {
      if (a.p[k] != b.p[k]) return a.p[k] < b.p[k];
    }
    return false;
  });
  SignedSupport out;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    ExactSum acc;
    while (j < all.size() && almost_equal(all[j].p, all[i].p, match_tol)) {
      acc.add(all[j].w);
      ++j;
    }
    out.points.push_back(all[i].p);
    out.net.push_back(acc.value());
    i = j;
  }
  return out;
}

}  // namespace

LPProblem LPProblem::build(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           double match_tol) {
  SignedSupport us = union_support(mu, nu, match_tol);
  LPProblem lp;
  for (std::size_t k = 0; k < us.points.size(); ++k) {
    if (us.net[k] == 0.0) continue;
    lp.points.push_back(us.points[k]);
    lp.objective.push_back(us.net[k]);
  }
  const std::size_t n = lp.points.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(lp.points[i], lp.points[j]);
      if (d < 2.0 * lp.box_bound)
        lp.pairs.push_back({static_cast<std::uint32_t>(i),
                            static_cast<std::uint32_t>(j), d});
    }
  return lp;
}

bool LPProblem::feasible(const std::vector<double>& f, double tol) const {
  if (f.size() != points.size()) return false;
  for (double v : f)
    if (std::abs(v) > box_bound + tol) return false;
  for (const Pair& pr : pairs)
    if (std::abs(f[pr.i] - f[pr.j]) > pr.dist + tol) return false;
  return true;
}

double LPProblem::value_of(const std::vector<double>& f) const {
  ExactSum s;
  for (std::size_t k = 0; k < f.size(); ++k) s.add(objective[k] * f[k]);
  return s.value();
}

std::pair<DiscreteMeasure, DiscreteMeasure> coarsen_pair(
    const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t cap) {
  if (cap == 0) throw ArgumentError("coarsen_pair: cap must be > 0");
  const int dim = mu.empty() ? nu.dim() : mu.dim();
  double lo[2] = {std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
  double hi[2] = {-std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  auto scan = [&](const DiscreteMeasure& m) {
    for (std::size_t i = 0; i < m.size(); ++i)
      for (int k = 0; k < dim; ++k) {
        lo[k] = std::min(lo[k], m.point(i)[k]);
        hi[k] = std::max(hi[k], m.point(i)[k]);
      }
  };
  scan(mu);
  scan(nu);

  const std::size_t per_axis =
      dim == 1 ? cap
               : static_cast<std::size_t>(std::sqrt(static_cast<double>(cap)));
  auto block_of = [&](const Point& p) {
    std::size_t id = 0;
    for (int k = 0; k < dim; ++k) {
      const double span = hi[k] - lo[k];
      std::size_t b = 0;
      if (span > 0.0) {
        b = static_cast<std::size_t>(
            std::floor((p[k] - lo[k]) / span * static_cast<double>(per_axis)));
        if (b >= per_axis) b = per_axis - 1;
      }
      id = id * per_axis + b;
    }
    return id;
  };

  struct Block {
    ExactSum w_mu, w_nu;
    double cx[2] = {0.0, 0.0};  // combined-mass-weighted centroid accumulator
    double cw = 0.0;
  };
  std::map<std::size_t, Block> blocks;
  auto deposit = [&](const DiscreteMeasure& m, bool is_mu) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double w = m.weight(i);
      Block& b = blocks[block_of(m.point(i))];
      (is_mu ? b.w_mu : b.w_nu).add(w);
      for (int k = 0; k < dim; ++k) b.cx[k] += w * m.point(i)[k];
      b.cw += w;
    }
  };
  deposit(mu, true);
  deposit(nu, false);

  std::vector<Point> pts;
  std::vector<double> wa, wb;
  for (auto& [id, b] : blocks) {
    (void)id;
    if (b.cw <= 0.0) continue;
    const double x = b.cx[0] / b.cw;
    pts.push_back(dim == 1 ? Point(x) : Point(x, b.cx[1] / b.cw));
    wa.push_back(b.w_mu.value());
    wb.push_back(b.w_nu.value());
  }
  return {DiscreteMeasure::atomic(pts, wa), DiscreteMeasure::atomic(pts, wb)};
}

D0Result d0_full(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                 const D0Options& opts) {
  DiscreteMeasure a = prune(mu);
  DiscreteMeasure b = prune(nu);
  D0Result res;
  if (a.size() + b.size() > opts.support_cap) {
    if (!opts.allow_coarsen)
      throw CapacityError("d0: combined support exceeds cap with coarsening disabled");
    std::tie(a, b) = coarsen_pair(a, b, opts.support_cap / 2);
    res.coarsened = true;
  }

  SignedSupport us = union_support(a, b, opts.match_tol);
  std::vector<Point> ppts, qpts;
  std::vector<double> s, r;
  for (std::size_t k = 0; k < us.points.size(); ++k) {
    if (us.net[k] > 0.0) {
      ppts.push_back(us.points[k]);
      s.push_back(us.net[k]);
    } else if (us.net[k] < 0.0) {
      qpts.push_back(us.points[k]);
      r.push_back(-us.net[k]);
    }
  }

  // distance cache for pricing
  const std::size_t p = ppts.size(), q = qpts.size();
  std::vector<double> dmat(p * q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j)
      dmat[i * q + j] = distance(ppts[i], qpts[j]);

  TransportResult tr = solve_flat_transport(
      s, r, [&](std::size_t i, std::size_t j) { return dmat[i * q + j]; });
  if (tr.gap > opts.gap_tol * (1.0 + std::abs(tr.value)) ||
      tr.residual > opts.gap_tol * 10.0)
    throw Error("d0: LP certificate beyond tolerance");
  res.value = tr.value;
  res.gap = tr.gap;
  return res;
}

double d0(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return d0_full(mu, nu).value;
}

namespace {

double cdf_left_value(const measures::Cdf1D& F, double x) {
  // F(x-): drop the jump at x if x is a knot
  const auto& ks = F.knots();
  auto it = std::lower_bound(
      ks.begin(), ks.end(), x,
      [](const measures::Cdf1D::Knot& k, double v) { return k.x < v; });
  if (it != ks.end() && it->x == x) return it->f_left;
  return F.value(x);
}

}  // namespace

double w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != 1 || nu.dim() != 1)
    throw DimensionError("w1_1d: both measures must be 1D");
  const double ma = total_mass(mu), mb = total_mass(nu);
  if (std::abs(ma - mb) > 1e-12)
    throw ArgumentError("w1_1d: measures must have equal mass");
  const measures::Cdf1D Fa = cdf_1d(mu);
  const measures::Cdf1D Fb = cdf_1d(nu);
  std::vector<double> xs;
  for (const auto& k : Fa.knots()) xs.push_back(k.x);
  for (const auto& k : Fb.knots()) xs.push_back(k.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  ExactSum area;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double a = xs[k], b = xs[k + 1];
    const double L = b - a;
    const double d0v = Fa.value(a) - Fb.value(a);
    const double d1v = cdf_left_value(Fa, b) - cdf_left_value(Fb, b);
    if (d0v == 0.0 && d1v == 0.0) continue;
    if (d0v * d1v >= 0.0) {
      area.add(0.5 * (std::abs(d0v) + std::abs(d1v)) * L);
    } else {
      // sign change: two triangles around the zero crossing
      area.add(0.5 * L * (d0v * d0v + d1v * d1v) /
               (std::abs(d0v) + std::abs(d1v)));
    }
  }
  return area.value();
}

double av_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   double match_tol) {
  SignedSupport us = union_support(mu, nu, match_tol);
  ExactSum s;
  for (double v : us.net) s.add(std::abs(v));
  return s.value();
}

namespace {

double dist_to_set(const Point& x, const std::vector<Point>& K,
                   std::size_t* arg = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0;
  for (std::size_t k = 0; k < K.size(); ++k) {
    const double d = distance(x, K[k]);
    if (d < best) {  // strict: ties keep the lowest index
      best = d;
      bi = k;
    }
  }
  if (arg) *arg = bi;
  return best;
}

}  // namespace

ConcentrationBounds concentration_bounds(const DiscreteMeasure& mu,
                                         const std::vector<Point>& K,
                                         const D0Options& opts) {
  if (K.empty()) throw ArgumentError("concentration_bounds: K is empty");
  ConcentrationBounds out;
  ExactSum lo;
  std::vector<double> proj_w(K.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::size_t arg = 0;
    const double d = dist_to_set(mu.point(i), K, &arg);
    lo.add(mu.weight(i) * std::min(1.0, d));
    proj_w[arg] += mu.weight(i);
  }
  out.lower = lo.value();
  DiscreteMeasure projected = DiscreteMeasure::atomic(K, proj_w);
  D0Result d = d0_full(mu, projected, opts);
  out.upper = d.value;
  out.coarsened = d.coarsened;
  return out;
}

double set_distance_exact(const DiscreteMeasure& mu,
                          const std::vector<Point>& K) {
  if (K.empty()) throw ArgumentError("set_distance_exact: K is empty");
  ExactSum s;
  for (std::size_t i = 0; i < mu.size(); ++i)
    s.add(mu.weight(i) * std::min(1.0, dist_to_set(mu.point(i), K)));
  return s.value();
}

}  // namespace selex::metric
