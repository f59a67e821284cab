#pragma once

#include <cstdint>
#include <vector>

#include "selex/measure.hpp"

namespace selex::metric {

using measures::DiscreteMeasure;
using measures::Point;

// Statement of the bounded-Lipschitz LP on a union support:
// maximize sum objective_k f_k over |f_k| <= box_bound and
// |f_i - f_j| <= pairs.dist. Pairs with dist >= 2 box_bound are pruned
// (implied by the box constraints).
struct LPProblem {
  struct Pair {
    std::uint32_t i, j;
    double dist;
  };

  std::vector<Point> points;
  std::vector<double> objective;
  std::vector<Pair> pairs;
  double box_bound = 1.0;

  static LPProblem build(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         double match_tol = 1e-12);

  bool feasible(const std::vector<double>& f, double tol = 1e-9) const;
  double value_of(const std::vector<double>& f) const;
};

struct D0Options {
  std::size_t support_cap = 500;  // after pruning zero weights
  bool allow_coarsen = true;
  double gap_tol = 1e-9;
  double match_tol = 1e-12;
};

struct D0Result {
  double value = 0.0;
  bool coarsened = false;
  double gap = 0.0;
};

// Kantorovich-Rubinstein distance between finite nonnegative measures.
D0Result d0_full(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                 const D0Options& opts = {});
double d0(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Exact area between the 1D CDFs; equals d0 for equal-mass measures with
// support diameter <= 2.
double w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Absolute-variation distance on the union support.
double av_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   double match_tol = 1e-12);

struct ConcentrationBounds {
  double lower = 0.0;  // integral of min(1, d(x,K)) dmu; attained, so exact
  double upper = 0.0;  // d0(mu, nearest-point pushforward onto K)
  bool coarsened = false;
};

// Certified interval around d0(mu, M+(K)) for a finite point set K.
ConcentrationBounds concentration_bounds(const DiscreteMeasure& mu,
                                         const std::vector<Point>& K,
                                         const D0Options& opts = {});

// The set-distance LP min over nu supported on K of d0(mu, nu) separates
// per source point into transport-or-destroy, so it evaluates in closed
// form. Returns the same value as the lower bound above.
double set_distance_exact(const DiscreteMeasure& mu,
                          const std::vector<Point>& K);

// Mass-preserving aggregation of a pair of measures onto a common block
// partition with at most `cap` occupied blocks. Block representatives are
// combined-mass centroids.
std::pair<DiscreteMeasure, DiscreteMeasure> coarsen_pair(
    const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t cap);

}  // namespace selex::metric
