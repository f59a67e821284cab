#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace selex::metric {

// Transportation problem with unit-cost disposal and creation:
//
//   min  sum_ij d(i,j) x_ij + sum_i a_i + sum_j b_j
//   s.t. sum_j x_ij + a_i = s_i,   sum_i x_ij + b_j = r_j,   all vars >= 0.
//
// This is the LP dual of the bounded-Lipschitz objective
// sup { sum c_k f_k : |f_k| <= 1, f_k - f_l <= d(k,l) } with c split into
// positive part s and negative part r; metric costs let all flow run
// directly between opposite-sign nodes, and the unit disposal/creation
// columns realize the box constraint. Solved by a revised simplex with
// Dantzig pricing and Bland's rule as the anti-cycling fallback.
struct TransportResult {
  double value = 0.0;
  double gap = 0.0;        // |primal - dual| after termination
  double residual = 0.0;   // max constraint violation of the returned basis
  std::size_t iterations = 0;
};

TransportResult solve_flat_transport(
    const std::vector<double>& supply, const std::vector<double>& demand,
    const std::function<double(std::size_t, std::size_t)>& dist);

}  // namespace selex::metric
