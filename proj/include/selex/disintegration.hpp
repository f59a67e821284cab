#pragma once

#include <iosfwd>
#include <vector>

#include "selex/model.hpp"

namespace selex::disintegration {

using measures::DiscreteMeasure;
using model::Scenario;

// Image measure of I0 under alpha, bucketed into the given bins.
DiscreteMeasure image_measure(const Scenario& sc,
                              const std::vector<double>& bin_edges);

// Density of the image measure by the 1D coarea formula:
// density(y) = sum over alpha^{-1}(y) of I0(x)/|alpha'(x)|, alpha' by
// central differences on the scenario grid. Values near critical points
// (|alpha'| below the threshold) are flagged invalid rather than
// regularized.
struct CoareaDensity {
  std::vector<double> y;
  std::vector<double> density;
  std::vector<bool> valid;
};

CoareaDensity coarea_density_1d(const Scenario& sc,
                                const std::vector<double>& y_grid,
                                double derivative_threshold = 1e-6);

void write_coarea_csv(const CoareaDensity& cd, std::ostream& out);

}  // namespace selex::disintegration
