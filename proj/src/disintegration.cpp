#include "selex/disintegration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace selex::disintegration {

DiscreteMeasure image_measure(const Scenario& sc,
                              const std::vector<double>& bin_edges) {
  return measures::pushforward_1d(
      sc.I0, [&](const measures::Point& p) { return sc.alpha(p); }, bin_edges);
}

CoareaDensity coarea_density_1d(const Scenario& sc,
                                const std::vector<double>& y_grid,
                                double derivative_threshold) {
  if (sc.dim != 1) throw DimensionError("coarea_density_1d: 1D only");
  if (sc.I0.kind() != measures::Kind::grid)
    throw ArgumentError("coarea_density_1d: needs a grid (L1 density) measure");
  const std::size_t n = sc.I0.size();
  if (n < 3) throw ArgumentError("coarea_density_1d: grid too small");

  // sort support by coordinate, tabulate alpha, density, alpha'
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sc.I0.point(a)[0] < sc.I0.point(b)[0];
  });
  std::vector<double> x(n), av(n), dens(n), da(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    x[k] = sc.I0.point(i)[0];
    av[k] = sc.alpha(sc.I0.point(i));
    dens[k] = sc.I0.weight(i) / sc.I0.cell_volume(i);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t l = k == 0 ? 0 : k - 1;
    const std::size_t r = k == n - 1 ? n - 1 : k + 1;
    da[k] = (av[r] - av[l]) / (x[r] - x[l]);
  }

  CoareaDensity cd;
  cd.y = y_grid;
  cd.density.assign(y_grid.size(), 0.0);
  cd.valid.assign(y_grid.size(), true);
  for (std::size_t yi = 0; yi < y_grid.size(); ++yi) {
    const double y = y_grid[yi];
    double total = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double f0 = av[k] - y, f1 = av[k + 1] - y;
      if (f0 == 0.0 && f1 == 0.0) {
        ok = false;  // plateau at this level: critical
        continue;
      }
      const bool crossing = (f0 <= 0.0 && f1 > 0.0) || (f0 >= 0.0 && f1 < 0.0);
      if (!crossing) continue;
      const double th = f0 / (f0 - f1);
      const double dcross = da[k] + th * (da[k + 1] - da[k]);
      const double icross = dens[k] + th * (dens[k + 1] - dens[k]);
      if (std::abs(dcross) < derivative_threshold) {
        ok = false;
        continue;
      }
      total += icross / std::abs(dcross);
    }
    cd.density[yi] = total;
    cd.valid[yi] = ok;
  }
  return cd;
}

void write_coarea_csv(const CoareaDensity& cd, std::ostream& out) {
  out << "y,density,flag\n";
  char buf[64];
  for (std::size_t i = 0; i < cd.y.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", cd.y[i], cd.density[i],
                  cd.valid[i] ? 0 : 1);
    out << buf;
  }
}

}  // namespace selex::disintegration
