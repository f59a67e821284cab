#include "selex/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "selex/summation.hpp"
#include "json.hpp"

namespace selex::measures {

SupportSet SupportSet::of(std::vector<std::size_t> idx,
                          std::size_t support_size) {
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
    throw ArgumentError("support set has duplicate indices");
  if (!idx.empty() && idx.back() >= support_size)
    throw ArgumentError("support set index out of range");
  return SupportSet{std::move(idx)};
}

SupportSet SupportSet::all(std::size_t support_size) {
  std::vector<std::size_t> idx(support_size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return SupportSet{std::move(idx)};
}

SupportSet complement(const SupportSet& s, std::size_t support_size) {
  std::vector<std::size_t> idx;
  idx.reserve(support_size - s.indices.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < support_size; ++i) {
    if (k < s.indices.size() && s.indices[k] == i) {
      ++k;
    } else {
      idx.push_back(i);
    }
  }
  return SupportSet{std::move(idx)};
}

DiscreteMeasure::DiscreteMeasure(Kind kind, std::vector<Point> points,
                                 std::vector<double> weights,
                                 std::vector<double> cell_volumes)
    : kind_(kind),
      dim_(points.empty() ? 1 : points.front().dim()),
      points_(std::move(points)),
      weights_(std::move(weights)),
      cell_volumes_(std::move(cell_volumes)) {
  validate();
}

DiscreteMeasure DiscreteMeasure::atomic(std::vector<Point> points,
                                        std::vector<double> weights) {
  return DiscreteMeasure(Kind::atomic, std::move(points), std::move(weights),
                         {});
}

DiscreteMeasure DiscreteMeasure::grid(std::vector<Point> points,
                                      std::vector<double> weights,
                                      std::vector<double> cell_volumes) {
  return DiscreteMeasure(Kind::grid, std::move(points), std::move(weights),
                         std::move(cell_volumes));
}

DiscreteMeasure DiscreteMeasure::grid_from_density(
    std::vector<Point> points, const std::vector<double>& densities,
    std::vector<double> cell_volumes) {
  if (densities.size() != cell_volumes.size())
    throw ArgumentError("grid_from_density: size mismatch");
  std::vector<double> weights(densities.size());
  for (std::size_t i = 0; i < densities.size(); ++i)
    weights[i] = densities[i] * cell_volumes[i];
  return DiscreteMeasure(Kind::grid, std::move(points), std::move(weights),
                         std::move(cell_volumes));
}

void DiscreteMeasure::validate() const {
  if (points_.size() != weights_.size())
    throw ArgumentError("measure: points/weights size mismatch");
  for (const Point& p : points_)
    if (p.dim() != dim_)
      throw DimensionError("measure: mixed point dimensions");
  for (double w : weights_)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ArgumentError("measure: weights must be finite and >= 0");
  if (kind_ == Kind::grid) {
    if (cell_volumes_.size() != points_.size())
      throw ArgumentError("measure: cell_volumes size mismatch");
    for (double v : cell_volumes_)
      if (!(v > 0.0) || !std::isfinite(v))
        throw ArgumentError("measure: cell volumes must be finite and > 0");
    // Disjointness check. In 1D the cell extent is the volume; in 2D cells
    // are assumed square with side sqrt(volume) (all builders emit uniform
    // square cells).
    if (dim_ == 1) {
      std::vector<std::size_t> order(points_.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return points_[a][0] < points_[b][0];
      });
      for (std::size_t k = 1; k < order.size(); ++k) {
        const std::size_t a = order[k - 1], b = order[k];
        const double gap = points_[b][0] - points_[a][0];
        const double need = 0.5 * (cell_volumes_[a] + cell_volumes_[b]);
        if (gap < need * (1.0 - 1e-9))
          throw ArgumentError("measure: overlapping 1D cells");
      }
    } else {
      std::vector<std::size_t> order(points_.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points_[a][0] != points_[b][0]) return points_[a][0] < points_[b][0];
        return points_[a][1] < points_[b][1];
      });
      for (std::size_t k = 1; k < order.size(); ++k) {
        const std::size_t a = order[k - 1], b = order[k];
        const double side =
            0.5 * (std::sqrt(cell_volumes_[a]) + std::sqrt(cell_volumes_[b]));
        if (std::abs(points_[b][0] - points_[a][0]) < side * (1.0 - 1e-9) &&
            std::abs(points_[b][1] - points_[a][1]) < side * (1.0 - 1e-9))
          throw ArgumentError("measure: overlapping 2D cells");
      }
    }
  } else if (!cell_volumes_.empty()) {
    throw ArgumentError("measure: atomic measures carry no cell volumes");
  }
}

DiscreteMeasure DiscreteMeasure::with_weights(
    std::vector<double> weights) const {
  return DiscreteMeasure(kind_, points_, std::move(weights), cell_volumes_);
}

double DiscreteMeasure::total_mass() const { return sum_exact(weights_); }

double total_mass(const DiscreteMeasure& mu) { return mu.total_mass(); }

double integrate(const DiscreteMeasure& mu,
                 const std::function<double(const Point&)>& f) {
  ExactSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double v = f(mu.point(i));
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrate: non-finite integrand at support point (";
      for (int k = 0; k < mu.dim(); ++k)
        msg << (k ? ", " : "") << mu.point(i)[k];
      msg << ")";
      throw EvaluationError(msg.str());
    }
    s.add(v * mu.weight(i));
  }
  return s.value();
}

DiscreteMeasure restrict_to(const DiscreteMeasure& mu, const SupportSet& s) {
  if (!s.indices.empty() && s.indices.back() >= mu.size())
    throw ArgumentError("restrict_to: index out of range");
  std::vector<Point> pts;
  std::vector<double> w;
  std::vector<double> vols;
  pts.reserve(s.size());
  w.reserve(s.size());
  for (std::size_t i : s.indices) {
    pts.push_back(mu.point(i));
    w.push_back(mu.weight(i));
    if (mu.kind() == Kind::grid) vols.push_back(mu.cell_volume(i));
  }
  return mu.kind() == Kind::grid
             ? DiscreteMeasure::grid(std::move(pts), std::move(w),
                                     std::move(vols))
             : DiscreteMeasure::atomic(std::move(pts), std::move(w));
}

DiscreteMeasure pushforward_1d(const DiscreteMeasure& mu,
                               const std::function<double(const Point&)>& g,
                               const std::vector<double>& bin_edges) {
  if (bin_edges.size() < 2)
    throw ArgumentError("pushforward_1d: need at least one bin");
  for (std::size_t k = 1; k < bin_edges.size(); ++k)
    if (!(bin_edges[k] > bin_edges[k - 1]))
      throw ArgumentError("pushforward_1d: bin edges must be increasing");

  const std::size_t nbins = bin_edges.size() - 1;
  std::vector<ExactSum> acc(nbins);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double y = g(mu.point(i));
    if (!std::isfinite(y))
      throw EvaluationError("pushforward_1d: non-finite map value");
    if (y < bin_edges.front() || y > bin_edges.back()) {
      std::ostringstream msg;
      msg << "pushforward_1d: value " << y << " outside bin range ["
          << bin_edges.front() << ", " << bin_edges.back() << "]";
      throw CoverageError(msg.str());
    }
    auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), y);
    std::size_t b = static_cast<std::size_t>(it - bin_edges.begin());
    b = (b == 0) ? 0 : b - 1;
    if (b >= nbins) b = nbins - 1;  // y == last edge
    acc[b].add(mu.weight(i));
  }

  std::vector<Point> centers;
  std::vector<double> w(nbins);
  std::vector<double> widths(nbins);
  centers.reserve(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    centers.emplace_back(0.5 * (bin_edges[b] + bin_edges[b + 1]));
    widths[b] = bin_edges[b + 1] - bin_edges[b];
    w[b] = acc[b].value();
  }
  return DiscreteMeasure::grid(std::move(centers), std::move(w),
                               std::move(widths));
}

double ball_mass(const DiscreteMeasure& mu, const Point& center,
                 double radius) {
  if (!(radius > 0.0)) throw ArgumentError("ball_mass: radius must be > 0");
  ExactSum s;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (distance(mu.point(i), center) <= radius) s.add(mu.weight(i));
  return s.value();
}

DiscreteMeasure prune(const DiscreteMeasure& mu, double threshold) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu.weight(i) > threshold) keep.push_back(i);
  return restrict_to(mu, SupportSet{std::move(keep)});
}

Cdf1D::Cdf1D(std::vector<Knot> knots) : knots_(std::move(knots)) {}

double Cdf1D::value(double x) const {
  if (knots_.empty()) return 0.0;
  if (x < knots_.front().x) return 0.0;
  if (x >= knots_.back().x) return knots_.back().f_right;
  // last knot with knot.x <= x
  auto it = std::upper_bound(
      knots_.begin(), knots_.end(), x,
      [](double v, const Knot& k) { return v < k.x; });
  const Knot& a = *(it - 1);
  const Knot& b = *it;
  if (x == a.x) return a.f_right;
  const double t = (x - a.x) / (b.x - a.x);
  return a.f_right + t * (b.f_left - a.f_right);
}

double Cdf1D::total() const {
  return knots_.empty() ? 0.0 : knots_.back().f_right;
}

Cdf1D cdf_1d(const DiscreteMeasure& mu) {
  if (mu.dim() != 1) throw DimensionError("cdf_1d: measure must be 1D");
  // events: (x, jump) for atoms, (lo, hi, mass) ramps for cells
  struct Event {
    double x;
    double jump;       // mass landing exactly at x
    double ramp_rate;  // density change: +d at lo, -d at hi
  };
  std::vector<Event> ev;
  ev.reserve(2 * mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double xi = mu.point(i)[0];
    const double w = mu.weight(i);
    if (mu.kind() == Kind::atomic) {
      ev.push_back({xi, w, 0.0});
    } else {
      const double h = mu.cell_volume(i);
      ev.push_back({xi - 0.5 * h, 0.0, w / h});
      ev.push_back({xi + 0.5 * h, 0.0, -w / h});
    }
  }
  std::sort(ev.begin(), ev.end(),
            [](const Event& a, const Event& b) { return a.x < b.x; });

  std::vector<Cdf1D::Knot> knots;
  double F = 0.0;
  double density = 0.0;
  std::size_t i = 0;
  double prev_x = 0.0;
  bool have_prev = false;
  while (i < ev.size()) {
    const double x = ev[i].x;
    if (have_prev) F += density * (x - prev_x);
    double jump = 0.0;
    double drate = 0.0;
    while (i < ev.size() && ev[i].x == x) {
      jump += ev[i].jump;
      drate += ev[i].ramp_rate;
      ++i;
    }
    knots.push_back({x, F, F + jump});
    F += jump;
    density += drate;
    prev_x = x;
    have_prev = true;
  }
  return Cdf1D(std::move(knots));
}

std::string measure_to_json(const DiscreteMeasure& mu) {
  nlohmann::json j;
  j["dim"] = mu.dim();
  j["kind"] = mu.kind() == Kind::grid ? "grid" : "atomic";
  nlohmann::json pts = nlohmann::json::array();
  for (const Point& p : mu.points()) {
    nlohmann::json c = nlohmann::json::array();
    for (int k = 0; k < p.dim(); ++k) c.push_back(p[k]);
    pts.push_back(std::move(c));
  }
  j["points"] = std::move(pts);
  j["weights"] = mu.weights();
  if (mu.kind() == Kind::grid) j["cell_volumes"] = mu.cell_volumes();
  return j.dump();
}

DiscreteMeasure measure_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const int dim = j.at("dim").get<int>();
  if (dim != 1 && dim != 2)
    throw DimensionError("measure_from_json: dim must be 1 or 2");
  std::vector<Point> pts;
  for (const auto& c : j.at("points")) {
    std::vector<double> coords = c.get<std::vector<double>>();
    if (static_cast<int>(coords.size()) != dim)
      throw DimensionError("measure_from_json: point/dim mismatch");
    pts.push_back(Point::of(coords));
  }
  auto weights = j.at("weights").get<std::vector<double>>();
  if (j.at("kind").get<std::string>() == "grid") {
    auto vols = j.at("cell_volumes").get<std::vector<double>>();
    return DiscreteMeasure::grid(std::move(pts), std::move(weights),
                                 std::move(vols));
  }
  return DiscreteMeasure::atomic(std::move(pts), std::move(weights));
}

}  // namespace selex::measures
