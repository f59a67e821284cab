#pragma once

#include <functional>
#include <string>
#include <vector>

#include "selex/point.hpp"

namespace selex::measures {

enum class Kind { atomic, grid };

// Subset of support-point indices of a DiscreteMeasure (argmax sets,
// superlevel sets, balls). Stored sorted and duplicate-free.
struct SupportSet {
  std::vector<std::size_t> indices;

  static SupportSet of(std::vector<std::size_t> idx, std::size_t support_size);
  static SupportSet all(std::size_t support_size);
  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

SupportSet complement(const SupportSet& s, std::size_t support_size);

// Finite nonnegative measure on R^N as weighted support points. Grid-kind
// measures carry the cell volume per point; the weight is density x volume,
// precomputed at construction. Immutable after construction: every
// operation returns a new measure. Zero-weight points are retained so the
// support structure survives evolution; prune() drops them explicitly.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  static DiscreteMeasure atomic(std::vector<Point> points,
                                std::vector<double> weights);
  static DiscreteMeasure grid(std::vector<Point> points,
                              std::vector<double> weights,
                              std::vector<double> cell_volumes);
  static DiscreteMeasure grid_from_density(
      std::vector<Point> points, const std::vector<double>& densities,
      std::vector<double> cell_volumes);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  int dim() const { return dim_; }
  Kind kind() const { return kind_; }

  const Point& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double cell_volume(std::size_t i) const { return cell_volumes_[i]; }

  const std::vector<Point>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& cell_volumes() const { return cell_volumes_; }

  // Same support, new weights (e.g. after time evolution).
  DiscreteMeasure with_weights(std::vector<double> weights) const;

  double total_mass() const;

 private:
  DiscreteMeasure(Kind kind, std::vector<Point> points,
                  std::vector<double> weights,
                  std::vector<double> cell_volumes);
  void validate() const;

  Kind kind_ = Kind::atomic;
  int dim_ = 1;
  std::vector<Point> points_;
  std::vector<double> weights_;
  std::vector<double> cell_volumes_;  // empty for atomic
};

double total_mass(const DiscreteMeasure& mu);

double integrate(const DiscreteMeasure& mu,
                 const std::function<double(const Point&)>& f);

DiscreteMeasure restrict_to(const DiscreteMeasure& mu, const SupportSet& s);

// Re-bucket mu through g into the 1D bins [edges[k], edges[k+1]). The last
// bin is closed on the right. Output points are bin centers, volumes the
// bin widths; empty bins are kept with zero weight.
DiscreteMeasure pushforward_1d(const DiscreteMeasure& mu,
                               const std::function<double(const Point&)>& g,
                               const std::vector<double>& bin_edges);

double ball_mass(const DiscreteMeasure& mu, const Point& center,
                 double radius);

// Drop support points with weight <= threshold.
DiscreteMeasure prune(const DiscreteMeasure& mu, double threshold = 0.0);

// Right-continuous CDF of a 1D measure. Atomic mass appears as a jump;
// grid-cell mass ramps linearly across the cell.
class Cdf1D {
 public:
  struct Knot {
    double x;
    double f_left;   // F(x-)
    double f_right;  // F(x)
  };

  explicit Cdf1D(std::vector<Knot> knots);

  double value(double x) const;  // F(x), right-continuous
  double total() const;
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::vector<Knot> knots_;
};

Cdf1D cdf_1d(const DiscreteMeasure& mu);

// JSON measure file format (see README).
std::string measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const std::string& text);

}  // namespace selex::measures
