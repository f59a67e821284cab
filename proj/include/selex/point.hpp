#pragma once

#include <array>
#include <cmath>
#include <span>

#include "selex/errors.hpp"

namespace selex::measures {

// Trait-space point, N in {1,2}.
class Point {
 public:
  Point() : dim_(1), c_{0.0, 0.0} {}

  explicit Point(double x) : dim_(1), c_{x, 0.0} { check(); }

  Point(double x, double y) : dim_(2), c_{x, y} { check(); }

  static Point of(std::span<const double> coords) {
    if (coords.size() == 1) return Point(coords[0]);
    if (coords.size() == 2) return Point(coords[0], coords[1]);
    throw DimensionError("point dimension must be 1 or 2");
  }

  int dim() const { return dim_; }
  double operator[](int axis) const { return c_[static_cast<std::size_t>(axis)]; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }

 private:
  void check() const {
    for (int a = 0; a < dim_; ++a)
      if (!std::isfinite(c_[static_cast<std::size_t>(a)]))
        throw ArgumentError("point coordinate is not finite");
  }

  int dim_;
  std::array<double, 2> c_;
};

inline double distance(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw DimensionError("distance: dimension mismatch");
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

inline bool almost_equal(const Point& a, const Point& b, double tol) {
  if (a.dim() != b.dim()) return false;
  for (int k = 0; k < a.dim(); ++k)
    if (std::abs(a[k] - b[k]) > tol) return false;
  return true;
}

}  // namespace selex::measures
