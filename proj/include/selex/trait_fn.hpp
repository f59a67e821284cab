#pragma once

#include <memory>
#include <string>
#include <vector>

#include "selex/point.hpp"

namespace selex::model {

using measures::Point;

// Expression tree over the bump/indicator vocabulary the scenarios use.
// Evaluation is pure; trees are shared immutably.
class TraitFn {
 public:
  TraitFn() : TraitFn(constant(0.0)) {}

  double operator()(const Point& p) const;

  static TraitFn constant(double c);
  static TraitFn coord(int axis);
  // triangular bump, height one, support [a,b] along the given axis
  static TraitFn tri(int axis, double a, double b);
  // downward parabola, height one, support [a,b]
  static TraitFn par(int axis, double a, double b);
  // indicator of the closed interval [a,b]
  static TraitFn indicator(int axis, double a, double b);
  static TraitFn add(std::vector<TraitFn> terms);
  static TraitFn mul(std::vector<TraitFn> factors);
  static TraitFn scale(double factor, TraitFn f);
  // 1 / (1 + f); evaluation error if 1 + f <= 0
  static TraitFn recip1p(TraitFn f);
  static TraitFn min_with(double cap, TraitFn f);
  static TraitFn max_with(double floor, TraitFn f);

  friend TraitFn operator+(TraitFn a, TraitFn b) {
    return add({std::move(a), std::move(b)});
  }
  friend TraitFn operator*(TraitFn a, TraitFn b) {
    return mul({std::move(a), std::move(b)});
  }

  std::string to_json() const;
  static TraitFn from_json(const std::string& text);

  struct Node;
  explicit TraitFn(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  const Node& root() const { return *root_; }

 private:
  std::shared_ptr<const Node> root_;
};

}  // namespace selex::model
