#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace selex {

// Correctly rounded accumulation of doubles (Shewchuk expansions, the
// algorithm behind Python's math.fsum). The rounded result does not depend
// on how terms were grouped, which keeps mass bookkeeping stable under
// restriction and pushforward re-bucketing.
class ExactSum {
 public:
  void add(double x) {
    std::size_t i = 0;
    for (std::size_t k = 0; k < partials_.size(); ++k) {
      double y = partials_[k];
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  double value() const {
    std::size_t n = partials_.size();
    if (n == 0) return 0.0;
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      const double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    // round-half-even correction when the residue straddles a tie
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                  (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

inline double sum_exact(std::span<const double> xs) {
  ExactSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

namespace detail {
template <class Term>
double sum_pairwise_range(std::size_t lo, std::size_t hi, Term&& term) {
  if (hi - lo <= 64) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return sum_pairwise_range(lo, mid, term) + sum_pairwise_range(mid, hi, term);
}
}  // namespace detail

// Pairwise (tree) summation with a shape fixed by n alone, so results are
// bit-reproducible for a given term order.
template <class Term>
double sum_pairwise(std::size_t n, Term&& term) {
  if (n == 0) return 0.0;
  return detail::sum_pairwise_range(0, n, term);
}

inline double sum_pairwise(std::span<const double> xs) {
  return sum_pairwise(xs.size(), [&](std::size_t i) { return xs[i]; });
}

}  // namespace selex
