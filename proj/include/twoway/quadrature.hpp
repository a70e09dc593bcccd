#pragma once

#include <functional>
#include <optional>

namespace twoway {

/// Tolerances and limits for adaptive integration.
struct Quadrature {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  /// Upper limit standing in for +infinity; unset means the caller picks one.
  std::optional<double> truncation;
  int max_subdivisions = 4000;

  void validate() const;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Throws NonConvergenceError when max_subdivisions is exhausted.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const Quadrature& q = {});

}  // namespace twoway
