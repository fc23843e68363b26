#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "wknn/popmodel.hpp"

namespace wknn::testing {

/// Two equal-variance Gaussians with equal priors: symmetric about the
/// crossing, so the local bias coefficient vanishes there.
inline PopulationModel symmetric_1d() {
  return PopulationModel::from_config(R"(
    d = 1
    prior = 0.5
    class1.component = 0 1 1
    class2.component = 2 1 1
  )");
}

/// Same class densities with prior 0.3: the crossing moves off the symmetry
/// point and the bias constant is strictly positive.
inline PopulationModel asymmetric_1d() {
  return PopulationModel::from_config(R"(
    d = 1
    prior = 0.3
    class1.component = 0 1 1
    class2.component = 2 1 1
  )");
}

/// Central finite difference of callable f at x.
inline double fd_derivative(const std::function<double(double)>& f, double x,
                            double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double fd_second(const std::function<double(double)>& f, double x, double h = 1e-4) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// Composite Simpson rule, the independent quadrature oracle for tests.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int intervals = 2000) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) {
    acc += f(a + h * i) * (i % 2 == 0 ? 2.0 : 4.0);
  }
  return acc * h / 3.0;
}

inline double rel_err(double value, double truth) {
  return std::fabs(value - truth) / std::fabs(truth);
}

} // namespace wknn::testing
