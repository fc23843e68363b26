#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wknn/dataset.hpp"

namespace wknn {

/// Value with an error estimate, as reported by the integrators.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration.
struct GaussRule {
  std::vector<double> nodes, weights;
};
const GaussRule& gauss_legendre(int n);

/// Adaptive 1-d integration by interval bisection, error estimated from the
/// difference between 15- and 7-point Gauss rules. Throws numerical_error
/// (reporting the achieved error) if abs_tol cannot be met.
Estimate integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                            double abs_tol, int max_depth = 48);

/// Tensorised Gauss-Legendre quadrature over a box; error estimated by
/// comparing points_per_axis with twice that resolution.
Estimate integrate_tensor(const std::function<double(std::span<const double>)>& f,
                          const Box& box, int points_per_axis);

/// Randomised quasi-Monte Carlo over a box: Halton points under
/// Cranley-Patterson rotations. `points` is the total budget, split across
/// `replicates` independent shifts; the error is the standard error of the
/// replicate means. Deterministic for a fixed seed.
Estimate integrate_qmc(const std::function<double(std::span<const double>)>& f, const Box& box,
                       std::size_t points, std::uint64_t seed, std::size_t replicates = 8);

} // namespace wknn
