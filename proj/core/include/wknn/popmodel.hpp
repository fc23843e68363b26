#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wknn/dataset.hpp"
#include "wknn/quadrature.hpp"
#include "wknn/rng.hpp"

namespace wknn {

/// Isotropic Gaussian mixture component: N(mean, var * I) with mixture
/// weight `weight`.
struct GaussianComponent {
  std::vector<double> mean;
  double var = 1.0;
  double weight = 1.0;
};

/// Synthetic two-class population with analytic class-conditional densities.
/// Class 1 has prior probability `prior`. Immutable after construction;
/// evaluation and sampling are safe from any number of threads.
struct PopulationModel {
  std::size_t d = 0;
  double prior = 0.5;
  std::vector<GaussianComponent> class1, class2;
  Box region;             // evaluation region R
  std::uint64_t seed = 1; // default sampling seed

  void check() const;

  double class_density(int cls, std::span<const double> x) const;
  double fbar(std::span<const double> x) const;    // marginal feature density
  double psi(std::span<const double> x) const;     // prior*f1 - (1-prior)*f2
  double eta(std::span<const double> x) const;     // P(Y = 1 | X = x)

  /// Key=value text configuration; see README for the format.
  static PopulationModel from_config(const std::string& text);
  static PopulationModel from_config_file(const std::string& path);

  /// A box covering all but 1e-8 of the per-axis mass, the default region.
  Box default_region() const;
};

struct EtaDerivatives {
  std::vector<double> gradient; // d entries
  std::vector<double> hessian;  // d*d row-major, symmetric
};
EtaDerivatives eta_derivatives(const PopulationModel& pop, std::span<const double> x);

struct FbarDerivatives {
  double value = 0.0;
  std::vector<double> gradient;
};
FbarDerivatives fbar_derivatives(const PopulationModel& pop, std::span<const double> x);

/// One-dimensional marginal density derivative of any order (d = 1 only).
double fbar_derivative_1d(const PopulationModel& pop, double x, unsigned order);

/// One-dimensional regression-function derivatives 0..max_order (d = 1 only).
std::vector<double> eta_derivatives_1d(const PopulationModel& pop, double x,
                                       unsigned max_order);

/// Local bias coefficient of the regret expansion,
///   (grad eta . grad fbar + laplacian(eta) fbar / 2)
///     / ((d+2) a_d^(2/d) fbar^(1+2/d)),
/// with a_d the unit-ball volume of the chosen norm.
double a_of_x(const PopulationModel& pop, std::span<const double> x,
              Norm norm = Norm::euclidean);

/// Order-r bias coefficient (d = 1, Euclidean only; r = 1 agrees with
/// a_of_x).
double a_r_of_x(const PopulationModel& pop, double x, std::size_t r);

int bayes_classify(const PopulationModel& pop, std::span<const double> x);

/// Risk of the Bayes rule over the region: adaptive quadrature in d = 1
/// (absolute tolerance 1e-9), randomised QMC with >= 2^16 points otherwise.
Estimate bayes_risk(const PopulationModel& pop);

/// Decision boundary within the region: a finite point set in d = 1, or a
/// hyperplane for single isotropic equal-variance classes in d >= 2.
struct DecisionSet {
  std::vector<double> points; // d = 1 crossings, ascending
  struct Hyperplane {
    std::vector<double> point;  // a point on the plane
    std::vector<double> normal; // unit normal
  };
  std::optional<Hyperplane> hyperplane;
};
DecisionSet decision_set(const PopulationModel& pop);

/// Population constants of the regret expansion together with the derived
/// finite-n quantities. When the bias constant b2 vanishes (b2 < 1e-12 * b1
/// is snapped to zero), k_star, q_opt and the regret constant are undefined
/// and left empty.
struct AsymptoticConstants {
  double b1 = 0.0;
  double b2 = 0.0;
  Estimate b1_integral, b2_integral; // quadrature error (hyperplane case)
  std::size_t n = 0;                 // sample size of the finite-n values
  std::optional<std::size_t> k_star;
  std::optional<std::size_t> k_opt;
  std::optional<double> q_opt;
  std::optional<double> regret_constant;
  bool clamped = false; // k_star/k_opt/q_opt hit their range limits
};
AsymptoticConstants compute_constants(const PopulationModel& pop, Norm norm, std::size_t n);

/// Order-r squared-bias constant over the decision set (d = 1 only).
double b2_r_constant(const PopulationModel& pop, std::size_t r);

/// Draws `count` labelled points; deterministic in `seed` alone.
LabeledDataset sample(const PopulationModel& pop, std::size_t count, std::uint64_t seed);

/// Variant that consumes draws from an existing stream.
LabeledDataset sample(const PopulationModel& pop, std::size_t count, Rng& rng);

/// Trigonometric moments over [0, pi] used by the ball-moment constants:
///   even:  int cos^(2 m1) sin^(2 m2)
///   odd:   int cos^(2 m1) sin^(2 m2 + 1)
/// trig_moment dispatches on whether the sine half-power m3 is integral.
double trig_moment_even(unsigned m1, unsigned m2);
double trig_moment_odd(unsigned m1, unsigned m2);
double trig_moment(unsigned m1, double m3);

/// Unit-ball moment int_{|v| <= 1} v^(2s) v_j^2 dv (Euclidean ball), with
/// s a multi-index of length d and j in {1, ..., d}.
double ball_moment(std::span<const unsigned> s, unsigned j, std::size_t d);

} // namespace wknn
