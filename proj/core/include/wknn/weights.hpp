#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wknn {

enum class WeightScheme {
  uniform_k,
  optimal,
  bagged_with,
  bagged_without,
  geometric,
  higher_order,
  custom,
};

const char* scheme_name(WeightScheme scheme);

/// Scheme parameters; only the fields relevant to the scheme are meaningful.
struct SchemeParams {
  std::size_t k = 0; // positive-weight count (uniform, optimal, higher_order)
  std::size_t m = 0; // resample size (bagged schemes)
  std::size_t r = 0; // bias order (higher_order)
  double q = 0.0;    // geometric rate
  double b0 = 0.0;   // higher_order free coefficient
};

/// Length-n weight sequence with provenance. Generated vectors sum to 1
/// within 1e-10; all schemes except higher_order with r >= 2 are
/// entrywise non-negative.
struct WeightVector {
  std::size_t n = 0;
  std::vector<double> w;
  WeightScheme scheme = WeightScheme::custom;
  SchemeParams params;

  double sum() const;
  double sum_sq() const;
  /// Index past the last nonzero weight (0 for an all-zero vector).
  std::size_t support() const;
};

/// Neighbour-spacing sequence i^(1+2l/d) - (i-1)^(1+2l/d); its weighted sum
/// drives the bias term of the regret expansion. l = 0 gives the constant 1.
double alpha(std::size_t i, std::size_t d, std::size_t ell = 1);

/// Sum over i <= support of alpha_i^(l) * w_i.
double weighted_alpha_sum(std::span<const double> w, std::size_t d, std::size_t ell = 1);

/// The regret-minimising non-negative profile: a linearly (in alpha_i)
/// decaying triangle on the first k_star neighbours. Negative rounding dust
/// (|w| < 1e-12) is clamped to zero.
WeightVector optimal_weights(std::size_t k_star, std::size_t n, std::size_t d);

WeightVector uniform_weights(std::size_t k, std::size_t n);

/// Infinite-simulation bagging with replacement, resample size m (m may
/// exceed n).
WeightVector bagged_with_weights(std::size_t n, std::size_t m);

/// Infinite-simulation bagging without replacement: hypergeometric tail
/// weights C(n-i, m-1)/C(n, m). Evaluated by an exact-ratio recurrence from
/// w_1 = m/n, which keeps the telescoped sum at 1 to ~1e-12 even for large n
/// (a direct log-gamma evaluation is available as lgamma variant for tests).
WeightVector bagged_without_weights(std::size_t n, std::size_t m);
double bagged_without_weight_lgamma(std::size_t n, std::size_t m, std::size_t i);

/// Truncated Geometric(q) weights on {1, ..., n}.
WeightVector geometric_weights(std::size_t n, double q);

struct ClampedIndex {
  std::size_t value = 0;
  bool clamped = false; // the formula left [1, n] and was clamped
};
struct ClampedReal {
  double value = 0.0;
  bool clamped = false; // the formula left (0, 1) and was clamped
};

/// Pre-floor real value of the optimal positive-weight count.
double k_star_real(double b1, double b2, std::size_t d, std::size_t n);

/// Optimal positive-weight count, floored and clamped into [1, n].
/// Requires b2 > 0: with a vanishing bias constant no finite optimum exists.
ClampedIndex k_star(double b1, double b2, std::size_t d, std::size_t n);

/// Dimension-only factor between the optimal weighted and unweighted
/// neighbour counts; rises from ~1.27 at d=1 towards 2.
double mu_factor(std::size_t d);

/// Optimally weighted counterpart of an unweighted k: floor(mu_factor * k).
std::size_t mu_of_k(std::size_t k, std::size_t d);

/// Optimal neighbour count for the plain (unweighted) k-NN classifier,
/// defined through k_star_real / mu_factor.
ClampedIndex k_opt(double b1, double b2, std::size_t d, std::size_t n);

/// Optimal geometric/bagging rate; requires b2 > 0.
ClampedReal q_opt(double b1, double b2, std::size_t d, std::size_t n);

/// Bagging rate matched to an unweighted k-NN classifier with parameter k.
ClampedReal q_hat_of_k(std::size_t k, std::size_t d);

struct AlphaProductSum {
  double exact = 0.0;      // brute-force finite sum
  double asymptotic = 0.0; // (d+2l1)(d+2l2) / (d(d+2l1+2l2)) * k^(1+2(l1+l2)/d)
};
AlphaProductSum sum_alpha_products(std::size_t k, std::size_t ell1, std::size_t ell2,
                                   std::size_t d);

enum class HigherOrderMethod { exact_solve, closed_form };

/// Signed weights (1/k)(b0 + b1 a_i^(1) + ... + b_r a_i^(r)) on the first k
/// neighbours, zero after. The exact path solves the r constraints
/// (sum w = 1, sum a^(l) w = 0 for l < r) for b_1..b_r given b0, using exact
/// finite alpha-product sums; the closed-form path (r <= 2) uses the
/// asymptotic coefficient approximations.
WeightVector higher_order_weights(std::size_t r, std::size_t k, double b0, std::size_t n,
                                  std::size_t d,
                                  HigherOrderMethod method = HigherOrderMethod::exact_solve);

/// Default b0 = 1 + d/2, which reduces the r=1 profile to optimal_weights.
double higher_order_default_b0(std::size_t d);

/// Leading regret functional: b1 * sum w^2 + b2 * (sum alpha_i w_i / n^(2/d))^2.
double gamma_n(const WeightVector& w, double b1, double b2, std::size_t d, std::size_t n);

/// Order-r variant with alpha^(r) and n^(2r/d).
double gamma_n_r(const WeightVector& w, double b1, double b2_r, std::size_t d, std::size_t n,
                 std::size_t r);

/// Regret functional of bagged/geometric classifiers as a function of the
/// rate q: (b1/2) q + b2 Gamma(2+2/d)^2 / (n^(4/d) q^(4/d)).
double gamma_tilde(double q, double b1, double b2, std::size_t d, std::size_t n);

/// Population-free limiting regret ratios against optimally tuned
/// unweighted k-NN.
double regret_ratio_wnn(std::size_t d);
double regret_ratio_bnn(std::size_t d);

/// Leading constant of n^(4/(d+4)) * regret for the optimal weights.
double asymp_regret_constant(double b1, double b2, std::size_t d);

} // namespace wknn
