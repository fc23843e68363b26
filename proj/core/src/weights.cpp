#include "wknn/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wknn/error.hpp"

namespace wknn {

const char* scheme_name(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::uniform_k: return "uniform_k";
    case WeightScheme::optimal: return "optimal";
    case WeightScheme::bagged_with: return "bagged_with";
    case WeightScheme::bagged_without: return "bagged_without";
    case WeightScheme::geometric: return "geometric";
    case WeightScheme::higher_order: return "higher_order";
    case WeightScheme::custom: return "custom";
  }
  return "?";
}

double WeightVector::sum() const {
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

double WeightVector::sum_sq() const {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

std::size_t WeightVector::support() const {
  std::size_t s = w.size();
  while (s > 0 && w[s - 1] == 0.0) --s;
  return s;
}

double alpha(std::size_t i, std::size_t d, std::size_t ell) {
  if (i < 1 || d < 1) throw input_error("alpha requires i >= 1 and d >= 1");
  const double p = 1.0 + 2.0 * static_cast<double>(ell) / static_cast<double>(d);
  return std::pow(static_cast<double>(i), p) - std::pow(static_cast<double>(i - 1), p);
}

double weighted_alpha_sum(std::span<const double> w, std::size_t d, std::size_t ell) {
  const double p = 1.0 + 2.0 * static_cast<double>(ell) / static_cast<double>(d);
  std::size_t support = w.size();
  while (support > 0 && w[support - 1] == 0.0) --support;
  double sum = 0.0;
  double prev = 0.0; // (i-1)^p, carried to avoid recomputing both powers
  for (std::size_t i = 0; i < support; ++i) {
    const double cur = std::pow(static_cast<double>(i + 1), p);
    sum += (cur - prev) * w[i];
    prev = cur;
  }
  return sum;
}

WeightVector optimal_weights(std::size_t k_star, std::size_t n, std::size_t d) {
  if (k_star < 1 || k_star > n) throw input_error("optimal weights require 1 <= k* <= n");
  if (d < 1) throw input_error("dimension must be at least 1");
  WeightVector v;
  v.n = n;
  v.scheme = WeightScheme::optimal;
  v.params.k = k_star;
  v.w.assign(n, 0.0);
  const double dd = static_cast<double>(d);
  const double kk = static_cast<double>(k_star);
  const double lead = 1.0 + dd / 2.0;
  const double slope = dd / (2.0 * std::pow(kk, 2.0 / dd));
  const double p = 1.0 + 2.0 / dd;
  double prev = 0.0;
  for (std::size_t i = 1; i <= k_star; ++i) {
    const double cur = std::pow(static_cast<double>(i), p);
    double wi = (lead - slope * (cur - prev)) / kk;
    if (wi < 0.0) {
      if (wi < -1e-12) throw numerical_error("optimal weight fell below the rounding slack");
      wi = 0.0;
    }
    v.w[i - 1] = wi;
    prev = cur;
  }
  return v;
}

WeightVector uniform_weights(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) throw input_error("uniform weights require 1 <= k <= n");
  WeightVector v;
  v.n = n;
  v.scheme = WeightScheme::uniform_k;
  v.params.k = k;
  v.w.assign(n, 0.0);
  const double wk = 1.0 / static_cast<double>(k);
  std::fill(v.w.begin(), v.w.begin() + static_cast<std::ptrdiff_t>(k), wk);
  return v;
}

WeightVector bagged_with_weights(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw input_error("bagged weights require n >= 1 and m >= 1");
  WeightVector v;
  v.n = n;
  v.scheme = WeightScheme::bagged_with;
  v.params.m = m;
  v.w.resize(n);
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  double prev = 1.0; // (1 - (i-1)/n)^m at i = 1
  for (std::size_t i = 1; i <= n; ++i) {
    const double cur =
        (i == n) ? 0.0 : std::exp(mm * std::log1p(-static_cast<double>(i) / nn));
    v.w[i - 1] = prev - cur;
    prev = cur;
  }
  return v;
}

double bagged_without_weight_lgamma(std::size_t n, std::size_t m, std::size_t i) {
  if (i > n - m + 1) return 0.0;
  const double a = static_cast<double>(n - i);
  const double log_num = std::lgamma(a + 1.0) - std::lgamma(static_cast<double>(m)) -
                         std::lgamma(a - static_cast<double>(m) + 2.0);
  const double log_den = std::lgamma(static_cast<double>(n) + 1.0) -
                         std::lgamma(static_cast<double>(m) + 1.0) -
                         std::lgamma(static_cast<double>(n - m) + 1.0);
  return std::exp(log_num - log_den);
}

WeightVector bagged_without_weights(std::size_t n, std::size_t m) {
  if (n < 1 || m < 1) throw input_error("bagged weights require n >= 1 and m >= 1");
  if (m > n) throw input_error("without-replacement resample size cannot exceed n");
  WeightVector v;
  v.n = n;
  v.scheme = WeightScheme::bagged_without;
  v.params.m = m;
  v.w.assign(n, 0.0);
  // w_1 = m/n exactly; w_{i+1}/w_i = (n-i-m+1)/(n-i).
  double wi = static_cast<double>(m) / static_cast<double>(n);
  for (std::size_t i = 1; i <= n - m + 1; ++i) {
    v.w[i - 1] = wi;
    const double num = static_cast<double>(n - i) - static_cast<double>(m) + 1.0;
    if (num <= 0.0) break;
    wi *= num / static_cast<double>(n - i);
  }
  return v;
}

WeightVector geometric_weights(std::size_t n, double q) {
  if (!(q > 0.0 && q < 1.0)) throw input_error("geometric weights require q in (0, 1)");
  if (n < 1) throw input_error("geometric weights require n >= 1");
  WeightVector v;
  v.n = n;
  v.scheme = WeightScheme::geometric;
  v.params.q = q;
  v.w.resize(n);
  // 1 - (1-q)^n without cancellation
  const double norm = -std::expm1(static_cast<double>(n) * std::log1p(-q));
  double wi = q / norm;
  for (std::size_t i = 0; i < n; ++i) {
    v.w[i] = wi;
    wi *= 1.0 - q;
  }
  return v;
}

double k_star_real(double b1, double b2, std::size_t d, std::size_t n) {
  if (!(b1 > 0.0)) throw input_error("k* requires B1 > 0");
  if (!(b2 > 0.0)) {
    throw numerical_error(
        "k* is undefined when the bias constant B2 is not strictly positive");
  }
  const double dd = static_cast<double>(d);
  return std::pow(dd * (dd + 4.0) / (2.0 * (dd + 2.0)), dd / (dd + 4.0)) *
         std::pow(b1 / b2, dd / (dd + 4.0)) *
         std::pow(static_cast<double>(n), 4.0 / (dd + 4.0));
}

namespace {

ClampedIndex floor_into_range(double value, std::size_t n) {
  ClampedIndex out;
  const double f = std::floor(value);
  if (f < 1.0) {
    out.value = 1;
    out.clamped = true;
  } else if (f > static_cast<double>(n)) {
    out.value = n;
    out.clamped = true;
  } else {
    out.value = static_cast<std::size_t>(f);
  }
  return out;
}

} // namespace

ClampedIndex k_star(double b1, double b2, std::size_t d, std::size_t n) {
  if (n < 1) throw input_error("k* requires n >= 1");
  return floor_into_range(k_star_real(b1, b2, d, n), n);
}

double mu_factor(std::size_t d) {
  if (d < 1) throw input_error("dimension must be at least 1");
  const double dd = static_cast<double>(d);
  return std::pow(2.0 * (dd + 4.0) / (dd + 2.0), dd / (dd + 4.0));
}

std::size_t mu_of_k(std::size_t k, std::size_t d) {
  if (k < 1) throw input_error("k must be at least 1");
  return static_cast<std::size_t>(std::floor(mu_factor(d) * static_cast<double>(k)));
}

ClampedIndex k_opt(double b1, double b2, std::size_t d, std::size_t n) {
  if (n < 1) throw input_error("k_opt requires n >= 1");
  return floor_into_range(k_star_real(b1, b2, d, n) / mu_factor(d), n);
}

ClampedReal q_opt(double b1, double b2, std::size_t d, std::size_t n) {
  if (!(b1 > 0.0)) throw input_error("q_opt requires B1 > 0");
  if (!(b2 > 0.0)) {
    throw numerical_error(
        "q_opt is undefined when the bias constant B2 is not strictly positive");
  }
  const double dd = static_cast<double>(d);
  const double e = dd / (dd + 4.0);
  const double value = std::pow(8.0, e) * std::pow(std::tgamma(2.0 + 2.0 / dd), 2.0 * e) *
                       std::pow(dd, -e) * std::pow(b2 / b1, e) *
                       std::pow(static_cast<double>(n), -4.0 / (dd + 4.0));
  ClampedReal out{value, false};
  if (out.value <= 0.0) {
    out.value = 1e-12;
    out.clamped = true;
  } else if (out.value >= 1.0) {
    out.value = 1.0 - 1e-12;
    out.clamped = true;
  }
  return out;
}

ClampedReal q_hat_of_k(std::size_t k, std::size_t d) {
  if (k < 1) throw input_error("k must be at least 1");
  const double dd = static_cast<double>(d);
  const double e = dd / (dd + 4.0);
  const double value = std::pow(std::tgamma(2.0 + 2.0 / dd), 2.0 * e) * std::pow(2.0, -e) /
                       static_cast<double>(k);
  ClampedReal out{value, false};
  if (out.value >= 1.0) {
    out.value = 1.0 - 1e-12;
    out.clamped = true;
  }
  return out;
}

AlphaProductSum sum_alpha_products(std::size_t k, std::size_t ell1, std::size_t ell2,
                                   std::size_t d) {
  if (k < 1 || d < 1) throw input_error("sum_alpha_products requires k >= 1 and d >= 1");
  const double dd = static_cast<double>(d);
  const double p1 = 1.0 + 2.0 * static_cast<double>(ell1) / dd;
  const double p2 = 1.0 + 2.0 * static_cast<double>(ell2) / dd;
  AlphaProductSum out;
  double prev1 = 0.0, prev2 = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const double cur1 = std::pow(static_cast<double>(i), p1);
    const double cur2 = std::pow(static_cast<double>(i), p2);
    out.exact += (cur1 - prev1) * (cur2 - prev2);
    prev1 = cur1;
    prev2 = cur2;
  }
  const double l1 = static_cast<double>(ell1), l2 = static_cast<double>(ell2);
  out.asymptotic = (dd + 2.0 * l1) * (dd + 2.0 * l2) / (dd * (dd + 2.0 * l1 + 2.0 * l2)) *
                   std::pow(static_cast<double>(k), 1.0 + 2.0 * (l1 + l2) / dd);
  return out;
}

double higher_order_default_b0(std::size_t d) { return 1.0 + static_cast<double>(d) / 2.0; }

WeightVector higher_order_weights(std::size_t r, std::size_t k, double b0, std::size_t n,
                                  std::size_t d, HigherOrderMethod method) {
  if (r < 1) throw input_error("higher-order weights require r >= 1");
  if (k < 1 || k > n) throw input_error("higher-order weights require 1 <= k <= n");
  if (d < 1) throw input_error("dimension must be at least 1");

  const double dd = static_cast<double>(d);
  const double kk = static_cast<double>(k);
  std::vector<double> b(r + 1, 0.0); // b[0] = b0, b[l] multiplies alpha^(l)
  b[0] = b0;

  if (method == HigherOrderMethod::closed_form) {
    if (r == 1) {
      b[1] = (1.0 - b0) / std::pow(kk, 2.0 / dd);
    } else if (r == 2) {
      b[1] = ((dd + 4.0) * (dd + 4.0) / 4.0 - 2.0 * (dd + 4.0) / (dd + 2.0) * b0) /
             std::pow(kk, 2.0 / dd);
      b[2] = (1.0 - b0 - std::pow(kk, 2.0 / dd) * b[1]) / std::pow(kk, 4.0 / dd);
    } else {
      throw input_error("closed-form higher-order coefficients are available for r <= 2");
    }
  } else {
    // Solve for c_l = b_l k^(2l/d) with rows scaled by k^(1+2l/d); the
    // scaled alpha-product sums are O(1), so the system is well conditioned.
    std::vector<double> mat(r * r, 0.0);
    std::vector<double> rhs(r, 0.0);
    auto shat = [&](std::size_t l1, std::size_t l2) {
      const double s = sum_alpha_products(k, l1, l2, d).exact;
      return s / std::pow(kk, 1.0 + 2.0 * static_cast<double>(l1 + l2) / dd);
    };
    for (std::size_t col = 1; col <= r; ++col) mat[0 * r + (col - 1)] = shat(0, col);
    rhs[0] = 1.0 - b0;
    for (std::size_t row = 1; row < r; ++row) {
      for (std::size_t col = 1; col <= r; ++col) mat[row * r + (col - 1)] = shat(row, col);
      rhs[row] = -b0 * shat(row, 0);
    }
    // Gaussian elimination with partial pivoting.
    std::vector<std::size_t> piv(r);
    for (std::size_t i = 0; i < r; ++i) piv[i] = i;
    for (std::size_t col = 0; col < r; ++col) {
      std::size_t best = col;
      for (std::size_t row = col + 1; row < r; ++row) {
        if (std::fabs(mat[row * r + col]) > std::fabs(mat[best * r + col])) best = row;
      }
      if (std::fabs(mat[best * r + col]) < 1e-13) {
        std::ostringstream msg;
        msg << "higher-order constraint system is singular (r=" << r << ", k=" << k
            << ", d=" << d << ", pivot=" << mat[best * r + col] << ")";
        throw numerical_error(msg.str());
      }
      if (best != col) {
        for (std::size_t j = 0; j < r; ++j) std::swap(mat[best * r + j], mat[col * r + j]);
        std::swap(rhs[best], rhs[col]);
      }
      for (std::size_t row = col + 1; row < r; ++row) {
        const double f = mat[row * r + col] / mat[col * r + col];
        for (std::size_t j = col; j < r; ++j) mat[row * r + j] -= f * mat[col * r + j];
        rhs[row] -= f * rhs[col];
      }
    }
    std::vector<double> c(r, 0.0);
    for (std::size_t row = r; row-- > 0;) {
      double acc = rhs[row];
      for (std::size_t j = row + 1; j < r; ++j) acc -= mat[row * r + j] * c[j];
      c[row] = acc / mat[row * r + row];
    }
    for (std::size_t l = 1; l <= r; ++l) {
      b[l] = c[l - 1] / std::pow(kk, 2.0 * static_cast<double>(l) / dd);
    }
  }

  WeightVector v;
  v.n = n;
  v.scheme = WeightScheme::higher_order;
  v.params.k = k;
  v.params.r = r;
  v.params.b0 = b0;
  v.w.assign(n, 0.0);
  std::vector<double> prev(r + 1, 0.0);
  for (std::size_t i = 1; i <= k; ++i) {
    double wi = b[0];
    for (std::size_t l = 1; l <= r; ++l) {
      const double cur =
          std::pow(static_cast<double>(i), 1.0 + 2.0 * static_cast<double>(l) / dd);
      wi += b[l] * (cur - prev[l]);
      prev[l] = cur;
    }
    v.w[i - 1] = wi / kk;
  }
  return v;
}

double gamma_n(const WeightVector& w, double b1, double b2, std::size_t d, std::size_t n) {
  if (w.n != n || w.w.size() != n) throw input_error("weight vector length must equal n");
  if (b1 < 0.0 || b2 < 0.0) throw input_error("gamma_n requires B1 >= 0 and B2 >= 0");
  const double bias = weighted_alpha_sum(w.w, d, 1) /
                      std::pow(static_cast<double>(n), 2.0 / static_cast<double>(d));
  return b1 * w.sum_sq() + b2 * bias * bias;
}

double gamma_n_r(const WeightVector& w, double b1, double b2_r, std::size_t d, std::size_t n,
                 std::size_t r) {
  if (w.n != n || w.w.size() != n) throw input_error("weight vector length must equal n");
  if (r < 1) throw input_error("gamma_n_r requires r >= 1");
  if (b1 < 0.0 || b2_r < 0.0) throw input_error("gamma_n_r requires B1 >= 0 and B2_r >= 0");
  const double bias =
      weighted_alpha_sum(w.w, d, r) /
      std::pow(static_cast<double>(n), 2.0 * static_cast<double>(r) / static_cast<double>(d));
  return b1 * w.sum_sq() + b2_r * bias * bias;
}

double gamma_tilde(double q, double b1, double b2, std::size_t d, std::size_t n) {
  if (!(q > 0.0 && q < 1.0)) throw input_error("gamma_tilde requires q in (0, 1)");
  const double dd = static_cast<double>(d);
  const double g = std::tgamma(2.0 + 2.0 / dd);
  return 0.5 * b1 * q +
         b2 * g * g / (std::pow(static_cast<double>(n), 4.0 / dd) * std::pow(q, 4.0 / dd));
}

double regret_ratio_wnn(std::size_t d) {
  if (d < 1) throw input_error("dimension must be at least 1");
  const double dd = static_cast<double>(d);
  return std::pow(4.0, -dd / (dd + 4.0)) *
         std::pow((2.0 * dd + 4.0) / (dd + 4.0), (2.0 * dd + 4.0) / (dd + 4.0));
}

double regret_ratio_bnn(std::size_t d) {
  if (d < 1) throw input_error("dimension must be at least 1");
  const double dd = static_cast<double>(d);
  return std::pow(std::tgamma(2.0 + 2.0 / dd), 2.0 * dd / (dd + 4.0)) /
         std::pow(2.0, 4.0 / (dd + 4.0));
}

double asymp_regret_constant(double b1, double b2, std::size_t d) {
  if (!(b1 > 0.0) || !(b2 > 0.0)) {
    throw input_error("the limiting regret constant requires B1 > 0 and B2 > 0");
  }
  const double dd = static_cast<double>(d);
  return std::pow(dd + 2.0, (2.0 * dd + 4.0) / (dd + 4.0)) / std::pow(2.0, 4.0 / (dd + 4.0)) *
         std::pow((dd + 4.0) / dd, dd / (dd + 4.0)) * std::pow(b1, 4.0 / (dd + 4.0)) *
         std::pow(b2, dd / (dd + 4.0));
}

} // namespace wknn
