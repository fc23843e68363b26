#include "wknn/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wknn/error.hpp"

namespace wknn {

void AdmissibilityReport::add(const ConditionCheck& check) {
  values.push_back(check);
  if (!check.ok) {
    violated.push_back(check.id);
    passes = false;
  }
}

namespace {

double condition_log(std::size_t n) { return std::log10(static_cast<double>(n)); }

struct Moments {
  double sum = 0, sum_sq = 0, sum_cube = 0, sum_abs_cube = 0;
  double min_w = 0;
};

Moments moments(const std::vector<double>& w) {
  Moments m;
  m.min_w = w.empty() ? 0.0 : w.front();
  for (double v : w) {
    m.sum += v;
    m.sum_sq += v * v;
    m.sum_cube += v * v * v;
    m.sum_abs_cube += std::fabs(v) * v * v;
    m.min_w = std::min(m.min_w, v);
  }
  return m;
}

double tail_sum(const std::vector<double>& w, std::size_t k2,
                double (*f)(double)) {
  double s = 0.0;
  for (std::size_t i = k2; i < w.size(); ++i) s += f(w[i]);
  return s;
}

double ident(double v) { return v; }
double square(double v) { return v * v; }
double absval(double v) { return std::fabs(v); }

} // namespace

AdmissibilityReport check_W_n_beta(const WeightVector& w, std::size_t d, double beta) {
  if (!(beta > 0.0)) throw input_error("beta must be positive");
  const std::size_t n = w.n;
  if (n < 2 || w.w.size() != n) throw input_error("admissibility checks need n >= 2 weights");

  AdmissibilityReport report;
  const double log_bound = 1.0 / condition_log(n);
  const double n_beta = std::pow(static_cast<double>(n), -beta);
  const std::size_t k2 =
      static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 1.0 - beta)));
  report.k2 = k2;

  const Moments m = moments(w.w);
  const double alpha_sum = weighted_alpha_sum(w.w, d, 1);
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);

  if (m.min_w < 0.0) {
    report.add({"c0", m.min_w, 0.0, false});
  }
  report.add({"c1", m.sum_sq, n_beta, m.sum_sq <= n_beta});
  const double c2 = std::pow(nn, -4.0 / dd) * alpha_sum * alpha_sum;
  report.add({"c2", c2, n_beta, c2 <= n_beta});
  const double c3 = std::pow(nn, 2.0 / dd) * tail_sum(w.w, k2, ident) / alpha_sum;
  report.add({"c3", c3, log_bound, c3 <= log_bound});
  const double c4 = tail_sum(w.w, k2, square) / m.sum_sq;
  report.add({"c4", c4, log_bound, c4 <= log_bound});
  const double c5 = m.sum_cube / std::pow(m.sum_sq, 1.5);
  report.add({"c5", c5, log_bound, c5 <= log_bound});
  return report;
}

AdmissibilityReport check_W_dagger(const WeightVector& w, std::size_t d, double beta,
                                   std::size_t r) {
  if (!(beta > 0.0)) throw input_error("beta must be positive");
  if (r < 1) throw input_error("r must be at least 1");
  const std::size_t n = w.n;
  if (n < 2 || w.w.size() != n) throw input_error("admissibility checks need n >= 2 weights");

  AdmissibilityReport report;
  const double log_bound = 1.0 / condition_log(n);
  const double n_beta = std::pow(static_cast<double>(n), -beta);
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  const std::size_t k2_cap =
      static_cast<std::size_t>(std::floor(std::pow(nn, 1.0 - beta)));

  const Moments m = moments(w.w);
  const double alpha_r_sum = weighted_alpha_sum(w.w, d, r);

  // d1: normalisation plus the dominance of the order-r bias term.
  {
    double worst_ratio = 0.0;
    for (std::size_t l = 1; l < r; ++l) {
      const double ratio = std::pow(nn, 2.0 * static_cast<double>(r) / dd) *
                           weighted_alpha_sum(w.w, d, l) /
                           (std::pow(nn, 2.0 * static_cast<double>(l) / dd) * alpha_r_sum);
      worst_ratio = std::max(worst_ratio, ratio);
    }
    const bool sum_ok = std::fabs(m.sum - 1.0) <= 1e-10;
    const bool ratio_ok = worst_ratio <= log_bound;
    report.add({"d1", sum_ok ? worst_ratio : std::numeric_limits<double>::infinity(),
                log_bound, sum_ok && ratio_ok});
  }
  report.add({"d2", m.sum_sq, n_beta, m.sum_sq <= n_beta});
  const double d3 = std::pow(nn, -4.0 * static_cast<double>(r) / dd) * alpha_r_sum * alpha_r_sum;
  report.add({"d3", d3, n_beta, d3 <= n_beta});

  // d4/d5: scan k2 over powers of two up to the cap; the smallest k2
  // satisfying all three tail conditions is used.
  {
    double best_d4a = std::numeric_limits<double>::infinity();
    double best_d5 = std::numeric_limits<double>::infinity();
    bool found_pair = false, found_all = false;
    std::size_t chosen = 0;
    for (std::size_t k2 = 1; k2 <= k2_cap; k2 *= 2) {
      const double tail_abs = tail_sum(w.w, k2, absval);
      const double d4a = std::pow(nn, 2.0 * static_cast<double>(r) / dd) * tail_abs / alpha_r_sum;
      std::vector<double> head(w.w.begin(),
                               w.w.begin() + static_cast<std::ptrdiff_t>(std::min(k2, n)));
      const double d4b = weighted_alpha_sum(head, d, r);
      const double d4b_bound =
          beta * std::pow(static_cast<double>(k2), 2.0 * static_cast<double>(r) / dd);
      const double d5 = tail_sum(w.w, k2, square) / m.sum_sq;
      const bool pair_ok = (d4a <= log_bound) && (d4b >= d4b_bound);
      if (pair_ok && !found_pair) {
        found_pair = true;
        best_d4a = d4a;
        best_d5 = d5;
        chosen = k2;
      }
      if (pair_ok && d5 <= log_bound) {
        found_all = true;
        best_d4a = d4a;
        best_d5 = d5;
        chosen = k2;
        break;
      }
      if (!found_pair) {
        best_d4a = d4a;
        best_d5 = d5;
        chosen = k2;
      }
    }
    report.k2 = chosen;
    report.add({"d4", best_d4a, log_bound, found_pair});
    report.add({"d5", best_d5, log_bound, found_all});
  }

  const double d6 = m.sum_abs_cube / std::pow(m.sum_sq, 1.5);
  report.add({"d6", d6, log_bound, d6 <= log_bound});
  return report;
}

} // namespace wknn
