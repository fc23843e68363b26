#include "wknn/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "wknn/error.hpp"
#include "wknn/rng.hpp"

namespace wknn {

namespace {

GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double wgt = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = wgt;
    rule.weights[n - 1 - i] = wgt;
  }
  return rule;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

namespace {

double gauss_on(const std::function<double(double)>& f, double a, double b, const GaussRule& g) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    acc += g.weights[i] * f(mid + half * g.nodes[i]);
  }
  return acc * half;
}

struct AdaptiveState {
  const std::function<double(double)>* f;
  const GaussRule* coarse;
  const GaussRule* fine;
  double tol;
  int max_depth;
  double value = 0.0;
  double error = 0.0;
};

void adapt(AdaptiveState& st, double a, double b, double whole, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_on(*st.f, a, mid, *st.fine);
  const double right = gauss_on(*st.f, mid, b, *st.fine);
  const double coarse_left = gauss_on(*st.f, a, mid, *st.coarse);
  const double coarse_right = gauss_on(*st.f, mid, b, *st.coarse);
  const double err_left = std::fabs(left - coarse_left);
  const double err_right = std::fabs(right - coarse_right);
  const double local_tol = st.tol * (b - a);

  if ((err_left + err_right <= local_tol && std::fabs(left + right - whole) <= local_tol) ||
      depth >= st.max_depth) {
    st.value += left + right;
    st.error += err_left + err_right;
    return;
  }
  adapt(st, a, mid, left, depth + 1);
  adapt(st, mid, b, right, depth + 1);
}

} // namespace

Estimate integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                            double abs_tol, int max_depth) {
  if (!(a < b)) throw input_error("integration interval must have a < b");
  if (!(abs_tol > 0.0)) throw input_error("integration tolerance must be positive");
  AdaptiveState st;
  st.f = &f;
  st.coarse = &gauss_legendre(7);
  st.fine = &gauss_legendre(15);
  st.tol = abs_tol / (b - a);
  st.max_depth = max_depth;
  const double whole = gauss_on(f, a, b, *st.fine);
  adapt(st, a, b, whole, 0);
  if (st.error > abs_tol) {
    std::ostringstream msg;
    msg << "adaptive quadrature missed its tolerance (" << abs_tol << "): achieved "
        << st.error << " with estimate " << st.value;
    throw numerical_error(msg.str());
  }
  return {st.value, st.error};
}

namespace {

double tensor_pass(const std::function<double(std::span<const double>)>& f, const Box& box,
                   int points) {
  const std::size_t d = box.dim();
  const GaussRule& rule = gauss_legendre(points);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  double acc = 0.0;
  const std::size_t total_log = d * static_cast<std::size_t>(std::log2(points) + 1);
  if (total_log > 40) throw input_error("tensor quadrature dimension too large");
  for (;;) {
    double wgt = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double half = 0.5 * (box.hi[j] - box.lo[j]);
      x[j] = box.lo[j] + half * (1.0 + rule.nodes[idx[j]]);
      wgt *= half * rule.weights[idx[j]];
    }
    acc += wgt * f(x);
    std::size_t j = 0;
    for (; j < d; ++j) {
      if (++idx[j] < static_cast<std::size_t>(points)) break;
      idx[j] = 0;
    }
    if (j == d) break;
  }
  return acc;
}

} // namespace

Estimate integrate_tensor(const std::function<double(std::span<const double>)>& f,
                          const Box& box, int points_per_axis) {
  box.check();
  if (points_per_axis < 2) throw input_error("tensor quadrature needs at least 2 points per axis");
  const double coarse = tensor_pass(f, box, points_per_axis);
  const double fine = tensor_pass(f, box, 2 * points_per_axis);
  return {fine, std::fabs(fine - coarse)};
}

namespace {

constexpr int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                          31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double halton(std::size_t index, int base) {
  double result = 0.0;
  double f = 1.0;
  while (index > 0) {
    f /= base;
    result += f * static_cast<double>(index % base);
    index /= base;
  }
  return result;
}

} // namespace

Estimate integrate_qmc(const std::function<double(std::span<const double>)>& f, const Box& box,
                       std::size_t points, std::uint64_t seed, std::size_t replicates) {
  box.check();
  const std::size_t d = box.dim();
  if (d > std::size(primes)) throw input_error("QMC integration supports at most 20 dimensions");
  if (replicates < 2) throw input_error("QMC needs at least 2 replicates for an error estimate");
  const std::size_t per_rep = std::max<std::size_t>(1, points / replicates);

  double volume = 1.0;
  for (std::size_t j = 0; j < d; ++j) volume *= box.hi[j] - box.lo[j];

  std::vector<double> means(replicates, 0.0);
  std::vector<double> shift(d), x(d);
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    Rng rng(substream_seed(seed, rep));
    for (std::size_t j = 0; j < d; ++j) shift[j] = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 1; i <= per_rep; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double u = halton(i, primes[j]) + shift[j];
        if (u >= 1.0) u -= 1.0;
        x[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * u;
      }
      acc += f(x);
    }
    means[rep] = volume * acc / static_cast<double>(per_rep);
  }
  double mean = 0.0;
  for (double v : means) mean += v;
  mean /= static_cast<double>(replicates);
  double var = 0.0;
  for (double v : means) var += (v - mean) * (v - mean);
  var /= static_cast<double>(replicates - 1);
  return {mean, std::sqrt(var / static_cast<double>(replicates))};
}

} // namespace wknn
