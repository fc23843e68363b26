#include "wknn/popmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "wknn/error.hpp"
#include "wknn/nn_search.hpp"
#include "wknn/rng.hpp"
#include "wknn/weights.hpp"

namespace wknn {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

double component_density(const GaussianComponent& c, std::span<const double> x) {
  double q = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - c.mean[j];
    q += diff * diff;
  }
  const std::size_t d = x.size();
  const double norm = std::pow(two_pi * c.var, -0.5 * static_cast<double>(d));
  return c.weight * norm * std::exp(-0.5 * q / c.var);
}

double mixture_density(const std::vector<GaussianComponent>& mix, std::span<const double> x) {
  double f = 0.0;
  for (const auto& c : mix) f += component_density(c, x);
  return f;
}

void mixture_gradient(const std::vector<GaussianComponent>& mix, std::span<const double> x,
                      double* grad) {
  const std::size_t d = x.size();
  std::fill(grad, grad + d, 0.0);
  for (const auto& c : mix) {
    const double phi = component_density(c, x);
    for (std::size_t j = 0; j < d; ++j) grad[j] -= phi * (x[j] - c.mean[j]) / c.var;
  }
}

void mixture_hessian(const std::vector<GaussianComponent>& mix, std::span<const double> x,
                     double* hess) {
  const std::size_t d = x.size();
  std::fill(hess, hess + d * d, 0.0);
  for (const auto& c : mix) {
    const double phi = component_density(c, x);
    for (std::size_t j = 0; j < d; ++j) {
      const double zj = (x[j] - c.mean[j]) / c.var;
      for (std::size_t k = 0; k < d; ++k) {
        const double zk = (x[k] - c.mean[k]) / c.var;
        double h = zj * zk;
        if (j == k) h -= 1.0 / c.var;
        hess[j * d + k] += phi * h;
      }
    }
  }
}

/// k-th derivative of a 1-d Gaussian mixture via the Hermite recursion
/// He_{k+1}(z) = z He_k(z) - k He_{k-1}(z).
double mixture_derivative_1d(const std::vector<GaussianComponent>& mix, double x,
                             unsigned order) {
  double out = 0.0;
  for (const auto& c : mix) {
    const double sigma = std::sqrt(c.var);
    const double z = (x - c.mean[0]) / sigma;
    double he0 = 1.0, he1 = z;
    double he = (order == 0) ? he0 : he1;
    for (unsigned k = 2; k <= order; ++k) {
      const double next = z * he1 - static_cast<double>(k - 1) * he0;
      he0 = he1;
      he1 = next;
      he = next;
    }
    const double phi = component_density(c, std::span<const double>(&x, 1));
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    out += sign * he * phi / std::pow(sigma, static_cast<double>(order));
  }
  return out;
}

} // namespace

void PopulationModel::check() const {
  if (d < 1) throw input_error("population dimension must be at least 1");
  if (!(prior > 0.0 && prior < 1.0)) throw input_error("prior must lie strictly in (0, 1)");
  for (const auto* mix : {&class1, &class2}) {
    if (mix->empty()) throw input_error("each class needs at least one mixture component");
    double total = 0.0;
    for (const auto& c : *mix) {
      if (c.mean.size() != d) throw input_error("component mean dimension mismatch");
      if (!(c.var > 0.0)) throw input_error("component variance must be positive");
      if (!(c.weight > 0.0)) throw input_error("component weight must be positive");
      total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
      throw input_error("mixture weights of each class must sum to 1");
    }
  }
  region.check();
  if (region.dim() != d) throw input_error("region dimension must match the population");
}

double PopulationModel::class_density(int cls, std::span<const double> x) const {
  if (x.size() != d) throw input_error("point dimension mismatch");
  return mixture_density(cls == 1 ? class1 : class2, x);
}

double PopulationModel::fbar(std::span<const double> x) const {
  return prior * class_density(1, x) + (1.0 - prior) * class_density(2, x);
}

double PopulationModel::psi(std::span<const double> x) const {
  return prior * class_density(1, x) - (1.0 - prior) * class_density(2, x);
}

double PopulationModel::eta(std::span<const double> x) const {
  const double g = prior * class_density(1, x);
  const double h = g + (1.0 - prior) * class_density(2, x);
  if (h == 0.0) {
    throw numerical_error("marginal density underflowed to zero at the evaluation point");
  }
  return g / h;
}

Box PopulationModel::default_region() const {
  // Radius z with 2*Phi(-z) = 1e-8 per axis.
  static const double z = [] {
    double lo = 1.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (std::erfc(mid / std::sqrt(2.0)) > 1e-8) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  }();
  Box box;
  box.lo.assign(d, std::numeric_limits<double>::infinity());
  box.hi.assign(d, -std::numeric_limits<double>::infinity());
  for (const auto* mix : {&class1, &class2}) {
    for (const auto& c : *mix) {
      const double radius = z * std::sqrt(c.var);
      for (std::size_t j = 0; j < d; ++j) {
        box.lo[j] = std::min(box.lo[j], c.mean[j] - radius);
        box.hi[j] = std::max(box.hi[j], c.mean[j] + radius);
      }
    }
  }
  return box;
}

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  double v;
  while (ss >> v) out.push_back(v);
  std::string tail;
  if (ss.clear(), ss >> tail) {
    throw input_error("config key '" + key + "': '" + tail + "' is not a number");
  }
  return out;
}

} // namespace

PopulationModel PopulationModel::from_config(const std::string& text) {
  PopulationModel pop;
  bool have_d = false, have_lo = false, have_hi = false;
  std::vector<double> lo, hi;
  std::stringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::stringstream check(line);
      std::string token;
      if (check >> token) throw input_error("config line without '=': " + line);
      continue;
    }
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      const auto last = s.find_last_not_of(" \t\r");
      if (first == std::string::npos) return std::string();
      return s.substr(first, last - first + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "d") {
      pop.d = static_cast<std::size_t>(parse_numbers(value, key).at(0));
      have_d = true;
    } else if (key == "prior") {
      pop.prior = parse_numbers(value, key).at(0);
    } else if (key == "class1.component" || key == "class2.component") {
      if (!have_d) throw input_error("config must declare d before components");
      const auto nums = parse_numbers(value, key);
      if (nums.size() != pop.d + 2) {
        throw input_error("component line needs d mean values, a variance and a weight");
      }
      GaussianComponent c;
      c.mean.assign(nums.begin(), nums.begin() + static_cast<std::ptrdiff_t>(pop.d));
      c.var = nums[pop.d];
      c.weight = nums[pop.d + 1];
      (key[5] == '1' ? pop.class1 : pop.class2).push_back(std::move(c));
    } else if (key == "region.lo") {
      lo = parse_numbers(value, key);
      have_lo = true;
    } else if (key == "region.hi") {
      hi = parse_numbers(value, key);
      have_hi = true;
    } else if (key == "seed") {
      pop.seed = static_cast<std::uint64_t>(parse_numbers(value, key).at(0));
    } else {
      throw input_error("unknown config key '" + key + "'");
    }
  }
  if (!have_d) throw input_error("config must declare d");
  if (have_lo != have_hi) throw input_error("region.lo and region.hi must both be given");
  if (have_lo) {
    pop.region.lo = lo;
    pop.region.hi = hi;
  } else {
    if (pop.class1.empty() || pop.class2.empty()) {
      throw input_error("each class needs at least one mixture component");
    }
    pop.region = pop.default_region();
  }
  pop.check();
  return pop;
}

PopulationModel PopulationModel::from_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_config(buf.str());
}

EtaDerivatives eta_derivatives(const PopulationModel& pop, std::span<const double> x) {
  const std::size_t d = pop.d;
  const double g = pop.prior * pop.class_density(1, x);
  const double h = pop.fbar(x);
  if (h == 0.0) {
    throw numerical_error("marginal density underflowed to zero at the evaluation point");
  }
  std::vector<double> g1(d), h1(d), g2(d * d), h2(d * d);
  {
    std::vector<double> tmp(d);
    mixture_gradient(pop.class1, x, tmp.data());
    for (std::size_t j = 0; j < d; ++j) g1[j] = pop.prior * tmp[j];
    mixture_gradient(pop.class2, x, tmp.data());
    for (std::size_t j = 0; j < d; ++j) h1[j] = g1[j] + (1.0 - pop.prior) * tmp[j];
  }
  {
    std::vector<double> tmp(d * d);
    mixture_hessian(pop.class1, x, tmp.data());
    for (std::size_t j = 0; j < d * d; ++j) g2[j] = pop.prior * tmp[j];
    mixture_hessian(pop.class2, x, tmp.data());
    for (std::size_t j = 0; j < d * d; ++j) h2[j] = g2[j] + (1.0 - pop.prior) * tmp[j];
  }
  EtaDerivatives out;
  out.gradient.resize(d);
  out.hessian.resize(d * d);
  const double inv_h = 1.0 / h;
  const double ratio = g * inv_h;
  for (std::size_t j = 0; j < d; ++j) {
    out.gradient[j] = (g1[j] - ratio * h1[j]) * inv_h;
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      const double val = g2[j * d + k] * inv_h -
                         (g1[j] * h1[k] + g1[k] * h1[j] + g * h2[j * d + k]) * inv_h * inv_h +
                         2.0 * g * h1[j] * h1[k] * inv_h * inv_h * inv_h;
      out.hessian[j * d + k] = val;
    }
  }
  return out;
}

FbarDerivatives fbar_derivatives(const PopulationModel& pop, std::span<const double> x) {
  const std::size_t d = pop.d;
  FbarDerivatives out;
  out.value = pop.fbar(x);
  out.gradient.resize(d);
  std::vector<double> tmp(d);
  mixture_gradient(pop.class1, x, tmp.data());
  for (std::size_t j = 0; j < d; ++j) out.gradient[j] = pop.prior * tmp[j];
  mixture_gradient(pop.class2, x, tmp.data());
  for (std::size_t j = 0; j < d; ++j) out.gradient[j] += (1.0 - pop.prior) * tmp[j];
  return out;
}

double fbar_derivative_1d(const PopulationModel& pop, double x, unsigned order) {
  if (pop.d != 1) throw input_error("fbar_derivative_1d requires d = 1");
  return pop.prior * mixture_derivative_1d(pop.class1, x, order) +
         (1.0 - pop.prior) * mixture_derivative_1d(pop.class2, x, order);
}

std::vector<double> eta_derivatives_1d(const PopulationModel& pop, double x,
                                       unsigned max_order) {
  if (pop.d != 1) throw input_error("eta_derivatives_1d requires d = 1");
  const double h0 = fbar_derivative_1d(pop, x, 0);
  if (h0 == 0.0) {
    throw numerical_error("marginal density underflowed to zero at the evaluation point");
  }
  std::vector<double> g(max_order + 1), h(max_order + 1), eta(max_order + 1);
  for (unsigned k = 0; k <= max_order; ++k) {
    g[k] = pop.prior * mixture_derivative_1d(pop.class1, x, k);
    h[k] = g[k] + (1.0 - pop.prior) * mixture_derivative_1d(pop.class2, x, k);
  }
  // g = eta * h: solve the Leibniz triangle for eta^(k).
  for (unsigned k = 0; k <= max_order; ++k) {
    double acc = g[k];
    double binom = 1.0;
    for (unsigned j = 0; j < k; ++j) {
      // binom = C(k, j)
      acc -= binom * eta[j] * h[k - j];
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
    eta[k] = acc / h[0];
  }
  return eta;
}

double a_of_x(const PopulationModel& pop, std::span<const double> x, Norm norm) {
  const auto fb = fbar_derivatives(pop, x);
  if (fb.value == 0.0) {
    throw numerical_error("marginal density underflowed to zero at the evaluation point");
  }
  const auto ed = eta_derivatives(pop, x);
  const std::size_t d = pop.d;
  double dot = 0.0, laplacian = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    dot += ed.gradient[j] * fb.gradient[j];
    laplacian += ed.hessian[j * d + j];
  }
  const double dd = static_cast<double>(d);
  const double ad = unit_ball_volume(d, norm);
  return (dot + 0.5 * laplacian * fb.value) /
         ((dd + 2.0) * std::pow(ad, 2.0 / dd) * std::pow(fb.value, 1.0 + 2.0 / dd));
}

double a_r_of_x(const PopulationModel& pop, double x, std::size_t r) {
  if (pop.d != 1) throw input_error("order-r bias coefficients are implemented for d = 1");
  if (r < 1) throw input_error("r must be at least 1");
  const unsigned order = static_cast<unsigned>(2 * r);
  const double f0 = fbar_derivative_1d(pop, x, 0);
  if (f0 == 0.0) {
    throw numerical_error("marginal density underflowed to zero at the evaluation point");
  }
  const auto eta = eta_derivatives_1d(pop, x, 2);
  const double f_even = fbar_derivative_1d(pop, x, order - 2); // fbar^(2s)
  const double f_odd = fbar_derivative_1d(pop, x, order - 1);  // fbar^(2s,j)
  const unsigned s[] = {static_cast<unsigned>(r - 1)};
  const double moment = ball_moment(s, 1, 1);
  double fact = 1.0;
  for (std::size_t i = 2; i <= 2 * r - 2; ++i) fact *= static_cast<double>(i);
  const double ad = unit_ball_volume(1, Norm::euclidean);
  const double rr = static_cast<double>(r);
  return moment * (eta[1] * f_odd + 0.5 * eta[2] * f_even) /
         (fact * std::pow(ad, 1.0 + 2.0 * rr) * std::pow(f0, 1.0 + 2.0 * rr));
}

int bayes_classify(const PopulationModel& pop, std::span<const double> x) {
  return pop.psi(x) >= 0.0 ? 1 : 2;
}

namespace {

double risk_integrand(const PopulationModel& pop, std::span<const double> x) {
  const double g = pop.prior * pop.class_density(1, x);
  const double h = g + (1.0 - pop.prior) * pop.class_density(2, x);
  if (h == 0.0) return 0.0; // no mass, no contribution
  const double e = g / h;
  return std::min(e, 1.0 - e) * h;
}

} // namespace

Estimate bayes_risk(const PopulationModel& pop) {
  pop.check();
  if (pop.d == 1) {
    std::vector<double> cuts{pop.region.lo[0]};
    try {
      for (double x0 : decision_set(pop).points) cuts.push_back(x0);
    } catch (const numerical_error&) {
      // no crossing inside the region: integrate in one piece
    }
    cuts.push_back(pop.region.hi[0]);
    std::sort(cuts.begin(), cuts.end());
    const double tol = 1e-9 / static_cast<double>(cuts.size() - 1);
    Estimate total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (!(cuts[i] < cuts[i + 1])) continue;
      const auto piece = integrate_adaptive(
          [&](double x) { return risk_integrand(pop, std::span<const double>(&x, 1)); },
          cuts[i], cuts[i + 1], tol);
      total.value += piece.value;
      total.error += piece.error;
    }
    return total;
  }
  return integrate_qmc(
      [&](std::span<const double> x) { return risk_integrand(pop, x); }, pop.region,
      std::size_t{1} << 16, 0x9e3779b97f4a7c15ULL);
}

DecisionSet decision_set(const PopulationModel& pop) {
  pop.check();
  DecisionSet out;
  if (pop.d == 1) {
    const double lo = pop.region.lo[0], hi = pop.region.hi[0];
    const std::size_t cells = 20000;
    const double step = (hi - lo) / static_cast<double>(cells);
    auto g = [&](double x) { return pop.psi(std::span<const double>(&x, 1)); };
    double x_prev = lo, g_prev = g(lo);
    for (std::size_t c = 1; c <= cells; ++c) {
      const double x_cur = lo + step * static_cast<double>(c);
      const double g_cur = g(x_cur);
      if (g_prev == 0.0) {
        out.points.push_back(x_prev);
      } else if ((g_prev < 0.0 && g_cur > 0.0) || (g_prev > 0.0 && g_cur < 0.0)) {
        double a = x_prev, b = x_cur, ga = g_prev;
        while (b - a > 1e-12) {
          const double mid = 0.5 * (a + b);
          const double gm = g(mid);
          if (gm == 0.0) {
            a = b = mid;
            break;
          }
          if ((ga < 0.0) == (gm < 0.0)) {
            a = mid;
            ga = gm;
          } else {
            b = mid;
          }
        }
        out.points.push_back(0.5 * (a + b));
      }
      x_prev = x_cur;
      g_prev = g_cur;
    }
    if (g_prev == 0.0) out.points.push_back(x_prev);
    std::sort(out.points.begin(), out.points.end());
    out.points.erase(std::unique(out.points.begin(), out.points.end(),
                                 [](double a, double b) { return std::fabs(a - b) < 1e-9; }),
                     out.points.end());
    if (out.points.empty()) {
      throw numerical_error(
          "decision set is empty: the regression function does not cross 1/2 in the region");
    }
    return out;
  }

  if (pop.class1.size() == 1 && pop.class2.size() == 1 &&
      std::fabs(pop.class1[0].var - pop.class2[0].var) <=
          1e-12 * std::max(pop.class1[0].var, pop.class2[0].var)) {
    const auto& mu1 = pop.class1[0].mean;
    const auto& mu2 = pop.class2[0].mean;
    const double var = pop.class1[0].var;
    std::vector<double> delta(pop.d);
    double norm2 = 0.0, sq1 = 0.0, sq2 = 0.0;
    for (std::size_t j = 0; j < pop.d; ++j) {
      delta[j] = mu1[j] - mu2[j];
      norm2 += delta[j] * delta[j];
      sq1 += mu1[j] * mu1[j];
      sq2 += mu2[j] * mu2[j];
    }
    if (norm2 == 0.0) {
      throw numerical_error("decision set is degenerate: the class means coincide");
    }
    // x . delta = var * log((1-prior)/prior) + (|mu1|^2 - |mu2|^2) / 2
    const double offset = var * std::log((1.0 - pop.prior) / pop.prior) + 0.5 * (sq1 - sq2);
    DecisionSet::Hyperplane plane;
    plane.normal.resize(pop.d);
    plane.point.resize(pop.d);
    const double norm = std::sqrt(norm2);
    for (std::size_t j = 0; j < pop.d; ++j) plane.normal[j] = delta[j] / norm;
    double mid_dot = 0.0;
    std::vector<double> mid(pop.d);
    for (std::size_t j = 0; j < pop.d; ++j) {
      mid[j] = 0.5 * (mu1[j] + mu2[j]);
      mid_dot += mid[j] * delta[j];
    }
    const double shift = (offset - mid_dot) / norm2;
    for (std::size_t j = 0; j < pop.d; ++j) plane.point[j] = mid[j] + shift * delta[j];
    out.hyperplane = plane;
    return out;
  }
  throw input_error(
      "decision set supported for d = 1 mixtures or single equal-variance isotropic "
      "Gaussian classes");
}

namespace {

/// Orthonormal basis of the hyperplane orthogonal to `normal`.
std::vector<std::vector<double>> plane_basis(const std::vector<double>& normal) {
  const std::size_t d = normal.size();
  std::vector<std::vector<double>> basis;
  basis.push_back(normal);
  for (std::size_t j = 0; j < d && basis.size() < d; ++j) {
    std::vector<double> v(d, 0.0);
    v[j] = 1.0;
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += v[i] * b[i];
      for (std::size_t i = 0; i < d; ++i) v[i] -= dot * b[i];
    }
    double norm2 = 0.0;
    for (double vi : v) norm2 += vi * vi;
    if (norm2 > 1e-16) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& vi : v) vi *= inv;
      basis.push_back(std::move(v));
    }
  }
  if (basis.size() != d) throw numerical_error("failed to complete the hyperplane basis");
  basis.erase(basis.begin()); // keep only the in-plane directions
  return basis;
}

double grad_norm(const std::vector<double>& g) {
  double acc = 0.0;
  for (double v : g) acc += v * v;
  return std::sqrt(acc);
}

} // namespace

AsymptoticConstants compute_constants(const PopulationModel& pop, Norm norm, std::size_t n) {
  pop.check();
  if (n < 1) throw input_error("compute_constants requires n >= 1");
  const auto boundary = decision_set(pop);
  AsymptoticConstants out;
  out.n = n;

  if (pop.d == 1) {
    for (double x0 : boundary.points) {
      const std::span<const double> x(&x0, 1);
      const double f = pop.fbar(x);
      const double slope = std::fabs(eta_derivatives(pop, x).gradient[0]);
      if (slope < 1e-10) {
        throw numerical_error(
            "the regression function has a vanishing gradient on the decision set");
      }
      const double a = a_of_x(pop, x, norm);
      out.b1 += f / (4.0 * slope);
      out.b2 += f * a * a / slope;
    }
    out.b1_integral = {out.b1, 0.0};
    out.b2_integral = {out.b2, 0.0};
  } else {
    const auto& plane = *boundary.hyperplane;
    const auto basis = plane_basis(plane.normal);
    const std::size_t dp = basis.size();

    Box bounds;
    bounds.lo.resize(dp);
    bounds.hi.resize(dp);
    for (std::size_t j = 0; j < dp; ++j) {
      double lo = 0.0, hi = 0.0;
      for (std::size_t i = 0; i < pop.d; ++i) {
        const double a = basis[j][i] * (pop.region.lo[i] - plane.point[i]);
        const double b = basis[j][i] * (pop.region.hi[i] - plane.point[i]);
        lo += std::min(a, b);
        hi += std::max(a, b);
      }
      bounds.lo[j] = lo;
      bounds.hi[j] = hi;
    }

    auto on_plane = [&](std::span<const double> t, std::vector<double>& x) {
      x.assign(plane.point.begin(), plane.point.end());
      for (std::size_t j = 0; j < dp; ++j) {
        for (std::size_t i = 0; i < pop.d; ++i) x[i] += t[j] * basis[j][i];
      }
    };
    auto slope_at = [&](std::span<const double> x) {
      const double slope = grad_norm(eta_derivatives(pop, x).gradient);
      if (slope < 1e-10) {
        throw numerical_error(
            "the regression function has a vanishing gradient on the decision set");
      }
      return slope;
    };
    auto b1_integrand = [&](std::span<const double> t) {
      std::vector<double> x;
      on_plane(t, x);
      if (!pop.region.contains(x)) return 0.0;
      const double f = pop.fbar(x);
      if (f == 0.0) return 0.0;
      return f / (4.0 * slope_at(x));
    };
    auto b2_integrand = [&](std::span<const double> t) {
      std::vector<double> x;
      on_plane(t, x);
      if (!pop.region.contains(x)) return 0.0;
      const double f = pop.fbar(x);
      if (f == 0.0) return 0.0;
      const double a = a_of_x(pop, x, norm);
      return f * a * a / slope_at(x);
    };
    const int points = dp <= 1 ? 128 : (dp == 2 ? 48 : (dp == 3 ? 20 : 8));
    out.b1_integral = integrate_tensor(b1_integrand, bounds, points);
    out.b2_integral = integrate_tensor(b2_integrand, bounds, points);
    out.b1 = out.b1_integral.value;
    out.b2 = out.b2_integral.value;
  }

  if (!(out.b1 > 0.0)) throw numerical_error("B1 must be positive on the decision set");
  // Bias constants below the relative noise floor are treated as exactly
  // zero; the finite-n tuning parameters are then undefined.
  if (out.b2 < 1e-12 * out.b1) out.b2 = 0.0;
  if (out.b2 > 0.0) {
    const auto ks = k_star(out.b1, out.b2, pop.d, n);
    const auto ko = k_opt(out.b1, out.b2, pop.d, n);
    const auto qo = q_opt(out.b1, out.b2, pop.d, n);
    out.k_star = ks.value;
    out.k_opt = ko.value;
    out.q_opt = qo.value;
    out.regret_constant = asymp_regret_constant(out.b1, out.b2, pop.d);
    out.clamped = ks.clamped || ko.clamped || qo.clamped;
  }
  return out;
}

double b2_r_constant(const PopulationModel& pop, std::size_t r) {
  if (pop.d != 1) throw input_error("order-r bias constants are implemented for d = 1");
  const auto boundary = decision_set(pop);
  double b2r = 0.0;
  for (double x0 : boundary.points) {
    const std::span<const double> x(&x0, 1);
    const double f = pop.fbar(x);
    const double slope = std::fabs(eta_derivatives(pop, x).gradient[0]);
    if (slope < 1e-10) {
      throw numerical_error(
          "the regression function has a vanishing gradient on the decision set");
    }
    const double a = a_r_of_x(pop, x0, r);
    b2r += f * a * a / slope;
  }
  return b2r;
}

LabeledDataset sample(const PopulationModel& pop, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  return sample(pop, count, rng);
}

LabeledDataset sample(const PopulationModel& pop, std::size_t count, Rng& rng) {
  pop.check();
  if (count < 1) throw input_error("sample count must be at least 1");
  LabeledDataset data;
  data.n = count;
  data.d = pop.d;
  data.points.resize(count * pop.d);
  data.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int label = rng.uniform01() <= pop.prior ? 1 : 2;
    data.labels[i] = label;
    const auto& mix = label == 1 ? pop.class1 : pop.class2;
    std::size_t pick = mix.size() - 1;
    if (mix.size() > 1) {
      const double u = rng.uniform01();
      double cum = 0.0;
      for (std::size_t c = 0; c < mix.size(); ++c) {
        cum += mix[c].weight;
        if (u <= cum) {
          pick = c;
          break;
        }
      }
    }
    const auto& comp = mix[pick];
    const double sigma = std::sqrt(comp.var);
    for (std::size_t j = 0; j < pop.d; ++j) {
      data.points[i * pop.d + j] = comp.mean[j] + sigma * rng.normal();
    }
  }
  return data;
}

double trig_moment_even(unsigned m1, unsigned m2) {
  auto fact = [](unsigned n) {
    double f = 1.0;
    for (unsigned i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
  };
  return fact(2 * m1) * fact(2 * m2) * M_PI /
         (std::pow(4.0, static_cast<double>(m1 + m2)) * fact(m1) * fact(m2) * fact(m1 + m2));
}

double trig_moment_odd(unsigned m1, unsigned m2) {
  auto fact = [](unsigned n) {
    double f = 1.0;
    for (unsigned i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
  };
  return std::pow(4.0, static_cast<double>(m2 + 1)) * fact(2 * m1) * fact(m2) *
         fact(m1 + m2 + 1) / (fact(m1) * fact(2 * (m1 + m2 + 1)));
}

double trig_moment(unsigned m1, double m3) {
  const double floor_m3 = std::floor(m3);
  if (m3 == floor_m3) return trig_moment_even(m1, static_cast<unsigned>(floor_m3));
  if (m3 - floor_m3 == 0.5) return trig_moment_odd(m1, static_cast<unsigned>(floor_m3));
  throw input_error("trig_moment requires an integer or half-integer sine power");
}

double ball_moment(std::span<const unsigned> s, unsigned j, std::size_t d) {
  if (d < 1 || s.size() != d || j < 1 || j > d) {
    throw input_error("ball_moment requires |s| components = d and 1 <= j <= d");
  }
  unsigned total = 0;
  for (unsigned sj : s) total += sj;
  double value = 2.0 / (static_cast<double>(d) + 2.0 * total + 2.0);
  for (std::size_t jp = 1; jp < d; ++jp) {
    unsigned tail = 0;
    for (std::size_t i = jp; i < d; ++i) tail += s[i];
    const unsigned m1 = s[jp - 1] + (jp == j ? 1u : 0u);
    const double m3 = static_cast<double>(tail) +
                      0.5 * static_cast<double>(d - jp - 1) + (jp == j - 1 ? 1.0 : 0.0);
    value *= trig_moment(m1, m3);
  }
  return value;
}

} // namespace wknn
