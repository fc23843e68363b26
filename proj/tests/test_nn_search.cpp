#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "wknn/error.hpp"
#include "wknn/nn_search.hpp"
#include "wknn/rng.hpp"

using namespace wknn;

namespace {

LabeledDataset make_data(std::vector<double> pts, std::size_t d) {
  LabeledDataset data;
  data.d = d;
  data.n = pts.size() / d;
  data.points = std::move(pts);
  data.labels.assign(data.n, 1);
  return data;
}

LabeledDataset random_data(std::size_t n, std::size_t d, Rng& rng) {
  LabeledDataset data;
  data.n = n;
  data.d = d;
  data.points.resize(n * d);
  data.labels.resize(n);
  for (auto& v : data.points) v = rng.uniform(-1.0, 1.0);
  for (auto& y : data.labels) y = 1 + static_cast<int>(rng.index(3));
  return data;
}

/// Independent oracle: true norm distances (with the sqrt for Euclidean) and
/// a stable sort, sharing no code with the library path.
std::vector<std::size_t> oracle_order(const LabeledDataset& data,
                                      std::span<const double> query, Norm norm) {
  std::vector<std::pair<double, std::size_t>> keyed(data.n);
  for (std::size_t i = 0; i < data.n; ++i) {
    double key = 0.0;
    for (std::size_t j = 0; j < data.d; ++j) {
      const double diff = data.points[i * data.d + j] - query[j];
      switch (norm) {
        case Norm::euclidean: key += diff * diff; break;
        case Norm::manhattan: key += std::fabs(diff); break;
        case Norm::chebyshev: key = std::max(key, std::fabs(diff)); break;
      }
    }
    if (norm == Norm::euclidean) key = std::sqrt(key);
    keyed[i] = {key, i};
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::size_t> out(data.n);
  for (std::size_t i = 0; i < data.n; ++i) out[i] = keyed[i].second;
  return out;
}

} // namespace

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1, Norm::euclidean) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(unit_ball_volume(2, Norm::euclidean) == doctest::Approx(M_PI).epsilon(1e-13));
  CHECK(unit_ball_volume(3, Norm::manhattan) == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
  CHECK(unit_ball_volume(3, Norm::chebyshev) == doctest::Approx(8.0).epsilon(1e-13));
  // Gamma-function route survives large d
  CHECK(std::isfinite(unit_ball_volume(500, Norm::euclidean)));
  CHECK_THROWS_AS(unit_ball_volume(0, Norm::euclidean), input_error);
}

TEST_CASE("ordering on the line with a tie") {
  const auto data = make_data({0.0, 2.0, 1.0}, 1);
  const double q = 0.9;
  const auto perm = order_by_distance(data, std::span<const double>(&q, 1), Norm::euclidean);
  CHECK(perm == std::vector<std::size_t>{2, 0, 1}); // distances 0.1 < 0.9 < 1.1

  // equidistant pair: lower original index first
  const auto tied = make_data({1.0, -1.0, 3.0}, 1);
  const double q0 = 0.0;
  const auto tie_perm =
      order_by_distance(tied, std::span<const double>(&q0, 1), Norm::euclidean);
  CHECK(tie_perm[0] == 0);
  CHECK(tie_perm[1] == 1);
  CHECK(tie_perm[2] == 2);
}

TEST_CASE("ordering matches the independent oracle") {
  Rng rng(12345);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t d = 3;
    const auto data = random_data(200, d, rng);
    std::vector<double> q(d);
    for (auto& v : q) v = rng.uniform(-1.0, 1.0);
    for (Norm norm : {Norm::euclidean, Norm::manhattan, Norm::chebyshev}) {
      CHECK(order_by_distance(data, q, norm) == oracle_order(data, q, norm));
    }
  }
}

TEST_CASE("ordering is a permutation and rescale invariant") {
  Rng rng(777);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + rng.index(150);
    const std::size_t d = 1 + rng.index(5);
    const auto data = random_data(n, d, rng);
    std::vector<double> q(d);
    for (auto& v : q) v = rng.uniform(-1.0, 1.0);
    const auto perm = order_by_distance(data, q, Norm::euclidean);

    auto sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expect(n);
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    CHECK(sorted == expect);

    const double scale = rng.uniform(0.1, 10.0);
    auto scaled = data;
    for (auto& v : scaled.points) v *= scale;
    std::vector<double> qs(q);
    for (auto& v : qs) v *= scale;
    CHECK(order_by_distance(scaled, qs, Norm::euclidean) == perm);
  }
}

TEST_CASE("kd ordering equals brute force") {
  Rng rng(42);

  SUBCASE("single point") {
    const auto data = make_data({0.5, 0.5}, 2);
    const std::vector<double> q{0.0, 0.0};
    CHECK(kd_order(data, q) == std::vector<std::size_t>{0});
  }

  SUBCASE("randomized datasets") {
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t n = 1 + rng.index(400);
      const std::size_t d = 1 + rng.index(6);
      const auto data = random_data(n, d, rng);
      const KdTree tree(data);
      std::vector<double> q(d);
      for (auto& v : q) v = rng.uniform(-1.5, 1.5);
      const auto brute = order_by_distance(data, q, Norm::euclidean);
      CHECK(tree.order(q) == brute);
      const std::size_t k = 1 + rng.index(n);
      const auto top = tree.nearest(q, k);
      CHECK(top == std::vector<std::size_t>(brute.begin(), brute.begin() + k));
    }
  }

  SUBCASE("duplicated points resolve by index") {
    const auto data = make_data({1.0, 1.0, 1.0, 1.0, 0.0, 0.0}, 2);
    const std::vector<double> q{1.0, 1.0};
    const auto perm = kd_order(data, q);
    CHECK(perm == std::vector<std::size_t>{0, 1, 2});
  }

  SUBCASE("large batch") {
    const auto data = random_data(10000, 5, rng);
    const KdTree tree(data);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> q(5);
      for (auto& v : q) v = rng.uniform(-1.2, 1.2);
      CHECK(tree.order(q) == order_by_distance(data, q, Norm::euclidean));
    }
  }
}

TEST_CASE("nn search error paths") {
  const auto data = make_data({0.0, 1.0}, 1);
  const std::vector<double> q2{0.0, 0.0};
  CHECK_THROWS_AS(order_by_distance(data, q2, Norm::euclidean), input_error);
  const double q = 0.0;
  CHECK_THROWS_AS(kd_order(data, std::span<const double>(&q, 1), Norm::manhattan),
                  unsupported_error);
}
