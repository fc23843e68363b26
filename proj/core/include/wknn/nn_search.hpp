#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wknn/dataset.hpp"

namespace wknn {

/// Lebesgue measure of the unit ball of the given norm in dimension d.
double unit_ball_volume(std::size_t d, Norm norm);

/// Sort key for ordering points around a query: the squared Euclidean
/// distance (monotone in the distance), or the Manhattan/Chebyshev distance.
double distance_key(std::span<const double> a, std::span<const double> b, Norm norm);

/// Distance-ordered permutation of the sample around `query` (0-based
/// indices). Non-decreasing distances; exact ties broken by ascending
/// original index, so the result is fully deterministic.
std::vector<std::size_t> order_by_distance(const LabeledDataset& data,
                                           std::span<const double> query, Norm norm);

/// Static kd-tree over a dataset, Euclidean norm only. The dataset must
/// outlive the tree. Queries are const and safe to run concurrently.
class KdTree {
public:
  explicit KdTree(const LabeledDataset& data);

  /// The k nearest points, ordered by (squared distance, original index);
  /// identical to the first k entries of order_by_distance.
  std::vector<std::size_t> nearest(std::span<const double> query, std::size_t k) const;

  /// Full distance-ordered permutation.
  std::vector<std::size_t> order(std::span<const double> query) const {
    return nearest(query, data_->n);
  }

private:
  struct Node {
    std::size_t begin = 0, end = 0; // range in index_
    int left = -1, right = -1;      // children, -1 for leaves
    std::size_t box = 0;            // offset into boxes_ (2*d doubles: lo then hi)
  };

  int build(std::size_t begin, std::size_t end);
  double box_distance2(const Node& node, std::span<const double> query) const;

  const LabeledDataset* data_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
  std::vector<double> boxes_;
  static constexpr std::size_t leaf_size = 16;
};

/// Contract wrapper: kd-accelerated full ordering, identical output to
/// order_by_distance. Only the Euclidean norm is supported.
std::vector<std::size_t> kd_order(const LabeledDataset& data, std::span<const double> query,
                                  Norm norm = Norm::euclidean);

} // namespace wknn
