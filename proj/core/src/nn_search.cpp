#include "wknn/nn_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "wknn/error.hpp"

namespace wknn {

double unit_ball_volume(std::size_t d, Norm norm) {
  if (d < 1) throw input_error("dimension must be at least 1");
  const double dd = static_cast<double>(d);
  switch (norm) {
    case Norm::euclidean:
      // pi^(d/2) / Gamma(d/2 + 1), evaluated in log space to survive large d
      return std::exp(0.5 * dd * std::log(M_PI) - std::lgamma(0.5 * dd + 1.0));
    case Norm::chebyshev:
      return std::exp(dd * std::log(2.0));
    case Norm::manhattan:
      return std::exp(dd * std::log(2.0) - std::lgamma(dd + 1.0));
  }
  throw input_error("unknown norm");
}

double distance_key(std::span<const double> a, std::span<const double> b, Norm norm) {
  const std::size_t d = a.size();
  double acc = 0.0;
  switch (norm) {
    case Norm::euclidean:
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
      }
      return acc;
    case Norm::manhattan:
      for (std::size_t j = 0; j < d; ++j) acc += std::fabs(a[j] - b[j]);
      return acc;
    case Norm::chebyshev:
      for (std::size_t j = 0; j < d; ++j) acc = std::max(acc, std::fabs(a[j] - b[j]));
      return acc;
  }
  throw input_error("unknown norm");
}

std::vector<std::size_t> order_by_distance(const LabeledDataset& data,
                                           std::span<const double> query, Norm norm) {
  if (query.size() != data.d) {
    throw input_error("query dimension does not match dataset dimension");
  }
  std::vector<double> key(data.n);
  for (std::size_t i = 0; i < data.n; ++i) key[i] = distance_key(data.point(i), query, norm);
  std::vector<std::size_t> perm(data.n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] != key[b]) return key[a] < key[b];
    return a < b;
  });
  return perm;
}

KdTree::KdTree(const LabeledDataset& data) : data_(&data) {
  data.check();
  index_.resize(data.n);
  std::iota(index_.begin(), index_.end(), std::size_t{0});
  nodes_.reserve(2 * data.n / leaf_size + 2);
  build(0, data.n);
}

int KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t d = data_->d;
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  {
    Node& node = nodes_.back();
    node.begin = begin;
    node.end = end;
    node.box = boxes_.size();
  }
  boxes_.resize(boxes_.size() + 2 * d);
  double* lo = boxes_.data() + nodes_[id].box;
  double* hi = lo + d;
  for (std::size_t j = 0; j < d; ++j) {
    lo[j] = std::numeric_limits<double>::infinity();
    hi[j] = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t p = begin; p < end; ++p) {
    const auto pt = data_->point(index_[p]);
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], pt[j]);
      hi[j] = std::max(hi[j], pt[j]);
    }
  }
  if (end - begin <= leaf_size) return id;

  std::size_t axis = 0;
  double width = -1.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double w = hi[j] - lo[j];
    if (w > width) {
      width = w;
      axis = j;
    }
  }
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     const double va = data_->points[a * d + axis];
                     const double vb = data_->points[b * d + axis];
                     if (va != vb) return va < vb;
                     return a < b;
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

double KdTree::box_distance2(const Node& node, std::span<const double> query) const {
  const std::size_t d = data_->d;
  const double* lo = boxes_.data() + node.box;
  const double* hi = lo + d;
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double gap = 0.0;
    if (query[j] < lo[j]) gap = lo[j] - query[j];
    else if (query[j] > hi[j]) gap = query[j] - hi[j];
    acc += gap * gap;
  }
  return acc;
}

std::vector<std::size_t> KdTree::nearest(std::span<const double> query, std::size_t k) const {
  if (query.size() != data_->d) {
    throw input_error("query dimension does not match dataset dimension");
  }
  k = std::min(k, data_->n);
  if (k == 0) return {};

  using Entry = std::pair<double, std::size_t>; // (squared distance, index)
  std::priority_queue<Entry> heap;              // worst candidate on top

  // Recursive branch-and-bound; prune only when the box is strictly farther
  // than the current worst, so index ties resolve exactly as in the brute
  // force ordering.
  auto visit = [&](auto&& self, int node_id) -> void {
    const Node& node = nodes_[node_id];
    if (heap.size() == k && box_distance2(node, query) > heap.top().first) return;
    if (node.left < 0) {
      for (std::size_t p = node.begin; p < node.end; ++p) {
        const std::size_t idx = index_[p];
        const double key = distance_key(data_->point(idx), query, Norm::euclidean);
        if (heap.size() < k) {
          heap.emplace(key, idx);
        } else if (Entry(key, idx) < heap.top()) {
          heap.pop();
          heap.emplace(key, idx);
        }
      }
      return;
    }
    const double dl = box_distance2(nodes_[node.left], query);
    const double dr = box_distance2(nodes_[node.right], query);
    if (dl <= dr) {
      self(self, node.left);
      self(self, node.right);
    } else {
      self(self, node.right);
      self(self, node.left);
    }
  };
  visit(visit, 0);

  std::vector<Entry> entries;
  entries.reserve(heap.size());
  while (!heap.empty()) {
    entries.push_back(heap.top());
    heap.pop();
  }
  std::vector<std::size_t> out(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    out[entries.size() - 1 - i] = entries[i].second; // heap pops worst first
  }
  return out;
}

std::vector<std::size_t> kd_order(const LabeledDataset& data, std::span<const double> query,
                                  Norm norm) {
  if (norm != Norm::euclidean) {
    throw unsupported_error("kd-tree ordering supports only the Euclidean norm");
  }
  KdTree tree(data);
  return tree.order(query);
}

} // namespace wknn
