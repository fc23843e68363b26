#include "wknn/classifier.hpp"

#include <algorithm>

#include "wknn/error.hpp"

namespace wknn {

WnnClassifier::WnnClassifier(const LabeledDataset& data, Norm norm)
    : data_(&data), norm_(norm), num_classes_(data.num_classes()) {
  data.check();
  if (norm == Norm::euclidean) tree_.emplace(data);
}

std::vector<std::size_t> WnnClassifier::order(std::span<const double> query,
                                              std::size_t count) const {
  count = std::min(count, data_->n);
  if (tree_) return tree_->nearest(query, count);
  auto perm = order_by_distance(*data_, query, norm_);
  perm.resize(count);
  return perm;
}

ClassificationResult WnnClassifier::vote(std::span<const std::size_t> ordering,
                                         const WeightVector& w) const {
  if (w.n != data_->n) {
    throw input_error("weight vector length does not match the training sample size");
  }
  ClassificationResult result;
  result.vote_scores.assign(static_cast<std::size_t>(num_classes_), 0.0);
  for (std::size_t rank = 0; rank < ordering.size(); ++rank) {
    const double wi = w.w[rank];
    if (wi == 0.0) continue;
    result.vote_scores[static_cast<std::size_t>(data_->labels[ordering[rank]] - 1)] += wi;
  }
  // argmax with ties to the lowest class index
  std::size_t best = 0;
  for (std::size_t c = 1; c < result.vote_scores.size(); ++c) {
    if (result.vote_scores[c] > result.vote_scores[best]) best = c;
  }
  result.label = static_cast<int>(best) + 1;
  return result;
}

ClassificationResult WnnClassifier::classify(std::span<const double> query,
                                             const WeightVector& w) const {
  if (w.n != data_->n) {
    throw input_error("weight vector length does not match the training sample size");
  }
  if (query.size() != data_->d) {
    throw input_error("query dimension does not match dataset dimension");
  }
  const auto ordering = order(query, w.support());
  return vote(ordering, w);
}

ClassificationResult classify(const LabeledDataset& data, std::span<const double> query,
                              const WeightVector& w, Norm norm) {
  return WnnClassifier(data, norm).classify(query, w);
}

double empirical_risk(const LabeledDataset& train, const LabeledDataset& test,
                      const WeightVector& w, Norm norm, const Box& region) {
  test.check();
  if (test.d != train.d) throw input_error("train and test dimensions differ");
  WnnClassifier clf(train, norm);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < test.n; ++i) {
    const auto x = test.point(i);
    if (!region.contains(x)) continue;
    if (clf.classify(x, w).label != test.labels[i]) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(test.n);
}

} // namespace wknn
