#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wknn/dataset.hpp"
#include "wknn/nn_search.hpp"
#include "wknn/weights.hpp"

namespace wknn {

/// Outcome of a weighted vote: per-class weighted totals (they sum to 1,
/// since the weights do) and the winning label. Equal top scores go to the
/// lowest class index, which reproduces the ">= 1/2" convention for two
/// classes.
struct ClassificationResult {
  int label = 0;
  std::vector<double> vote_scores; // index c-1 holds the score of class c
};

/// Reusable classifier over one training sample: builds the kd-tree once
/// (Euclidean norm) and serves any weight vector. Read-only after
/// construction; concurrent classification is safe.
class WnnClassifier {
public:
  WnnClassifier(const LabeledDataset& data, Norm norm);

  /// Neighbour ordering truncated to `count` entries.
  std::vector<std::size_t> order(std::span<const double> query, std::size_t count) const;

  ClassificationResult classify(std::span<const double> query, const WeightVector& w) const;

  /// Weighted plurality vote along a precomputed ordering prefix.
  ClassificationResult vote(std::span<const std::size_t> ordering, const WeightVector& w) const;

  const LabeledDataset& data() const { return *data_; }

private:
  const LabeledDataset* data_;
  Norm norm_;
  int num_classes_;
  std::optional<KdTree> tree_;
};

/// One-shot classification of a single query.
ClassificationResult classify(const LabeledDataset& data, std::span<const double> query,
                              const WeightVector& w, Norm norm);

/// Fraction of test pairs that are misclassified while lying inside the
/// region; points outside the region count as correct (indicator
/// convention).
double empirical_risk(const LabeledDataset& train, const LabeledDataset& test,
                      const WeightVector& w, Norm norm, const Box& region);

} // namespace wknn
