#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wknn {

/// Norm used both for neighbour ordering and for the unit-ball volume that
/// enters the bias constants; one choice drives both.
enum class Norm { euclidean, manhattan, chebyshev };

Norm parse_norm(const std::string& name);
const char* norm_name(Norm norm);

/// Axis-aligned box, the evaluation region for risks and regrets.
struct Box {
  std::vector<double> lo, hi;

  std::size_t dim() const { return lo.size(); }
  bool contains(std::span<const double> x) const;
  void check() const;

  /// A box that is unbounded for practical purposes.
  static Box everything(std::size_t d);
};

/// Training sample: n points in R^d with class labels in {1, ..., K}.
/// Immutable after construction; concurrent reads are safe.
struct LabeledDataset {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> points; // row-major n x d
  std::vector<int> labels;    // values in {1, ..., K}

  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * d, d};
  }
  int num_classes() const;
  void check() const;

  /// CSV ingestion: one row per sample, d feature columns followed by one
  /// integer label column.
  static LabeledDataset from_csv(const std::string& path, bool has_header);
};

/// Feature-only CSV (no label column), for prediction inputs.
struct PointMatrix {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> points;

  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * d, d};
  }
  static PointMatrix from_csv(const std::string& path, bool has_header,
                              bool last_column_is_label = false,
                              std::vector<int>* labels_out = nullptr);
};

} // namespace wknn
