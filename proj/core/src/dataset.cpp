#include "wknn/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "wknn/error.hpp"

namespace wknn {

Norm parse_norm(const std::string& name) {
  if (name == "euclidean" || name == "l2") return Norm::euclidean;
  if (name == "manhattan" || name == "l1") return Norm::manhattan;
  if (name == "chebyshev" || name == "linf") return Norm::chebyshev;
  throw input_error("unknown norm '" + name + "' (expected euclidean, manhattan or chebyshev)");
}

const char* norm_name(Norm norm) {
  switch (norm) {
    case Norm::euclidean: return "euclidean";
    case Norm::manhattan: return "manhattan";
    case Norm::chebyshev: return "chebyshev";
  }
  return "?";
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != lo.size()) throw input_error("point dimension does not match region dimension");
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < lo[j] || x[j] > hi[j]) return false;
  }
  return true;
}

void Box::check() const {
  if (lo.size() != hi.size()) throw input_error("region lo/hi dimensions differ");
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (!(lo[j] < hi[j])) throw input_error("region must have positive volume on every axis");
  }
}

Box Box::everything(std::size_t d) {
  Box b;
  b.lo.assign(d, -std::numeric_limits<double>::infinity());
  b.hi.assign(d, std::numeric_limits<double>::infinity());
  return b;
}

int LabeledDataset::num_classes() const {
  int k = 0;
  for (int y : labels) k = std::max(k, y);
  return k;
}

void LabeledDataset::check() const {
  if (n < 1) throw input_error("dataset must contain at least one sample");
  if (d < 1) throw input_error("dataset dimension must be at least 1");
  if (points.size() != n * d) throw input_error("dataset point buffer has wrong size");
  if (labels.size() != n) throw input_error("dataset label count does not match sample count");
  for (int y : labels) {
    if (y < 1) throw input_error("class labels must be integers >= 1");
  }
  for (double v : points) {
    if (!std::isfinite(v)) throw input_error("dataset coordinates must be finite");
  }
}

namespace {

std::vector<std::vector<double>> read_numeric_rows(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && has_header) continue;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw input_error(path + ":" + std::to_string(lineno) + ": '" + cell +
                          "' is not a number (use --header if the file has a header row)");
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw input_error(path + ":" + std::to_string(lineno) + ": inconsistent column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw input_error(path + ": no data rows");
  return rows;
}

} // namespace

LabeledDataset LabeledDataset::from_csv(const std::string& path, bool has_header) {
  const auto rows = read_numeric_rows(path, has_header);
  if (rows.front().size() < 2) {
    throw input_error(path + ": need at least one feature column and one label column");
  }
  LabeledDataset data;
  data.n = rows.size();
  data.d = rows.front().size() - 1;
  data.points.reserve(data.n * data.d);
  data.labels.reserve(data.n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    for (std::size_t j = 0; j < data.d; ++j) data.points.push_back(row[j]);
    const double y = row.back();
    if (y != std::floor(y) || y < 1) {
      throw input_error(path + ": label in row " + std::to_string(i + 1) +
                        " is not a positive integer");
    }
    data.labels.push_back(static_cast<int>(y));
  }
  data.check();
  return data;
}

PointMatrix PointMatrix::from_csv(const std::string& path, bool has_header,
                                  bool last_column_is_label, std::vector<int>* labels_out) {
  const auto rows = read_numeric_rows(path, has_header);
  const std::size_t cols = rows.front().size();
  if (last_column_is_label && cols < 2) {
    throw input_error(path + ": need at least one feature column and one label column");
  }
  PointMatrix m;
  m.n = rows.size();
  m.d = last_column_is_label ? cols - 1 : cols;
  m.points.reserve(m.n * m.d);
  if (labels_out) labels_out->clear();
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < m.d; ++j) m.points.push_back(row[j]);
    if (last_column_is_label && labels_out) {
      const double y = row.back();
      if (y != std::floor(y) || y < 1) throw input_error(path + ": labels must be positive integers");
      labels_out->push_back(static_cast<int>(y));
    }
  }
  return m;
}

} // namespace wknn
