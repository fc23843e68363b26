#pragma once

#include <string>

#include "wknn/weights.hpp"

namespace wknn {

/// Shortest representation with 12 significant digits ("%.12g"); every
/// numeric value the tools print goes through this, so repeated runs diff
/// cleanly.
std::string format_number(double v);

/// Weight vector as CSV with header "i,w", i starting at 1.
std::string weight_csv(const WeightVector& w);
void write_weight_csv(const WeightVector& w, const std::string& path);

/// Reads a weight CSV (header optional); rows must be (i, w_i) with
/// consecutive i starting at 1.
WeightVector read_weight_csv(const std::string& path);

/// Creates the parent directory of `path` if needed and opens it for
/// writing, throwing input_error on failure.
void write_text_file(const std::string& path, const std::string& content);

} // namespace wknn
