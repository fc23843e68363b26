#pragma once

#include <stdexcept>

namespace wknn {

/// Bad arguments, malformed files or an unsatisfiable configuration.
/// The CLI maps this to exit code 2.
class input_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A requested code path that exists but does not cover these inputs
/// (e.g. kd-tree ordering under a non-Euclidean norm).
class unsupported_error : public input_error {
public:
  using input_error::input_error;
};

/// A computation that cannot meet its numerical contract (hypothesis of a
/// formula violated, singular system, tolerance not reached).
/// The CLI maps this to exit code 3.
class numerical_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace wknn
