#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wknn/weights.hpp"

namespace wknn {

struct ConditionCheck {
  std::string id;     // c1..c5 (plain class) or d1..d6 (signed class)
  double value = 0.0; // computed left-hand side
  double bound = 0.0; // right-hand side it is compared against
  bool ok = false;
};

/// Result of checking a weight vector against an admissibility class.
/// passes is true exactly when `violated` is empty.
struct AdmissibilityReport {
  bool passes = true;
  std::vector<std::string> violated;
  std::vector<ConditionCheck> values;
  std::optional<std::size_t> k2; // tail cut actually used

  void add(const ConditionCheck& check);
};

/// Checks the non-negative admissibility class with tail cut
/// k2 = floor(n^(1-beta)). Conditions:
///   c1: sum w^2 <= n^-beta
///   c2: n^(-4/d) (sum alpha_i w_i)^2 <= n^-beta
///   c3: n^(2/d) sum_{i>k2} w_i / sum alpha_i w_i <= 1/log10(n)
///   c4: sum_{i>k2} w_i^2 / sum w_i^2 <= 1/log10(n)
///   c5: sum w_i^3 / (sum w_i^2)^(3/2) <= 1/log10(n)
/// Negative entries are reported as an extra violation "c0".
AdmissibilityReport check_W_n_beta(const WeightVector& w, std::size_t d, double beta);

/// Checks the order-r signed admissibility class. Conditions:
///   d1: sum w = 1 (to 1e-10) and, for l = 1..r-1,
///       n^(2r/d) sum alpha^(l) w / (n^(2l/d) sum alpha^(r) w) <= 1/log10(n)
///   d2: sum w^2 <= n^-beta
///   d3: n^(-4r/d) (sum alpha^(r) w)^2 <= n^-beta
///   d4: some k2 <= floor(n^(1-beta)) (powers of two are scanned, smallest
///       admissible wins) has n^(2r/d) sum_{i>k2} |w_i| / sum alpha^(r) w
///       <= 1/log10(n) and sum_{i<=k2} alpha^(r) w >= beta k2^(2r/d)
///   d5: at that k2, sum_{i>k2} w_i^2 / sum w_i^2 <= 1/log10(n)
///   d6: sum |w_i|^3 / (sum w_i^2)^(3/2) <= 1/log10(n)
AdmissibilityReport check_W_dagger(const WeightVector& w, std::size_t d, double beta,
                                   std::size_t r);

} // namespace wknn
