#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wknn/popmodel.hpp"
#include "wknn/weights.hpp"

namespace wknn {

/// Monte Carlo regret estimate for one scheme at one sample size.
struct RegretEstimate {
  double regret_mean = 0.0;
  double std_error = 0.0;
  std::size_t replicates = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::string scheme;
  std::uint64_t seed = 0;
  std::vector<double> replicate_means; // per-replicate means, index order
};

/// Scheme request, e.g. "optimal", "uniform:k=25", "geometric:q=0.01",
/// "bagged_with:m=100", "higher_order:r=2,k=100,b0=2", "bayes".
/// Parameters left out are filled from the population constants.
struct SchemeConfig {
  std::string name;
  std::optional<std::size_t> k, m, r;
  std::optional<double> q, b0;

  static SchemeConfig parse(const std::string& text);
  std::string label() const;
};

struct ResolvedScheme {
  std::string label;
  bool bayes = false;
  WeightVector weights; // empty for the Bayes control
};

/// Fills missing scheme parameters from the constants (k*, k_opt, q_opt) and
/// builds the weight vector for sample size n. Throws input_error when a
/// scheme needs constants that are undefined (bias constant zero).
ResolvedScheme resolve_scheme(const SchemeConfig& config, const PopulationModel& pop,
                              const AsymptoticConstants& constants, std::size_t n);

/// Per-replicate regret means for several schemes over shared replicate
/// samples (common random numbers). Element [s][r] is the mean over the test
/// points of 1{scheme errs in region} - 1{Bayes errs in region} in
/// replicate r. Deterministic in `seed` regardless of the worker count.
std::vector<std::vector<double>> replicate_regret_means(const PopulationModel& pop,
                                                        const std::vector<ResolvedScheme>& schemes,
                                                        std::size_t n, std::size_t n_test,
                                                        std::size_t replicates,
                                                        std::uint64_t seed);

/// Monte Carlo regret of one scheme: fresh training and test samples per
/// replicate, loss differenced against the Bayes rule inside the region.
RegretEstimate estimate_regret(const PopulationModel& pop, const SchemeConfig& scheme,
                               std::size_t n, std::size_t n_test, std::size_t replicates,
                               std::uint64_t seed);

struct ExperimentGrid {
  enum class Kind { regret, ratio };
  Kind kind = Kind::ratio;
  PopulationModel population;
  std::string population_path;       // as referenced by the config
  std::vector<SchemeConfig> schemes; // used by Kind::regret
  std::vector<std::size_t> n_values;
  std::size_t replicates = 200;
  std::size_t n_test = 2000;
  std::uint64_t seed = 1;
  std::string output; // path stem for the CSV and JSON sidecar

  void check() const;
  static ExperimentGrid from_config_file(const std::string& path);
};

/// One row of the three-way comparison at a given n: optimally weighted
/// vs. unweighted k-NN (k_opt = floor(k*/mu)) vs. geometric bagging at
/// q_opt. Ratio standard errors use the paired replicate covariance.
struct RatioRow {
  std::size_t n = 0;
  std::size_t k_star = 0, k_opt = 0;
  double q_opt = 0.0;
  RegretEstimate wnn, knn, bnn;
  double wnn_over_knn = 0.0, se_wnn_over_knn = 0.0;
  double bnn_over_knn = 0.0, se_bnn_over_knn = 0.0;
};
std::vector<RatioRow> ratio_experiment(const ExperimentGrid& grid);

struct GridResult {
  std::string csv_path;
  std::string json_path;
};
/// Runs the grid and writes `<output>.csv` plus a `<output>.json` sidecar
/// with the full configuration and the library version. Byte-identical for
/// a fixed seed whatever the worker count.
GridResult run_grid(const ExperimentGrid& grid);

/// Optimal-weight profiles for several dimensions, scaled so the nearest
/// neighbour carries the same weight in every profile; columns i,d,w.
void emit_weight_profiles(const std::vector<std::size_t>& dims, std::size_t k_star,
                          const std::string& path);

/// Dimension-only limiting regret ratio curves; columns
/// d,wnn_over_knn,bnn_over_knn.
void emit_ratio_curves(std::size_t d_max, const std::string& path);

} // namespace wknn
