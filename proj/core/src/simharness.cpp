#include "wknn/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "wknn/classifier.hpp"
#include "wknn/error.hpp"
#include "wknn/io.hpp"
#include "wknn/parallel.hpp"
#include "wknn/rng.hpp"
#include "wknn/version.hpp"

namespace wknn {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  const auto last = s.find_last_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  return s.substr(first, last - first + 1);
}

} // namespace

SchemeConfig SchemeConfig::parse(const std::string& text) {
  SchemeConfig cfg;
  const auto colon = text.find(':');
  cfg.name = trim(text.substr(0, colon));
  static const char* known[] = {"bayes",     "uniform",        "optimal",     "geometric",
                                "bagged_with", "bagged_without", "higher_order"};
  if (std::find_if(std::begin(known), std::end(known),
                   [&](const char* k) { return cfg.name == k; }) == std::end(known)) {
    throw input_error("unknown scheme '" + cfg.name + "'");
  }
  if (colon == std::string::npos) return cfg;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw input_error("scheme option without '=': " + item);
    const std::string key = trim(item.substr(0, eq));
    const std::string value = trim(item.substr(eq + 1));
    try {
      if (key == "k") cfg.k = std::stoull(value);
      else if (key == "m") cfg.m = std::stoull(value);
      else if (key == "r") cfg.r = std::stoull(value);
      else if (key == "q") cfg.q = std::stod(value);
      else if (key == "b0") cfg.b0 = std::stod(value);
      else throw input_error("unknown scheme option '" + key + "'");
    } catch (const input_error&) {
      throw;
    } catch (const std::exception&) {
      throw input_error("bad value for scheme option '" + key + "': " + value);
    }
  }
  return cfg;
}

std::string SchemeConfig::label() const {
  std::string out = name;
  bool first = true;
  auto append = [&](const std::string& key, const std::string& value) {
    out += first ? ":" : ",";
    out += key + "=" + value;
    first = false;
  };
  if (k) append("k", std::to_string(*k));
  if (m) append("m", std::to_string(*m));
  if (r) append("r", std::to_string(*r));
  if (q) append("q", format_number(*q));
  if (b0) append("b0", format_number(*b0));
  return out;
}

namespace {

bool needs_constants(const SchemeConfig& cfg) {
  if (cfg.name == "bayes") return false;
  if (cfg.name == "uniform" || cfg.name == "optimal" || cfg.name == "higher_order") {
    return !cfg.k.has_value();
  }
  if (cfg.name == "geometric") return !cfg.q.has_value();
  return !cfg.m.has_value(); // bagged schemes
}

[[noreturn]] void undefined_constants(const std::string& name) {
  throw input_error("scheme '" + name +
                    "' needs tuning constants, but the population's bias constant B2 is "
                    "zero; pass the parameter explicitly");
}

} // namespace

ResolvedScheme resolve_scheme(const SchemeConfig& config, const PopulationModel& pop,
                              const AsymptoticConstants& constants, std::size_t n) {
  ResolvedScheme out;
  SchemeConfig cfg = config;
  if (cfg.name == "bayes") {
    out.bayes = true;
    out.label = "bayes";
    return out;
  }
  if (cfg.name == "uniform") {
    if (!cfg.k) {
      if (!constants.k_opt) undefined_constants(cfg.name);
      cfg.k = *constants.k_opt;
    }
    out.weights = uniform_weights(*cfg.k, n);
  } else if (cfg.name == "optimal") {
    if (!cfg.k) {
      if (!constants.k_star) undefined_constants(cfg.name);
      cfg.k = *constants.k_star;
    }
    out.weights = optimal_weights(*cfg.k, n, pop.d);
  } else if (cfg.name == "geometric") {
    if (!cfg.q) {
      if (!constants.q_opt) undefined_constants(cfg.name);
      cfg.q = *constants.q_opt;
    }
    out.weights = geometric_weights(n, *cfg.q);
  } else if (cfg.name == "bagged_with" || cfg.name == "bagged_without") {
    if (!cfg.m) {
      if (!constants.q_opt) undefined_constants(cfg.name);
      const double m_real = std::round(*constants.q_opt * static_cast<double>(n));
      cfg.m = static_cast<std::size_t>(std::clamp(m_real, 1.0, static_cast<double>(n)));
    }
    out.weights = cfg.name == "bagged_with" ? bagged_with_weights(n, *cfg.m)
                                            : bagged_without_weights(n, *cfg.m);
  } else if (cfg.name == "higher_order") {
    if (!cfg.r) throw input_error("higher_order scheme needs r");
    if (!cfg.k) {
      if (!constants.k_star) undefined_constants(cfg.name);
      cfg.k = *constants.k_star;
    }
    if (!cfg.b0) cfg.b0 = higher_order_default_b0(pop.d);
    out.weights = higher_order_weights(*cfg.r, *cfg.k, *cfg.b0, n, pop.d);
  } else {
    throw input_error("unknown scheme '" + cfg.name + "'");
  }
  out.label = cfg.label();
  return out;
}

std::vector<std::vector<double>> replicate_regret_means(
    const PopulationModel& pop, const std::vector<ResolvedScheme>& schemes, std::size_t n,
    std::size_t n_test, std::size_t replicates, std::uint64_t seed) {
  if (schemes.empty()) throw input_error("at least one scheme is required");
  if (replicates < 1 || n_test < 1 || n < 1) {
    throw input_error("replicates, n and n_test must all be at least 1");
  }
  std::size_t max_support = 0;
  for (const auto& s : schemes) {
    if (!s.bayes) {
      if (s.weights.n != n) throw input_error("scheme weights were built for a different n");
      max_support = std::max(max_support, s.weights.support());
    }
  }

  std::vector<std::vector<double>> means(schemes.size(),
                                         std::vector<double>(replicates, 0.0));
  parallel_for(replicates, [&](std::size_t rep) {
    Rng rng(substream_seed(seed, rep));
    const LabeledDataset train = sample(pop, n, rng);
    const LabeledDataset test = sample(pop, n_test, rng);
    WnnClassifier clf(train, Norm::euclidean);
    std::vector<double> loss(schemes.size(), 0.0);
    for (std::size_t i = 0; i < test.n; ++i) {
      const auto x = test.point(i);
      const int truth = test.labels[i];
      const bool in_region = pop.region.contains(x);
      const int bayes = bayes_classify(pop, x);
      const double bayes_loss = (in_region && bayes != truth) ? 1.0 : 0.0;
      std::vector<std::size_t> ordering;
      if (max_support > 0) ordering = clf.order(x, max_support);
      for (std::size_t s = 0; s < schemes.size(); ++s) {
        int predicted;
        if (schemes[s].bayes) {
          predicted = bayes;
        } else {
          const std::size_t support = schemes[s].weights.support();
          predicted = clf.vote({ordering.data(), support}, schemes[s].weights).label;
        }
        const double scheme_loss = (in_region && predicted != truth) ? 1.0 : 0.0;
        loss[s] += scheme_loss - bayes_loss;
      }
    }
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      means[s][rep] = loss[s] / static_cast<double>(n_test);
    }
  });
  return means;
}

namespace {

RegretEstimate summarize(const std::vector<double>& replicate_means, const std::string& label,
                         std::size_t n, std::size_t n_test, std::uint64_t seed) {
  RegretEstimate est;
  est.replicate_means = replicate_means;
  est.replicates = replicate_means.size();
  est.n_train = n;
  est.n_test = n_test;
  est.scheme = label;
  est.seed = seed;
  double sum = 0.0;
  for (double v : replicate_means) sum += v;
  est.regret_mean = sum / static_cast<double>(replicate_means.size());
  if (replicate_means.size() > 1) {
    double ss = 0.0;
    for (double v : replicate_means) {
      ss += (v - est.regret_mean) * (v - est.regret_mean);
    }
    const double var = ss / static_cast<double>(replicate_means.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(replicate_means.size()));
  }
  return est;
}

double covariance(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += (a[i] - ma) * (b[i] - mb);
  return acc / static_cast<double>(n - 1);
}

/// Delta-method standard error of mean(a)/mean(b) with paired replicates.
double ratio_std_error(const RegretEstimate& a, const RegretEstimate& b) {
  const double r = a.regret_mean / b.regret_mean;
  const std::size_t reps = a.replicate_means.size();
  const double var_a = a.std_error * a.std_error;
  const double var_b = b.std_error * b.std_error;
  const double cov = covariance(a.replicate_means, b.replicate_means) /
                     static_cast<double>(reps);
  const double inner = var_a / (a.regret_mean * a.regret_mean) +
                       var_b / (b.regret_mean * b.regret_mean) -
                       2.0 * cov / (a.regret_mean * b.regret_mean);
  return std::fabs(r) * std::sqrt(std::max(0.0, inner));
}

} // namespace

RegretEstimate estimate_regret(const PopulationModel& pop, const SchemeConfig& scheme,
                               std::size_t n, std::size_t n_test, std::size_t replicates,
                               std::uint64_t seed) {
  AsymptoticConstants constants;
  if (needs_constants(scheme)) constants = compute_constants(pop, Norm::euclidean, n);
  const ResolvedScheme resolved = resolve_scheme(scheme, pop, constants, n);
  const auto means = replicate_regret_means(pop, {resolved}, n, n_test, replicates, seed);
  return summarize(means[0], resolved.label, n, n_test, seed);
}

void ExperimentGrid::check() const {
  population.check();
  if (n_values.empty()) throw input_error("grid needs at least one n value");
  if (kind == Kind::regret && schemes.empty()) {
    throw input_error("regret grid needs at least one scheme");
  }
  if (n_test < 1) throw input_error("n_test must be at least 1");
  if (replicates < 1) throw input_error("replicates must be at least 1");
  if (output.empty()) throw input_error("grid needs an output path stem");
}

ExperimentGrid ExperimentGrid::from_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  ExperimentGrid grid;
  bool have_population = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!trim(line).empty()) throw input_error("grid config line without '=': " + line);
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto parse_list = [&](const std::string& text) {
      std::vector<std::string> items;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
      }
      return items;
    };
    try {
      if (key == "experiment") {
        if (value == "ratio") grid.kind = Kind::ratio;
        else if (value == "regret") grid.kind = Kind::regret;
        else throw input_error("experiment must be 'ratio' or 'regret'");
      } else if (key == "population") {
        // resolved relative to the grid file
        std::filesystem::path p(value);
        if (p.is_relative()) p = std::filesystem::path(path).parent_path() / p;
        grid.population_path = value;
        grid.population = PopulationModel::from_config_file(p.string());
        have_population = true;
      } else if (key == "schemes") {
        for (const auto& item : parse_list(value)) {
          grid.schemes.push_back(SchemeConfig::parse(item));
        }
      } else if (key == "n") {
        for (const auto& item : parse_list(value)) {
          grid.n_values.push_back(std::stoull(item));
        }
      } else if (key == "replicates") {
        grid.replicates = std::stoull(value);
      } else if (key == "n_test") {
        grid.n_test = std::stoull(value);
      } else if (key == "seed") {
        grid.seed = std::stoull(value);
      } else if (key == "output") {
        grid.output = value;
      } else {
        throw input_error("unknown grid config key '" + key + "'");
      }
    } catch (const input_error&) {
      throw;
    } catch (const std::exception&) {
      throw input_error("bad grid config value for '" + key + "': " + value);
    }
  }
  if (!have_population) throw input_error("grid config must reference a population");
  grid.check();
  return grid;
}

std::vector<RatioRow> ratio_experiment(const ExperimentGrid& grid) {
  grid.check();
  const PopulationModel& pop = grid.population;
  std::vector<RatioRow> rows;
  for (std::size_t n : grid.n_values) {
    const auto constants = compute_constants(pop, Norm::euclidean, n);
    if (!constants.k_star || !constants.q_opt) {
      throw input_error(
          "ratio experiment needs a population with a positive bias constant B2");
    }
    RatioRow row;
    row.n = n;
    row.k_star = *constants.k_star;
    row.k_opt = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::floor(static_cast<double>(row.k_star) / mu_factor(pop.d))));
    row.q_opt = *constants.q_opt;

    std::vector<ResolvedScheme> schemes;
    SchemeConfig cfg;
    cfg.name = "optimal";
    cfg.k = row.k_star;
    schemes.push_back(resolve_scheme(cfg, pop, constants, n));
    cfg = {};
    cfg.name = "uniform";
    cfg.k = row.k_opt;
    schemes.push_back(resolve_scheme(cfg, pop, constants, n));
    cfg = {};
    cfg.name = "geometric";
    cfg.q = row.q_opt;
    schemes.push_back(resolve_scheme(cfg, pop, constants, n));

    const std::uint64_t seed_n = substream_seed(grid.seed, n);
    const auto means =
        replicate_regret_means(pop, schemes, n, grid.n_test, grid.replicates, seed_n);
    row.wnn = summarize(means[0], schemes[0].label, n, grid.n_test, seed_n);
    row.knn = summarize(means[1], schemes[1].label, n, grid.n_test, seed_n);
    row.bnn = summarize(means[2], schemes[2].label, n, grid.n_test, seed_n);
    row.wnn_over_knn = row.wnn.regret_mean / row.knn.regret_mean;
    row.se_wnn_over_knn = ratio_std_error(row.wnn, row.knn);
    row.bnn_over_knn = row.bnn.regret_mean / row.knn.regret_mean;
    row.se_bnn_over_knn = ratio_std_error(row.bnn, row.knn);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

nlohmann::json population_json(const PopulationModel& pop) {
  nlohmann::json classes[2];
  const std::vector<GaussianComponent>* mixes[2] = {&pop.class1, &pop.class2};
  for (int c = 0; c < 2; ++c) {
    for (const auto& comp : *mixes[c]) {
      classes[c].push_back({{"mean", comp.mean}, {"var", comp.var}, {"weight", comp.weight}});
    }
  }
  return {
      {"d", pop.d},
      {"prior", pop.prior},
      {"class1", classes[0]},
      {"class2", classes[1]},
      {"region", {{"lo", pop.region.lo}, {"hi", pop.region.hi}}},
      {"seed", pop.seed},
  };
}

} // namespace

GridResult run_grid(const ExperimentGrid& grid) {
  grid.check();
  std::string csv;
  std::vector<std::string> scheme_labels;

  if (grid.kind == ExperimentGrid::Kind::ratio) {
    csv = "n,k_star,k_opt,q_opt,regret_wnn,se_wnn,regret_knn,se_knn,regret_bnn,se_bnn,"
          "wnn_over_knn,se_wnn_over_knn,bnn_over_knn,se_bnn_over_knn\n";
    for (const auto& row : ratio_experiment(grid)) {
      csv += std::to_string(row.n) + ',' + std::to_string(row.k_star) + ',' +
             std::to_string(row.k_opt) + ',' + format_number(row.q_opt) + ',' +
             format_number(row.wnn.regret_mean) + ',' + format_number(row.wnn.std_error) +
             ',' + format_number(row.knn.regret_mean) + ',' +
             format_number(row.knn.std_error) + ',' + format_number(row.bnn.regret_mean) +
             ',' + format_number(row.bnn.std_error) + ',' + format_number(row.wnn_over_knn) +
             ',' + format_number(row.se_wnn_over_knn) + ',' +
             format_number(row.bnn_over_knn) + ',' + format_number(row.se_bnn_over_knn) +
             '\n';
      if (scheme_labels.empty()) {
        scheme_labels = {row.wnn.scheme, row.knn.scheme, row.bnn.scheme};
      }
    }
  } else {
    csv = "n,scheme,regret_mean,std_error,replicates,n_test\n";
    for (std::size_t n : grid.n_values) {
      AsymptoticConstants constants;
      if (std::any_of(grid.schemes.begin(), grid.schemes.end(), needs_constants)) {
        constants = compute_constants(grid.population, Norm::euclidean, n);
      }
      std::vector<ResolvedScheme> schemes;
      for (const auto& cfg : grid.schemes) {
        schemes.push_back(resolve_scheme(cfg, grid.population, constants, n));
      }
      const std::uint64_t seed_n = substream_seed(grid.seed, n);
      const auto means = replicate_regret_means(grid.population, schemes, n, grid.n_test,
                                                grid.replicates, seed_n);
      for (std::size_t s = 0; s < schemes.size(); ++s) {
        const auto est = summarize(means[s], schemes[s].label, n, grid.n_test, seed_n);
        csv += std::to_string(n) + ',' + est.scheme + ',' + format_number(est.regret_mean) +
               ',' + format_number(est.std_error) + ',' + std::to_string(est.replicates) +
               ',' + std::to_string(est.n_test) + '\n';
        if (scheme_labels.size() < schemes.size()) scheme_labels.push_back(est.scheme);
      }
    }
  }

  nlohmann::json sidecar = {
      {"kind", grid.kind == ExperimentGrid::Kind::ratio ? "ratio" : "regret"},
      {"population_path", grid.population_path},
      {"population", population_json(grid.population)},
      {"schemes", scheme_labels},
      {"n_values", grid.n_values},
      {"replicates", grid.replicates},
      {"n_test", grid.n_test},
      {"seed", grid.seed},
      {"output", grid.output},
      {"version", version},
  };

  GridResult result;
  result.csv_path = grid.output + ".csv";
  result.json_path = grid.output + ".json";
  write_text_file(result.csv_path, csv);
  write_text_file(result.json_path, sidecar.dump(2) + "\n");
  return result;
}

void emit_weight_profiles(const std::vector<std::size_t>& dims, std::size_t k_star,
                          const std::string& path) {
  if (dims.empty()) throw input_error("at least one dimension is required");
  if (k_star < 1) throw input_error("k_star must be at least 1");
  std::string csv = "i,d,w\n";
  double reference = 0.0;
  for (std::size_t d : dims) {
    const auto profile = optimal_weights(k_star, k_star, d);
    if (reference == 0.0) reference = profile.w[0];
    const double scale = reference / profile.w[0];
    for (std::size_t i = 0; i < k_star; ++i) {
      csv += std::to_string(i + 1) + ',' + std::to_string(d) + ',' +
             format_number(profile.w[i] * scale) + '\n';
    }
  }
  write_text_file(path, csv);
}

void emit_ratio_curves(std::size_t d_max, const std::string& path) {
  if (d_max < 1) throw input_error("d_max must be at least 1");
  std::string csv = "d,wnn_over_knn,bnn_over_knn\n";
  for (std::size_t d = 1; d <= d_max; ++d) {
    csv += std::to_string(d) + ',' + format_number(regret_ratio_wnn(d)) + ',' +
           format_number(regret_ratio_bnn(d)) + '\n';
  }
  write_text_file(path, csv);
}

} // namespace wknn
