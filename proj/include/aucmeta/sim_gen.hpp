#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aucmeta/types.hpp"

namespace aucmeta {

// Discrete distribution over per-CPM validation counts.
struct KDistribution {
  std::vector<int> values;
  std::vector<double> probs;
};

// Distribution of within-study standard errors. The lognormal default
// (median 0.03) stands in for typical registry-scale AUC standard
// errors; the registry data itself carries no se model.
struct SeDistribution {
  enum class Kind { LOGNORMAL, FIXED };
  Kind kind = Kind::LOGNORMAL;
  double median = 0.03;
  double sigma = 0.35;   // log-scale spread, lognormal only
  double value = 0.03;   // FIXED only

  static SeDistribution lognormal(double median, double sigma) {
    SeDistribution d;
    d.kind = Kind::LOGNORMAL;
    d.median = median;
    d.sigma = sigma;
    return d;
  }
  static SeDistribution fixed(double v) {
    SeDistribution d;
    d.kind = Kind::FIXED;
    d.value = v;
    return d;
  }
};

struct SimConfig {
  HyperParams hp;
  std::size_t n_cpms = 100;
  KDistribution k_dist{{1, 2, 3, 5}, {0.25, 0.35, 0.25, 0.15}};
  SeDistribution se_dist;
  std::uint64_t seed = 1;
};

// Latent values retained for oracle checks.
struct CpmTruth {
  double auc_i = 0.0;
  double tau_i = 0.0;
  std::vector<double> auc_ij;
};

struct SimOutput {
  std::vector<CpmSeries> registry;
  std::vector<CpmTruth> truth;
};

// Samples the full generative chain: per CPM an AUC level and a
// heterogeneity tau from the prior, per study a latent true AUC and an
// observed value. Deterministic given the seed; per-CPM streams are
// seed-split so generation order is immaterial. Observed values are not
// truncated to (0,1).
SimOutput generate_registry(const SimConfig& config);

std::string sim_config_to_json(const SimConfig& config);
SimConfig sim_config_from_json(const std::string& text);

}  // namespace aucmeta
