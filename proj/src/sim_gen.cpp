#include "aucmeta/sim_gen.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "aucmeta/errors.hpp"

namespace aucmeta {
namespace {

using json = nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_config(const SimConfig& config) {
  validate(config.hp);
  if (config.n_cpms == 0)
    throw std::invalid_argument("SimConfig: n_cpms must be positive");
  const auto& kd = config.k_dist;
  if (kd.values.empty() || kd.values.size() != kd.probs.size())
    throw std::invalid_argument("SimConfig: malformed k distribution");
  double total = 0.0;
  for (std::size_t i = 0; i < kd.values.size(); ++i) {
    if (kd.values[i] < 1)
      throw std::invalid_argument("SimConfig: k values must be >= 1");
    if (!(kd.probs[i] >= 0.0))
      throw std::invalid_argument("SimConfig: k probabilities must be >= 0");
    total += kd.probs[i];
  }
  if (!(std::fabs(total - 1.0) < 1e-9))
    throw std::invalid_argument("SimConfig: k probabilities must sum to 1");
  const auto& sd = config.se_dist;
  if (sd.kind == SeDistribution::Kind::LOGNORMAL) {
    if (!(sd.median > 0.0) || !(sd.sigma >= 0.0))
      throw std::invalid_argument("SimConfig: bad lognormal se parameters");
  } else if (!(sd.value > 0.0)) {
    throw std::invalid_argument("SimConfig: fixed se must be positive");
  }
}

int sample_k(const KDistribution& kd, double u) {
  double cum = 0.0;
  for (std::size_t i = 0; i < kd.values.size(); ++i) {
    cum += kd.probs[i];
    if (u < cum) return kd.values[i];
  }
  return kd.values.back();
}

std::string label_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sim-%06zu", index + 1);
  return buf;
}

}  // namespace

SimOutput generate_registry(const SimConfig& config) {
  check_config(config);
  SimOutput out;
  out.registry.resize(config.n_cpms);
  out.truth.resize(config.n_cpms);

  const double log_se_median = std::log(
      config.se_dist.kind == SeDistribution::Kind::LOGNORMAL
          ? config.se_dist.median
          : config.se_dist.value);

  for (std::size_t i = 0; i < config.n_cpms; ++i) {
    std::mt19937_64 rng(splitmix64(config.seed + 0x9E3779B97F4A7C15ULL * i));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const int k = sample_k(config.k_dist, unif(rng));
    const double auc_i = config.hp.mu_auc + config.hp.sigma_auc * gauss(rng);
    const double tau_i =
        std::exp(config.hp.mu_tau + config.hp.sigma_tau * gauss(rng));

    CpmSeries series;
    series.cpm_label = label_for(i);
    CpmTruth truth;
    truth.auc_i = auc_i;
    truth.tau_i = tau_i;
    truth.auc_ij.reserve(static_cast<std::size_t>(k));
    series.studies.reserve(static_cast<std::size_t>(k));

    for (int j = 0; j < k; ++j) {
      double se = config.se_dist.value;
      if (config.se_dist.kind == SeDistribution::Kind::LOGNORMAL)
        se = std::exp(log_se_median + config.se_dist.sigma * gauss(rng));
      const double auc_ij = auc_i + tau_i * gauss(rng);
      const double observed = auc_ij + se * gauss(rng);
      truth.auc_ij.push_back(auc_ij);
      ValidationStudy study;
      study.auc_hat = observed;
      study.se = se;
      study.study_label = series.cpm_label + "-v" + std::to_string(j + 1);
      study.sequence_index = j;
      series.studies.push_back(std::move(study));
    }
    out.registry[i] = std::move(series);
    out.truth[i] = std::move(truth);
  }
  return out;
}

std::string sim_config_to_json(const SimConfig& config) {
  json doc;
  doc["hyperparams"] = {{"mu_auc", config.hp.mu_auc},
                        {"sigma_auc", config.hp.sigma_auc},
                        {"mu_tau", config.hp.mu_tau},
                        {"sigma_tau", config.hp.sigma_tau}};
  doc["n_cpms"] = config.n_cpms;
  doc["k_distribution"] = {{"values", config.k_dist.values},
                           {"probs", config.k_dist.probs}};
  if (config.se_dist.kind == SeDistribution::Kind::LOGNORMAL)
    doc["se_distribution"] = {{"type", "lognormal"},
                              {"median", config.se_dist.median},
                              {"sigma", config.se_dist.sigma}};
  else
    doc["se_distribution"] = {{"type", "fixed"}, {"value", config.se_dist.value}};
  doc["seed"] = config.seed;
  return doc.dump(2) + "\n";
}

SimConfig sim_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("sim config JSON: ") + e.what());
  }
  SimConfig config;
  try {
    const auto& hp = doc.at("hyperparams");
    config.hp.mu_auc = hp.at("mu_auc").get<double>();
    config.hp.sigma_auc = hp.at("sigma_auc").get<double>();
    config.hp.mu_tau = hp.at("mu_tau").get<double>();
    config.hp.sigma_tau = hp.at("sigma_tau").get<double>();
    config.n_cpms = doc.at("n_cpms").get<std::size_t>();
    const auto& kd = doc.at("k_distribution");
    config.k_dist.values = kd.at("values").get<std::vector<int>>();
    config.k_dist.probs = kd.at("probs").get<std::vector<double>>();
    const auto& sd = doc.at("se_distribution");
    const std::string type = sd.at("type").get<std::string>();
    if (type == "lognormal") {
      config.se_dist = SeDistribution::lognormal(sd.at("median").get<double>(),
                                                 sd.at("sigma").get<double>());
    } else if (type == "fixed") {
      config.se_dist = SeDistribution::fixed(sd.at("value").get<double>());
    } else {
      throw DataError("sim config JSON: unknown se_distribution type '" + type +
                      "'");
    }
    config.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw DataError(std::string("sim config JSON: ") + e.what());
  }
  check_config(config);
  return config;
}

}  // namespace aucmeta
