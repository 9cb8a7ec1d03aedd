#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aucmeta {

// One external validation of a clinical prediction model: the observed
// AUC and its standard error, both on the AUC scale.
struct ValidationStudy {
  double auc_hat = 0.0;
  double se = 0.0;
  std::string study_label;
  std::int64_t sequence_index = 0;
};

// One CPM's ordered list of validations; the unit of meta-analysis.
// Studies are kept sorted by sequence_index, ascending and unique.
struct CpmSeries {
  std::string cpm_label;
  std::optional<double> development_auc;
  std::vector<ValidationStudy> studies;

  std::size_t size() const { return studies.size(); }
};

enum class Method {
  FE,
  RE_REML,
  RE_DL,
  RE_SJ,
  RE_FIXED_TAU,
  BAYES_FLAT,
  BAYES_FULL,
};

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

// Pooled estimate from one meta-analysis.
struct MetaResult {
  double pooled = 0.0;
  double pooled_se = 0.0;
  double tau = 0.0;
  Method method = Method::FE;
  std::size_t k = 0;
  // Set when a tau-estimating method was asked to pool a single study
  // and tau had to be fixed at zero.
  bool tau_not_estimable = false;
  // Set when a moment estimator produced a negative tau^2 and was
  // truncated at zero.
  bool tau_truncated = false;
};

// Hyperparameters of the hierarchical model: a normal prior for the
// per-CPM pooled AUC and a lognormal prior for the heterogeneity tau
// (mu_tau / sigma_tau live on the log scale).
struct HyperParams {
  double mu_auc = 0.0;
  double sigma_auc = 1.0;
  double mu_tau = 0.0;
  double sigma_tau = 1.0;
};

enum class IntervalTarget { TRUE_AUC, OBSERVED_AUC };

struct PredictionInterval {
  double center = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  IntervalTarget target = IntervalTarget::TRUE_AUC;

  double width() const { return upper - lower; }
};

// Throw std::invalid_argument on any violated field constraint.
void validate(const ValidationStudy& study);
void validate(const CpmSeries& series);
void validate(const HyperParams& hp);

}  // namespace aucmeta
