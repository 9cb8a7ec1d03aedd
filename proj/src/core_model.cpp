#include "aucmeta/core_model.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "aucmeta/errors.hpp"
#include "aucmeta/kernels/kernels.hpp"

namespace aucmeta {

const char* method_name(Method m) {
  switch (m) {
    case Method::FE: return "FE";
    case Method::RE_REML: return "RE_REML";
    case Method::RE_DL: return "RE_DL";
    case Method::RE_SJ: return "RE_SJ";
    case Method::RE_FIXED_TAU: return "RE_FIXED_TAU";
    case Method::BAYES_FLAT: return "BAYES_FLAT";
    case Method::BAYES_FULL: return "BAYES_FULL";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "FE" || name == "fe") return Method::FE;
  if (name == "RE_REML" || name == "reml") return Method::RE_REML;
  if (name == "RE_DL" || name == "dl") return Method::RE_DL;
  if (name == "RE_SJ" || name == "sj") return Method::RE_SJ;
  if (name == "RE_FIXED_TAU" || name == "fixed-tau") return Method::RE_FIXED_TAU;
  if (name == "BAYES_FLAT" || name == "bayes-flat") return Method::BAYES_FLAT;
  if (name == "BAYES_FULL" || name == "bayes-full") return Method::BAYES_FULL;
  return std::nullopt;
}

void validate(const ValidationStudy& study) {
  if (!(study.auc_hat > 0.0 && study.auc_hat < 1.0))
    throw std::invalid_argument("ValidationStudy: auc_hat must lie in (0, 1)");
  if (!(study.se > 0.0) || !std::isfinite(study.se))
    throw std::invalid_argument("ValidationStudy: se must be positive and finite");
  if (study.sequence_index < 0)
    throw std::invalid_argument("ValidationStudy: sequence_index must be nonnegative");
}

void validate(const CpmSeries& series) {
  if (series.studies.empty())
    throw std::invalid_argument("CpmSeries: studies must be nonempty");
  std::set<std::int64_t> seen;
  std::int64_t prev = -1;
  bool first = true;
  for (const auto& study : series.studies) {
    validate(study);
    if (!seen.insert(study.sequence_index).second)
      throw std::invalid_argument("CpmSeries: duplicate sequence_index");
    if (!first && study.sequence_index < prev)
      throw std::invalid_argument("CpmSeries: studies not sorted by sequence_index");
    prev = study.sequence_index;
    first = false;
  }
  if (series.development_auc &&
      !(*series.development_auc > 0.0 && *series.development_auc < 1.0))
    throw std::invalid_argument("CpmSeries: development_auc must lie in (0, 1)");
}

void validate(const HyperParams& hp) {
  if (!std::isfinite(hp.mu_auc) || !std::isfinite(hp.mu_tau))
    throw std::invalid_argument("HyperParams: means must be finite");
  if (!(hp.sigma_auc > 0.0) || !std::isfinite(hp.sigma_auc))
    throw std::invalid_argument("HyperParams: sigma_auc must be positive");
  if (!(hp.sigma_tau > 0.0) || !std::isfinite(hp.sigma_tau))
    throw std::invalid_argument("HyperParams: sigma_tau must be positive");
}

std::pair<double, double> lognormal_mean_var(double mu_tau, double sigma_tau) {
  if (!std::isfinite(mu_tau) || !std::isfinite(sigma_tau) || sigma_tau < 0.0)
    throw std::invalid_argument("lognormal_mean_var: non-finite or negative input");
  const double s2 = sigma_tau * sigma_tau;
  const double mean = std::exp(mu_tau + 0.5 * s2);
  const double variance = (std::exp(s2) - 1.0) * std::exp(2.0 * mu_tau + s2);
  return {mean, variance};
}

double tau_bar(const HyperParams& hp) {
  validate(hp);
  return std::exp(hp.mu_tau + 0.5 * hp.sigma_tau * hp.sigma_tau);
}

double loglik_series_given_tau(const CpmSeries& series, double auc_i,
                               double tau) {
  if (series.studies.empty())
    throw std::invalid_argument("loglik_series_given_tau: empty series");
  constexpr double kLogTwoPi = 1.8378770664093453;
  const std::size_t k = series.studies.size();
  std::vector<double> y(k), s2(k);
  for (std::size_t j = 0; j < k; ++j) {
    y[j] = series.studies[j].auc_hat;
    s2[j] = series.studies[j].se * series.studies[j].se;
  }
  const auto& kern = kernels::active_backend();
  const auto stats = kern.pool_stats(y.data(), s2.data(), k, tau * tau, auc_i);
  return -0.5 * (static_cast<double>(k) * kLogTwoPi + stats.sum_logd +
                 stats.sum_wrr);
}

}  // namespace aucmeta
