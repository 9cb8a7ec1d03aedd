#include "aucmeta/intervals.hpp"

#include <cmath>
#include <stdexcept>

#include "aucmeta/numerics/normal.hpp"

namespace aucmeta {
namespace {

PredictionInterval make_interval(double center, double half_width,
                                 double level, IntervalTarget target) {
  PredictionInterval pi;
  pi.center = center;
  pi.lower = center - half_width;
  pi.upper = center + half_width;
  pi.level = level;
  pi.target = target;
  return pi;
}

double check_level(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("prediction interval: level must lie in (0, 1)");
  return level;
}

}  // namespace

double z_value(double level) {
  check_level(level);
  if (level == 0.95) return 1.96;
  return numerics::normal_quantile(0.5 * (1.0 + level));
}

PredictionInterval pi_true_next(const MetaResult& result, double level) {
  const double z = z_value(level);
  const double half = z * std::sqrt(result.pooled_se * result.pooled_se +
                                    result.tau * result.tau);
  return make_interval(result.pooled, half, level, IntervalTarget::TRUE_AUC);
}

PredictionInterval pi_observed_next(const MetaResult& result, double s_next,
                                    double level) {
  if (!(s_next > 0.0) || !std::isfinite(s_next))
    throw std::invalid_argument("pi_observed_next: s_next must be positive");
  const double z = z_value(level);
  const double half =
      z * std::sqrt(result.pooled_se * result.pooled_se +
                    result.tau * result.tau + s_next * s_next);
  return make_interval(result.pooled, half, level, IntervalTarget::OBSERVED_AUC);
}

PredictionInterval pi_true_next(const PosteriorSummary& posterior, double level,
                                BayesSpread spread) {
  const double z = z_value(level);
  const double sd = spread == BayesSpread::PREDICTIVE ? posterior.predictive_sd
                                                      : posterior.sd_post;
  return make_interval(posterior.auc_post, z * sd, level,
                       IntervalTarget::TRUE_AUC);
}

PredictionInterval pi_observed_next(const PosteriorSummary& posterior,
                                    double s_next, double level,
                                    BayesSpread spread) {
  if (!(s_next > 0.0) || !std::isfinite(s_next))
    throw std::invalid_argument("pi_observed_next: s_next must be positive");
  const double z = z_value(level);
  const double sd = spread == BayesSpread::PREDICTIVE ? posterior.predictive_sd
                                                      : posterior.sd_post;
  const double half = z * std::sqrt(sd * sd + s_next * s_next);
  return make_interval(posterior.auc_post, half, level,
                       IntervalTarget::OBSERVED_AUC);
}

}  // namespace aucmeta
