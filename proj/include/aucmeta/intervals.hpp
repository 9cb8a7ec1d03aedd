#pragma once

#include "aucmeta/bayes_meta.hpp"
#include "aucmeta/types.hpp"

namespace aucmeta {

// Spread used for Bayes prediction intervals. PREDICTIVE adds the
// posterior mean of tau^2 to the posterior variance of the pooled AUC
// (the default; required for nominal coverage of a new study).
// POSTERIOR_SD uses the posterior SD alone.
enum class BayesSpread { PREDICTIVE, POSTERIOR_SD };

// Interval multiplier: the conventional 1.96 at the 95% level, the exact
// standard normal quantile elsewhere.
double z_value(double level);

// 95%-style prediction interval for the true AUC in the next study:
// center +- z * sqrt(pooled_se^2 + tau^2).
PredictionInterval pi_true_next(const MetaResult& result, double level = 0.95);

// Same for the observed AUC: s_next^2 joins the spread under the root.
PredictionInterval pi_observed_next(const MetaResult& result, double s_next,
                                    double level = 0.95);

// Bayes variants centered at the posterior mean.
PredictionInterval pi_true_next(const PosteriorSummary& posterior,
                                double level = 0.95,
                                BayesSpread spread = BayesSpread::PREDICTIVE);
PredictionInterval pi_observed_next(const PosteriorSummary& posterior,
                                    double s_next, double level = 0.95,
                                    BayesSpread spread = BayesSpread::PREDICTIVE);

}  // namespace aucmeta
