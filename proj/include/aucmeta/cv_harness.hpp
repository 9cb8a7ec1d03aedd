#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aucmeta/bayes_meta.hpp"
#include "aucmeta/intervals.hpp"
#include "aucmeta/types.hpp"

namespace aucmeta {

// A method plus everything it needs to run unattended.
struct MethodSpec {
  Method method = Method::FE;
  double fixed_tau = 0.0;  // RE_FIXED_TAU only
  BayesSpread spread = BayesSpread::PREDICTIVE;  // Bayes methods only
};

// One leave-one-study-out evaluation.
struct CvRecord {
  std::string cpm_label;
  std::size_t n_used = 0;
  Method method = Method::FE;
  double predicted = 0.0;
  PredictionInterval interval;  // target OBSERVED_AUC
  double actual = 0.0;
  bool covered = false;
  double error = 0.0;  // predicted - actual
};

// EXACT_N fits on the first n studies. AT_LEAST_N fits on all but the
// last study of every CPM with at least n+1 validations, so the held-out
// prediction rests on n or more studies ("n or more" aggregation).
enum class LosoMode { EXACT_N, AT_LEAST_N };

struct LosoResult {
  std::vector<CvRecord> records;
  std::size_t skipped_cpms = 0;  // CPMs with fewer than n+1 validations
};

// For every eligible CPM: fit the method on the leading studies, predict
// the next observed AUC, and record the Table-style observed-AUC interval.
// hp is required for Bayes methods and ignored otherwise. Records come out
// in cpm_label order.
LosoResult loso_eval(const std::vector<CpmSeries>& registry, std::size_t n,
                     const MethodSpec& spec,
                     const std::optional<HyperParams>& hp = std::nullopt,
                     double level = 0.95, LosoMode mode = LosoMode::EXACT_N);

// Strict variant: the prior (and tau_bar for RE_FIXED_TAU) is refit on the
// registry with the evaluated CPM removed, once per eligible CPM. Plain
// methods fall through to loso_eval.
LosoResult loso_eval_strict(const std::vector<CpmSeries>& registry,
                            std::size_t n, const MethodSpec& spec,
                            double level = 0.95,
                            LosoMode mode = LosoMode::EXACT_N,
                            const FitOptions& fit_options = {});

struct Coverage {
  double estimate = 0.0;
  double se = 0.0;  // binomial standard error
  std::size_t n_records = 0;
};

Coverage coverage(const std::vector<CvRecord>& records);

double rmse(const std::vector<CvRecord>& records);

struct ValidationHistogram {
  std::map<std::size_t, std::size_t> counts;  // validations -> CPM count
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

ValidationHistogram validation_count_histogram(
    const std::vector<CpmSeries>& registry);

}  // namespace aucmeta
