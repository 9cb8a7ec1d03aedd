#pragma once

#include <optional>
#include <string>

#include "aucmeta/types.hpp"

namespace aucmeta {

// Plain-vector forest plot: one confidence row per study, the pooled
// diamond, and prediction-interval whiskers. Output is deterministic
// byte-for-byte for identical inputs.
std::string render_forest_svg(
    const CpmSeries& series, const MetaResult& pooled,
    const PredictionInterval& pi_true,
    const std::optional<PredictionInterval>& pi_observed = std::nullopt,
    double level = 0.95);

}  // namespace aucmeta
