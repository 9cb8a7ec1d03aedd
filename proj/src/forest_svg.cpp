#include "aucmeta/forest_svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "aucmeta/intervals.hpp"

namespace aucmeta {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string num4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string render_forest_svg(const CpmSeries& series, const MetaResult& pooled,
                              const PredictionInterval& pi_true,
                              const std::optional<PredictionInterval>& pi_observed,
                              double level) {
  const double z = z_value(level);

  const int width = 820;
  const int label_w = 170;
  const int value_w = 150;
  const int plot_x0 = label_w;
  const int plot_x1 = width - value_w;
  const int row_h = 24;
  const int top = 44;
  const std::size_t n = series.studies.size();
  const int extra_rows = 2 + (pi_observed ? 1 : 0);
  const int height = top + row_h * static_cast<int>(n + extra_rows) + 48;

  double lo = pi_true.lower, hi = pi_true.upper;
  if (pi_observed) {
    lo = std::min(lo, pi_observed->lower);
    hi = std::max(hi, pi_observed->upper);
  }
  for (const auto& s : series.studies) {
    lo = std::min(lo, s.auc_hat - z * s.se);
    hi = std::max(hi, s.auc_hat + z * s.se);
  }
  const double pad = 0.04 * (hi - lo > 0 ? hi - lo : 1.0);
  lo -= pad;
  hi += pad;

  auto sx = [&](double v) {
    return plot_x0 + (v - lo) / (hi - lo) * (plot_x1 - plot_x0);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<text x=\"8\" y=\"20\" font-size=\"14\">" << series.cpm_label
      << " &#8212; pooled AUC " << num4(pooled.pooled) << " (" << method_name(pooled.method)
      << ", k=" << pooled.k << ", tau=" << num4(pooled.tau) << ")</text>\n";

  // Reference gridline at 0.5 when visible.
  if (lo < 0.5 && 0.5 < hi)
    svg << "<line x1=\"" << num(sx(0.5)) << "\" y1=\"" << top - 10 << "\" x2=\""
        << num(sx(0.5)) << "\" y2=\"" << height - 40
        << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"2,3\"/>\n";

  int y = top;
  for (const auto& s : series.studies) {
    const double cy = y + row_h / 2.0;
    svg << "<text x=\"8\" y=\"" << num(cy + 4) << "\">" << s.study_label
        << "</text>\n";
    svg << "<line x1=\"" << num(sx(s.auc_hat - z * s.se)) << "\" y1=\"" << num(cy)
        << "\" x2=\"" << num(sx(s.auc_hat + z * s.se)) << "\" y2=\"" << num(cy)
        << "\" stroke=\"#333333\"/>\n";
    svg << "<rect x=\"" << num(sx(s.auc_hat) - 4) << "\" y=\"" << num(cy - 4)
        << "\" width=\"8\" height=\"8\" fill=\"#333333\"/>\n";
    svg << "<text x=\"" << plot_x1 + 10 << "\" y=\"" << num(cy + 4) << "\">"
        << num4(s.auc_hat) << " (" << num4(s.se) << ")</text>\n";
    y += row_h;
  }

  // Pooled diamond: the level-confidence interval for the mean.
  {
    const double cy = y + row_h / 2.0;
    const double half = z * pooled.pooled_se;
    svg << "<text x=\"8\" y=\"" << num(cy + 4) << "\">pooled</text>\n";
    svg << "<polygon points=\"" << num(sx(pooled.pooled - half)) << "," << num(cy)
        << " " << num(sx(pooled.pooled)) << "," << num(cy - 7) << " "
        << num(sx(pooled.pooled + half)) << "," << num(cy) << " "
        << num(sx(pooled.pooled)) << "," << num(cy + 7)
        << "\" fill=\"#1f4e99\"/>\n";
    svg << "<text x=\"" << plot_x1 + 10 << "\" y=\"" << num(cy + 4) << "\">"
        << num4(pooled.pooled - half) << " to " << num4(pooled.pooled + half)
        << "</text>\n";
    y += row_h;
  }

  auto whisker_row = [&](const PredictionInterval& pi, const char* name) {
    const double cy = y + row_h / 2.0;
    svg << "<text x=\"8\" y=\"" << num(cy + 4) << "\">" << name << "</text>\n";
    svg << "<line x1=\"" << num(sx(pi.lower)) << "\" y1=\"" << num(cy)
        << "\" x2=\"" << num(sx(pi.upper)) << "\" y2=\"" << num(cy)
        << "\" stroke=\"#992222\" stroke-dasharray=\"5,3\"/>\n";
    for (double v : {pi.lower, pi.upper})
      svg << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << num(cy - 5)
          << "\" x2=\"" << num(sx(v)) << "\" y2=\"" << num(cy + 5)
          << "\" stroke=\"#992222\"/>\n";
    svg << "<text x=\"" << plot_x1 + 10 << "\" y=\"" << num(cy + 4) << "\">"
        << num4(pi.lower) << " to " << num4(pi.upper) << "</text>\n";
    y += row_h;
  };
  whisker_row(pi_true, "PI (true AUC)");
  if (pi_observed) whisker_row(*pi_observed, "PI (observed)");

  // Axis with five ticks.
  const double axis_y = height - 32;
  svg << "<line x1=\"" << plot_x0 << "\" y1=\"" << num(axis_y) << "\" x2=\""
      << plot_x1 << "\" y2=\"" << num(axis_y) << "\" stroke=\"#000000\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    svg << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << num(axis_y) << "\" x2=\""
        << num(sx(v)) << "\" y2=\"" << num(axis_y + 5)
        << "\" stroke=\"#000000\"/>\n";
    svg << "<text x=\"" << num(sx(v) - 14) << "\" y=\"" << num(axis_y + 18)
        << "\">" << num(v) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace aucmeta
