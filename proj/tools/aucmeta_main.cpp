// aucmeta: random-effects and empirical-Bayes meta-analysis of external
// validation AUCs, with prediction intervals for the next study and a
// leave-one-study-out evaluation harness.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "aucmeta/bayes_meta.hpp"
#include "aucmeta/core_model.hpp"
#include "aucmeta/cv_harness.hpp"
#include "aucmeta/errors.hpp"
#include "aucmeta/forest_svg.hpp"
#include "aucmeta/freq_meta.hpp"
#include "aucmeta/intervals.hpp"
#include "aucmeta/registry_io.hpp"
#include "aucmeta/sim_gen.hpp"

namespace {

using json = nlohmann::json;
using namespace aucmeta;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path + "'");
}

SchemaOptions schema_from_flags(const std::vector<std::string>& col_flags) {
  SchemaOptions opt;
  for (const auto& flag : col_flags) {
    const auto eq = flag.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == flag.size())
      throw UsageError("--col expects canonical=actual, got '" + flag + "'");
    opt.column_map[flag.substr(0, eq)] = flag.substr(eq + 1);
  }
  return opt;
}

std::vector<CpmSeries> load_registry(const std::string& path,
                                     const std::vector<std::string>& col_flags,
                                     FilterReport* report = nullptr) {
  auto result = parse_registry(path, schema_from_flags(col_flags));
  if (report != nullptr) *report = result.report;
  return std::move(result.registry);
}

const CpmSeries& find_cpm(const std::vector<CpmSeries>& registry,
                          const std::string& id) {
  for (const auto& s : registry)
    if (s.cpm_label == id) return s;
  throw DataError("no CPM with id '" + id + "' in the input");
}

void print_filter_report(const FilterReport& report) {
  std::cout << "ingested " << report.rows_total << " rows -> kept "
            << report.rows_kept << " validations across " << report.cpms_kept
            << " CPMs (" << report.cpms_seen << " CPM ids seen)\n";
  for (const auto& [reason, count] : report.dropped)
    std::cout << "  dropped " << count << ": " << reason << "\n";
}

void warn_outside_unit(const PredictionInterval& pi, const char* name) {
  if (pi.lower < 0.0 || pi.upper > 1.0)
    std::cout << "note: " << name << " extends outside (0, 1); endpoints are "
              << "reported unclipped\n";
}

// ---------------------------------------------------------------- fit-prior

struct FitPriorArgs {
  std::string input, out;
  std::string mode = "flat";
  std::vector<std::string> cols;
};

void run_fit_prior(const FitPriorArgs& args) {
  FilterReport report;
  const auto registry = load_registry(args.input, args.cols, &report);
  print_filter_report(report);

  const PriorMode mode =
      args.mode == "full" ? PriorMode::FULL : PriorMode::FLAT_AUC;
  const auto prior = fit_hyperparams(registry, mode);

  const auto [tau_mean, tau_var] =
      lognormal_mean_var(prior.hp.mu_tau, prior.hp.sigma_tau);
  std::cout << "fitted prior (" << args.mode << ", " << prior.n_cpms
            << " CPMs / " << prior.n_validations << " validations):\n";
  std::cout << "  mu_tau    = " << fmt6(prior.hp.mu_tau) << "\n";
  std::cout << "  sigma_tau = " << fmt6(prior.hp.sigma_tau) << "\n";
  std::cout << "  mu_auc    = " << fmt6(prior.hp.mu_auc) << "\n";
  std::cout << "  sigma_auc = " << fmt6(prior.hp.sigma_auc) << "\n";
  std::cout << "  E(tau)    = " << fmt6(tau_mean) << "  SD(tau) = "
            << fmt6(std::sqrt(tau_var)) << "  (tau_bar = " << fmt6(tau_bar(prior.hp))
            << ")\n";
  std::cout << "  log marginal likelihood = " << fmt6(prior.loglik) << "\n";

  if (!args.out.empty()) {
    write_file(args.out, fitted_prior_to_json(prior));
    std::cout << "wrote " << args.out << "\n";
  }
}

// --------------------------------------------------------------------- meta

struct MetaArgs {
  std::string input, cpm, method = "fe";
  double level = 0.95;
  std::optional<double> tau;
  std::string prior_path;
  std::optional<double> s_next;
  std::string out_csv, out_json, out_svg;
  std::string spread = "predictive";
  std::vector<std::string> cols;
};

void check_method_flags(const std::string& method, bool has_tau, bool has_prior) {
  if (has_tau && method != "fixed-tau")
    throw UsageError("--tau is only valid with --method fixed-tau");
  if (method == "fixed-tau" && !has_tau)
    throw UsageError("--method fixed-tau requires --tau");
  if (method == "bayes" && !has_prior)
    throw UsageError("--method bayes requires --prior");
  if (has_prior && method != "bayes")
    throw UsageError("--prior is only valid with --method bayes");
}

void run_meta(const MetaArgs& args) {
  const auto registry = load_registry(args.input, args.cols);
  const auto& series = find_cpm(registry, args.cpm);
  check_method_flags(args.method, args.tau.has_value(), !args.prior_path.empty());
  const BayesSpread spread = args.spread == "literal"
                                 ? BayesSpread::POSTERIOR_SD
                                 : BayesSpread::PREDICTIVE;

  MetaResult pooled;
  PredictionInterval pi_true_v;
  std::optional<PredictionInterval> pi_obs_v;
  std::optional<PosteriorSummary> posterior;

  if (args.method == "bayes") {
    const auto prior = fitted_prior_from_json(read_file(args.prior_path));
    posterior = posterior_pooled(series, prior.hp);
    pooled.pooled = posterior->auc_post;
    pooled.pooled_se = posterior->sd_post;
    pooled.tau = posterior->tau_post_mean;
    pooled.method = prior.mode == PriorMode::FULL ? Method::BAYES_FULL
                                                  : Method::BAYES_FLAT;
    pooled.k = series.studies.size();
    pi_true_v = pi_true_next(*posterior, args.level, spread);
    if (args.s_next)
      pi_obs_v = pi_observed_next(*posterior, *args.s_next, args.level, spread);
  } else {
    const auto method = method_from_name(args.method);
    if (!method) throw UsageError("unknown method '" + args.method + "'");
    pooled = pool_with_method(series.studies, *method, args.tau.value_or(0.0));
    pi_true_v = pi_true_next(pooled, args.level);
    if (args.s_next)
      pi_obs_v = pi_observed_next(pooled, *args.s_next, args.level);
  }

  const double z = z_value(args.level);
  const double ci_half = z * pooled.pooled_se;
  std::cout << "cpm " << series.cpm_label << ": k=" << series.studies.size()
            << " method=" << method_name(pooled.method) << "\n";
  std::cout << "  pooled AUC = " << fmt6(pooled.pooled) << " (se "
            << fmt6(pooled.pooled_se) << "), tau = " << fmt6(pooled.tau);
  if (pooled.tau_not_estimable) std::cout << " [not estimable, set to 0]";
  if (pooled.tau_truncated) std::cout << " [truncated at 0]";
  std::cout << "\n";
  std::cout << "  " << fmt6(100.0 * args.level) << "% CI pooled AUC:      ["
            << fmt6(pooled.pooled - ci_half) << ", "
            << fmt6(pooled.pooled + ci_half) << "]\n";
  std::cout << "  " << fmt6(100.0 * args.level) << "% PI true AUC next:   ["
            << fmt6(pi_true_v.lower) << ", " << fmt6(pi_true_v.upper) << "]\n";
  warn_outside_unit(pi_true_v, "true-AUC prediction interval");
  if (pi_obs_v) {
    std::cout << "  " << fmt6(100.0 * args.level) << "% PI observed next:   ["
              << fmt6(pi_obs_v->lower) << ", " << fmt6(pi_obs_v->upper)
              << "]  (s_next = " << fmt6(*args.s_next) << ")\n";
    warn_outside_unit(*pi_obs_v, "observed-AUC prediction interval");
  }
  if (posterior) {
    std::cout << "  posterior: sd_post = " << fmt6(posterior->sd_post)
              << ", E(tau) = " << fmt6(posterior->tau_post_mean)
              << ", E(tau^2) = " << fmt6(posterior->tau2_post_mean)
              << ", predictive sd = " << fmt6(posterior->predictive_sd) << "\n";
  }

  // Forest-plot data rows.
  if (!args.out_csv.empty()) {
    std::ostringstream csv;
    csv << "row,label,value,se,lower,upper\n";
    for (const auto& s : series.studies)
      csv << "study," << s.study_label << ',' << fmt17(s.auc_hat) << ','
          << fmt17(s.se) << ',' << fmt17(s.auc_hat - z * s.se) << ','
          << fmt17(s.auc_hat + z * s.se) << "\n";
    csv << "pooled," << method_name(pooled.method) << ','
        << fmt17(pooled.pooled) << ',' << fmt17(pooled.pooled_se) << ','
        << fmt17(pooled.pooled - ci_half) << ',' << fmt17(pooled.pooled + ci_half)
        << "\n";
    csv << "pi_true,," << fmt17(pi_true_v.center) << ",,"
        << fmt17(pi_true_v.lower) << ',' << fmt17(pi_true_v.upper) << "\n";
    if (pi_obs_v)
      csv << "pi_observed,," << fmt17(pi_obs_v->center) << ",,"
          << fmt17(pi_obs_v->lower) << ',' << fmt17(pi_obs_v->upper) << "\n";
    write_file(args.out_csv, csv.str());
    std::cout << "wrote " << args.out_csv << "\n";
  }
  if (!args.out_json.empty()) {
    json doc;
    doc["cpm"] = series.cpm_label;
    doc["k"] = series.studies.size();
    doc["method"] = method_name(pooled.method);
    doc["level"] = args.level;
    doc["pooled"] = pooled.pooled;
    doc["pooled_se"] = pooled.pooled_se;
    doc["tau"] = pooled.tau;
    doc["tau_not_estimable"] = pooled.tau_not_estimable;
    doc["tau_truncated"] = pooled.tau_truncated;
    doc["ci"] = {pooled.pooled - ci_half, pooled.pooled + ci_half};
    doc["pi_true"] = {pi_true_v.lower, pi_true_v.upper};
    if (pi_obs_v) doc["pi_observed"] = {pi_obs_v->lower, pi_obs_v->upper};
    if (posterior) {
      doc["posterior"] = {{"auc_post", posterior->auc_post},
                          {"sd_post", posterior->sd_post},
                          {"tau_post_mean", posterior->tau_post_mean},
                          {"tau2_post_mean", posterior->tau2_post_mean},
                          {"predictive_sd", posterior->predictive_sd}};
    }
    json studies = json::array();
    for (const auto& s : series.studies)
      studies.push_back({{"label", s.study_label},
                         {"auc", s.auc_hat},
                         {"se", s.se},
                         {"seq", s.sequence_index}});
    doc["studies"] = studies;
    write_file(args.out_json, doc.dump(2) + "\n");
    std::cout << "wrote " << args.out_json << "\n";
  }
  if (!args.out_svg.empty()) {
    write_file(args.out_svg,
               render_forest_svg(series, pooled, pi_true_v, pi_obs_v, args.level));
    std::cout << "wrote " << args.out_svg << "\n";
  }
}

// --------------------------------------------------------------- cumulative

struct CumulativeArgs {
  std::string input, cpm, method = "fe", out;
  double level = 0.95;
  std::optional<double> tau;
  std::string prior_path;
  std::vector<std::string> cols;
};

void run_cumulative(const CumulativeArgs& args) {
  const auto registry = load_registry(args.input, args.cols);
  const auto& series = find_cpm(registry, args.cpm);
  check_method_flags(args.method, args.tau.has_value(), !args.prior_path.empty());

  struct Row {
    std::size_t k;
    MetaResult res;
    PredictionInterval ci, pi;
  };
  std::vector<Row> rows;

  if (args.method == "bayes") {
    const auto prior = fitted_prior_from_json(read_file(args.prior_path));
    for (std::size_t m = 1; m <= series.studies.size(); ++m) {
      CpmSeries prefix;
      prefix.cpm_label = series.cpm_label;
      prefix.studies.assign(series.studies.begin(), series.studies.begin() + m);
      const auto post = posterior_pooled(prefix, prior.hp);
      Row row;
      row.k = m;
      row.res.pooled = post.auc_post;
      row.res.pooled_se = post.sd_post;
      row.res.tau = post.tau_post_mean;
      row.res.method = prior.mode == PriorMode::FULL ? Method::BAYES_FULL
                                                     : Method::BAYES_FLAT;
      row.res.k = m;
      const double z = z_value(args.level);
      row.ci = PredictionInterval{post.auc_post,
                                  post.auc_post - z * post.sd_post,
                                  post.auc_post + z * post.sd_post,
                                  args.level, IntervalTarget::TRUE_AUC};
      row.pi = pi_true_next(post, args.level);
      rows.push_back(row);
    }
  } else {
    const auto method = method_from_name(args.method);
    if (!method) throw UsageError("unknown method '" + args.method + "'");
    const auto curve = cumulative_meta(series, *method, args.tau.value_or(0.0));
    const double z = z_value(args.level);
    for (std::size_t m = 0; m < curve.size(); ++m) {
      Row row;
      row.k = m + 1;
      row.res = curve[m];
      const double half = z * curve[m].pooled_se;
      row.ci = PredictionInterval{curve[m].pooled, curve[m].pooled - half,
                                  curve[m].pooled + half, args.level,
                                  IntervalTarget::TRUE_AUC};
      row.pi = pi_true_next(curve[m], args.level);
      rows.push_back(row);
    }
  }

  std::cout << "cumulative meta-analysis of " << series.cpm_label << " ("
            << args.method << ")\n";
  std::cout << "k pooled se tau ci_lower ci_upper pi_lower pi_upper\n";
  for (const auto& row : rows) {
    std::cout << row.k << ' ' << fmt6(row.res.pooled) << ' '
              << fmt6(row.res.pooled_se) << ' ' << fmt6(row.res.tau) << ' '
              << fmt6(row.ci.lower) << ' ' << fmt6(row.ci.upper) << ' '
              << fmt6(row.pi.lower) << ' ' << fmt6(row.pi.upper);
    if (row.res.tau_not_estimable) std::cout << " tau-not-estimable";
    std::cout << "\n";
  }

  if (!args.out.empty()) {
    std::ostringstream csv;
    csv << "k,pooled,se,tau,ci_lower,ci_upper,pi_lower,pi_upper,tau_not_estimable\n";
    for (const auto& row : rows)
      csv << row.k << ',' << fmt17(row.res.pooled) << ',' << fmt17(row.res.pooled_se)
          << ',' << fmt17(row.res.tau) << ',' << fmt17(row.ci.lower) << ','
          << fmt17(row.ci.upper) << ',' << fmt17(row.pi.lower) << ','
          << fmt17(row.pi.upper) << ',' << (row.res.tau_not_estimable ? 1 : 0)
          << "\n";
    write_file(args.out, csv.str());
    std::cout << "wrote " << args.out << "\n";
  }
}

// ----------------------------------------------------------------------- cv

struct CvArgs {
  std::string input;
  std::string n_spec = "1..5";
  std::vector<std::string> methods{"fe", "reml", "fixed-tau", "bayes-flat",
                                   "bayes-full"};
  std::vector<std::string> prior_paths;
  std::optional<double> tau;
  bool strict = false;
  bool fit_priors = false;
  bool ge5 = false;
  double level = 0.95;
  std::string records_csv, out_json;
  std::vector<std::string> cols;
};

std::vector<std::size_t> parse_n_spec(const std::string& spec) {
  std::vector<std::size_t> out;
  const auto dots = spec.find("..");
  auto to_n = [](const std::string& s) {
    try {
      const unsigned long v = std::stoul(s);
      if (v == 0) throw std::out_of_range("zero");
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw UsageError("bad --n value '" + s + "'");
    }
  };
  if (dots != std::string::npos) {
    const std::size_t lo = to_n(spec.substr(0, dots));
    const std::size_t hi = to_n(spec.substr(dots + 2));
    if (hi < lo) throw UsageError("bad --n range '" + spec + "'");
    for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(to_n(tok));
  if (out.empty()) throw UsageError("empty --n specification");
  return out;
}

struct ResolvedMethod {
  std::string name;
  MethodSpec spec;
  std::optional<HyperParams> hp;
};

void print_prior_summary(const FittedPrior& prior) {
  std::cout << "prior (" << (prior.mode == PriorMode::FULL ? "full" : "flat")
            << "): mu_tau " << fmt6(prior.hp.mu_tau) << ", sigma_tau "
            << fmt6(prior.hp.sigma_tau) << ", mu_auc " << fmt6(prior.hp.mu_auc)
            << ", sigma_auc " << fmt6(prior.hp.sigma_auc) << ", tau_bar "
            << fmt6(tau_bar(prior.hp)) << "\n";
}

void run_cv(const CvArgs& args) {
  FilterReport report;
  const auto registry = load_registry(args.input, args.cols, &report);
  print_filter_report(report);

  std::optional<FittedPrior> flat_prior, full_prior;
  for (const auto& path : args.prior_paths) {
    const auto prior = fitted_prior_from_json(read_file(path));
    (prior.mode == PriorMode::FULL ? full_prior : flat_prior) = prior;
  }

  const bool wants_flat =
      std::count(args.methods.begin(), args.methods.end(), "bayes-flat") > 0 ||
      (std::count(args.methods.begin(), args.methods.end(), "fixed-tau") > 0 &&
       !args.tau);
  const bool wants_full =
      std::count(args.methods.begin(), args.methods.end(), "bayes-full") > 0;
  if (args.fit_priors) {
    if (wants_flat && !flat_prior) {
      std::cout << "fitting flat-AUC prior...\n";
      flat_prior = fit_hyperparams(registry, PriorMode::FLAT_AUC);
    }
    if (wants_full && !full_prior) {
      std::cout << "fitting full prior...\n";
      full_prior = fit_hyperparams(registry, PriorMode::FULL);
    }
  }
  if (flat_prior) print_prior_summary(*flat_prior);
  if (full_prior) print_prior_summary(*full_prior);

  std::vector<ResolvedMethod> methods;
  for (const auto& name : args.methods) {
    ResolvedMethod rm;
    rm.name = name;
    if (name == "fe") {
      rm.spec.method = Method::FE;
    } else if (name == "reml") {
      rm.spec.method = Method::RE_REML;
    } else if (name == "dl") {
      rm.spec.method = Method::RE_DL;
    } else if (name == "sj") {
      rm.spec.method = Method::RE_SJ;
    } else if (name == "fixed-tau") {
      rm.spec.method = Method::RE_FIXED_TAU;
      if (args.tau)
        rm.spec.fixed_tau = *args.tau;
      else if (flat_prior)
        rm.spec.fixed_tau = tau_bar(flat_prior->hp);
      else
        throw UsageError("fixed-tau needs --tau or a flat prior "
                         "(--prior/--fit-priors)");
    } else if (name == "bayes-flat") {
      rm.spec.method = Method::BAYES_FLAT;
      if (!flat_prior)
        throw UsageError("bayes-flat needs a flat prior (--prior/--fit-priors)");
      rm.hp = flat_prior->hp;
    } else if (name == "bayes-full") {
      rm.spec.method = Method::BAYES_FULL;
      if (!full_prior)
        throw UsageError("bayes-full needs a full prior (--prior/--fit-priors)");
      rm.hp = full_prior->hp;
    } else {
      throw UsageError("unknown method '" + name + "' in --methods");
    }
    methods.push_back(std::move(rm));
  }

  const auto hist = validation_count_histogram(registry);
  std::cout << "validation-count histogram (median " << fmt6(hist.median)
            << ", IQR [" << fmt6(hist.q1) << ", " << fmt6(hist.q3) << "]):\n";
  for (const auto& [k, count] : hist.counts)
    std::cout << "  k=" << k << ": " << count << "\n";

  struct Cell {
    std::size_t n;
    bool aggregate;
    std::string method;
    Coverage cov;
    double rmse_v;
    std::size_t skipped;
  };
  std::vector<Cell> cells;
  std::ostringstream records_csv;
  records_csv << "n,mode,method,cpm_id,n_used,predicted,lower,upper,actual,"
                 "covered,error\n";

  const auto ns = parse_n_spec(args.n_spec);
  struct Pass {
    std::size_t n;
    LosoMode mode;
  };
  std::vector<Pass> passes;
  for (std::size_t n : ns) passes.push_back({n, LosoMode::EXACT_N});
  if (args.ge5) passes.push_back({5, LosoMode::AT_LEAST_N});

  std::cout << "\nn method records skipped coverage (se) rmse\n";
  for (const auto& pass : passes) {
    for (const auto& rm : methods) {
      const LosoResult res =
          args.strict
              ? loso_eval_strict(registry, pass.n, rm.spec, args.level, pass.mode)
              : loso_eval(registry, pass.n, rm.spec, rm.hp, args.level, pass.mode);
      if (res.records.empty()) {
        std::cout << pass.n << (pass.mode == LosoMode::AT_LEAST_N ? "+" : "")
                  << " " << rm.name << ": no eligible CPMs\n";
        continue;
      }
      const auto cov = coverage(res.records);
      const double err = rmse(res.records);
      cells.push_back({pass.n, pass.mode == LosoMode::AT_LEAST_N, rm.name, cov,
                       err, res.skipped_cpms});
      std::cout << pass.n << (pass.mode == LosoMode::AT_LEAST_N ? "+" : "")
                << " " << rm.name << " " << cov.n_records << " "
                << res.skipped_cpms << " " << fmt6(cov.estimate) << " ("
                << fmt6(cov.se) << ") " << fmt6(err) << "\n";
      if (!args.records_csv.empty()) {
        for (const auto& r : res.records)
          records_csv << pass.n << ','
                      << (pass.mode == LosoMode::AT_LEAST_N ? "at_least" : "exact")
                      << ',' << rm.name << ',' << r.cpm_label << ',' << r.n_used
                      << ',' << fmt17(r.predicted) << ',' << fmt17(r.interval.lower)
                      << ',' << fmt17(r.interval.upper) << ',' << fmt17(r.actual)
                      << ',' << (r.covered ? 1 : 0) << ',' << fmt17(r.error)
                      << "\n";
      }
    }
  }

  if (!args.records_csv.empty()) {
    write_file(args.records_csv, records_csv.str());
    std::cout << "wrote " << args.records_csv << "\n";
  }
  if (!args.out_json.empty()) {
    json doc;
    doc["level"] = args.level;
    doc["strict_loo"] = args.strict;
    json hist_json;
    for (const auto& [k, count] : hist.counts)
      hist_json[std::to_string(k)] = count;
    doc["histogram"] = {{"counts", hist_json},
                        {"median", hist.median},
                        {"q1", hist.q1},
                        {"q3", hist.q3}};
    if (flat_prior) doc["flat_prior"] = json::parse(fitted_prior_to_json(*flat_prior));
    if (full_prior) doc["full_prior"] = json::parse(fitted_prior_to_json(*full_prior));
    json results = json::array();
    for (const auto& c : cells)
      results.push_back({{"n", c.n},
                         {"mode", c.aggregate ? "at_least" : "exact"},
                         {"method", c.method},
                         {"records", c.cov.n_records},
                         {"skipped_cpms", c.skipped},
                         {"coverage", c.cov.estimate},
                         {"coverage_se", c.cov.se},
                         {"rmse", c.rmse_v}});
    doc["results"] = results;
    write_file(args.out_json, doc.dump(2) + "\n");
    std::cout << "wrote " << args.out_json << "\n";
  }
}

// ----------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config_path, out, truth;
};

void run_simulate(const SimulateArgs& args) {
  const auto config = sim_config_from_json(read_file(args.config_path));
  const auto sim = generate_registry(config);
  write_registry(sim.registry, args.out);
  std::size_t total = 0;
  for (const auto& s : sim.registry) total += s.studies.size();
  std::cout << "simulated " << sim.registry.size() << " CPMs with " << total
            << " validations (seed " << config.seed << ") -> " << args.out
            << "\n";
  if (!args.truth.empty()) {
    std::ostringstream csv;
    csv << "cpm_id,seq,auc_i,tau_i,auc_ij\n";
    for (std::size_t i = 0; i < sim.registry.size(); ++i) {
      const auto& label = sim.registry[i].cpm_label;
      const auto& truth = sim.truth[i];
      for (std::size_t j = 0; j < truth.auc_ij.size(); ++j)
        csv << label << ',' << j << ',' << fmt17(truth.auc_i) << ','
            << fmt17(truth.tau_i) << ',' << fmt17(truth.auc_ij[j]) << "\n";
    }
    write_file(args.truth, csv.str());
    std::cout << "wrote " << args.truth << "\n";
  }
}

// ------------------------------------------------------------------- report

struct ReportArgs {
  std::string input;
  std::vector<std::string> prior_paths;
  bool fit_priors = false;
  std::string scatter;
  std::string n_spec = "1..3";
  std::vector<std::string> cols;
};

void run_report(const ReportArgs& args) {
  FilterReport report;
  const auto registry = load_registry(args.input, args.cols, &report);
  print_filter_report(report);

  const auto hist = validation_count_histogram(registry);
  std::cout << "\nvalidation counts: median " << fmt6(hist.median) << ", IQR ["
            << fmt6(hist.q1) << ", " << fmt6(hist.q3) << "]\n";
  std::size_t singletons = hist.counts.count(1) ? hist.counts.at(1) : 0;
  std::cout << "CPMs with exactly one validation: " << singletons << "/"
            << registry.size() << "\n";

  CvArgs cv;
  cv.input = args.input;
  cv.n_spec = args.n_spec;
  cv.prior_paths = args.prior_paths;
  cv.fit_priors = true;  // fit whichever prior was not supplied
  cv.cols = args.cols;
  std::cout << "\nleave-one-study-out comparison:\n";
  run_cv(cv);

  if (!args.scatter.empty()) {
    std::ostringstream csv;
    csv << "cpm_id,dev_auc,val_auc,val_se\n";
    for (const auto& s : registry) {
      if (!s.development_auc) continue;
      for (const auto& v : s.studies)
        csv << s.cpm_label << ',' << fmt17(*s.development_auc) << ','
            << fmt17(v.auc_hat) << ',' << fmt17(v.se) << "\n";
    }
    write_file(args.scatter, csv.str());
    std::cout << "wrote " << args.scatter << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meta-analysis of external-validation AUCs with empirical-Bayes "
               "prediction intervals"};
  app.require_subcommand(1);

  FitPriorArgs fit_args;
  auto* fit = app.add_subcommand(
      "fit-prior", "fit the hierarchical prior across all CPMs");
  fit->add_option("--input", fit_args.input, "registry CSV")->required();
  fit->add_option("--mode", fit_args.mode, "flat|full")
      ->check(CLI::IsMember({"flat", "full"}));
  fit->add_option("--out", fit_args.out, "write the fitted prior JSON");
  fit->add_option("--col", fit_args.cols, "rename a column: canonical=actual");

  MetaArgs meta_args;
  auto* meta = app.add_subcommand("meta", "pool one CPM and print both "
                                          "prediction intervals");
  meta->add_option("--input", meta_args.input, "registry CSV")->required();
  meta->add_option("--cpm", meta_args.cpm, "CPM id")->required();
  meta->add_option("--method", meta_args.method,
                   "fe|reml|dl|sj|fixed-tau|bayes");
  meta->add_option("--tau", meta_args.tau, "fixed tau (fixed-tau only)");
  meta->add_option("--prior", meta_args.prior_path, "prior JSON (bayes only)");
  meta->add_option("--level", meta_args.level, "interval level (default 0.95)");
  meta->add_option("--s-next", meta_args.s_next,
                   "standard error of the next study (adds the observed-AUC "
                   "interval)");
  meta->add_option("--spread", meta_args.spread, "predictive|literal")
      ->check(CLI::IsMember({"predictive", "literal"}));
  meta->add_option("--out", meta_args.out_csv, "forest-plot data CSV");
  meta->add_option("--json", meta_args.out_json, "result JSON");
  meta->add_option("--svg", meta_args.out_svg, "forest-plot SVG");
  meta->add_option("--col", meta_args.cols, "rename a column");

  CumulativeArgs cum_args;
  auto* cum = app.add_subcommand("cumulative",
                                 "interval bounds versus number of studies");
  cum->add_option("--input", cum_args.input, "registry CSV")->required();
  cum->add_option("--cpm", cum_args.cpm, "CPM id")->required();
  cum->add_option("--method", cum_args.method, "fe|reml|dl|sj|fixed-tau|bayes");
  cum->add_option("--tau", cum_args.tau, "fixed tau (fixed-tau only)");
  cum->add_option("--prior", cum_args.prior_path, "prior JSON (bayes only)");
  cum->add_option("--level", cum_args.level, "interval level");
  cum->add_option("--out", cum_args.out, "write the table as CSV");
  cum->add_option("--col", cum_args.cols, "rename a column");

  CvArgs cv_args;
  auto* cv = app.add_subcommand("cv", "leave-one-study-out coverage and RMSE");
  cv->add_option("--input", cv_args.input, "registry CSV")->required();
  cv->add_option("--n", cv_args.n_spec, "study counts: 1..5, 3, or 1,3,5");
  cv->add_option("--methods", cv_args.methods,
                 "fe,reml,dl,sj,fixed-tau,bayes-flat,bayes-full")
      ->delimiter(',');
  cv->add_option("--prior", cv_args.prior_paths,
                 "prior JSON (repeatable; mode read from the file)");
  cv->add_option("--tau", cv_args.tau, "fixed tau for fixed-tau");
  cv->add_flag("--fit-priors", cv_args.fit_priors,
               "fit missing priors on the input first");
  cv->add_flag("--strict-loo", cv_args.strict,
               "refit the prior without the evaluated CPM");
  cv->add_flag("--ge5", cv_args.ge5,
               "add an 'n >= 5' aggregate pass (fit on all but the last study)");
  cv->add_option("--level", cv_args.level, "interval level");
  cv->add_option("--records", cv_args.records_csv, "per-record CSV");
  cv->add_option("--out", cv_args.out_json, "summary JSON");
  cv->add_option("--col", cv_args.cols, "rename a column");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "sample a synthetic registry");
  sim->add_option("--config", sim_args.config_path, "SimConfig JSON")->required();
  sim->add_option("--out", sim_args.out, "registry CSV to write")->required();
  sim->add_option("--truth", sim_args.truth, "latent-truth CSV to write");

  ReportArgs report_args;
  auto* rep = app.add_subcommand("report", "one-shot registry summary");
  rep->add_option("--input", report_args.input, "registry CSV")->required();
  rep->add_option("--prior", report_args.prior_paths, "prior JSON (repeatable)");
  rep->add_flag("--fit-priors", report_args.fit_priors,
                "fit priors on the input");
  rep->add_option("--scatter", report_args.scatter,
                  "write development-vs-validation scatter CSV");
  rep->add_option("--n", report_args.n_spec, "CV study counts");
  rep->add_option("--col", report_args.cols, "rename a column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (fit->parsed()) run_fit_prior(fit_args);
    if (meta->parsed()) run_meta(meta_args);
    if (cum->parsed()) run_cumulative(cum_args);
    if (cv->parsed()) run_cv(cv_args);
    if (sim->parsed()) run_simulate(sim_args);
    if (rep->parsed()) run_report(report_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const InsufficientData& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DegenerateData& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
