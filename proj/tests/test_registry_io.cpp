#include <sstream>

#include "aucmeta/errors.hpp"
#include "aucmeta/registry_io.hpp"
#include "doctest.h"

using namespace aucmeta;

namespace {

ParseResult parse_text(const std::string& text, const SchemaOptions& opt = {}) {
  std::istringstream in(text);
  return parse_registry_stream(in, opt);
}

}  // namespace

TEST_CASE("parse_registry reads se directly or derives it from the CI") {
  const auto res = parse_text(
      "cpm_id,study_id,auc,se,ci_lower,ci_upper\n"
      "model-a,v1,0.82,,0.77,0.87\n"
      "model-a,v2,0.68,0.02,,\n");
  REQUIRE(res.registry.size() == 1);
  const auto& s = res.registry[0];
  REQUIRE(s.studies.size() == 2);
  // (0.87 - 0.77) / (2 * 1.96)
  CHECK(s.studies[0].se == doctest::Approx(0.025510204081632654).epsilon(1e-12));
  CHECK(s.studies[1].se == doctest::Approx(0.02));
  CHECK(s.studies[0].study_label == "v1");
  CHECK(res.report.rows_total == 2);
  CHECK(res.report.rows_kept == 2);
  CHECK(res.report.cpms_seen == 1);
  CHECK(res.report.cpms_kept == 1);
}

TEST_CASE("rows failing completeness are dropped and tallied") {
  const auto res = parse_text(
      "cpm_id,auc,se\n"
      "a,0.7,0.05\n"
      "a,1.5,0.05\n"    // auc out of range
      "a,0.8,\n"        // missing se
      "a,,0.05\n"       // missing auc
      "a,0.72,-0.01\n"  // nonpositive se
      ",0.7,0.05\n"     // missing cpm id
      "b,0.66,0.03\n");
  CHECK(res.report.rows_total == 7);
  CHECK(res.report.rows_kept == 2);
  CHECK(res.report.dropped.at("auc_out_of_range") == 1);
  CHECK(res.report.dropped.at("missing_se") == 1);
  CHECK(res.report.dropped.at("missing_auc") == 1);
  CHECK(res.report.dropped.at("nonpositive_se") == 1);
  CHECK(res.report.dropped.at("missing_cpm_id") == 1);
  // Accounting identity.
  CHECK(res.report.rows_total == res.report.rows_kept + res.report.rows_dropped());
  CHECK(res.registry.size() == 2);
}

TEST_CASE("column mapping adapts foreign headers") {
  SchemaOptions opt;
  opt.column_map = {{"cpm_id", "Model"}, {"auc", "AUROC"}, {"se", "StdErr"}};
  const auto res = parse_text(
      "Model,AUROC,StdErr\n"
      "m1,0.71,0.04\n",
      opt);
  REQUIRE(res.registry.size() == 1);
  CHECK(res.registry[0].cpm_label == "m1");
  CHECK(res.registry[0].studies[0].auc_hat == doctest::Approx(0.71));
}

TEST_CASE("sequence column orders studies; file order is the fallback") {
  const auto res = parse_text(
      "cpm_id,seq,auc,se\n"
      "a,3,0.70,0.05\n"
      "a,1,0.80,0.04\n"
      "a,2,0.75,0.03\n");
  REQUIRE(res.registry.size() == 1);
  const auto& studies = res.registry[0].studies;
  CHECK(studies[0].auc_hat == doctest::Approx(0.80));
  CHECK(studies[1].auc_hat == doctest::Approx(0.75));
  CHECK(studies[2].auc_hat == doctest::Approx(0.70));
  CHECK(studies[0].sequence_index == 0);
  CHECK(studies[2].sequence_index == 2);

  const auto byfile = parse_text(
      "cpm_id,auc,se\n"
      "a,0.70,0.05\n"
      "a,0.80,0.04\n");
  CHECK(byfile.registry[0].studies[0].auc_hat == doctest::Approx(0.70));
  CHECK(byfile.registry[0].studies[1].auc_hat == doctest::Approx(0.80));
}

TEST_CASE("development AUC is optional and attached once per CPM") {
  const auto res = parse_text(
      "cpm_id,auc,se,dev_auc\n"
      "a,0.70,0.05,0.78\n"
      "a,0.72,0.04,0.78\n"
      "b,0.66,0.03,\n");
  REQUIRE(res.registry.size() == 2);
  REQUIRE(res.registry[0].development_auc.has_value());
  CHECK(*res.registry[0].development_auc == doctest::Approx(0.78));
  CHECK_FALSE(res.registry[1].development_auc.has_value());
}

TEST_CASE("CRLF input and quoted fields parse cleanly") {
  const auto res = parse_text(
      "cpm_id,auc,se\r\n"
      "\"model one\",0.7,0.05\r\n");
  REQUIRE(res.registry.size() == 1);
  CHECK(res.registry[0].cpm_label == "model one");
}

TEST_CASE("structured ingestion errors") {
  CHECK_THROWS_AS(parse_text(""), DataError);
  CHECK_THROWS_AS(parse_text("study,value\nx,1\n"), DataError);
  CHECK_THROWS_AS(parse_text("cpm_id,auc\na,0.7\n"), DataError);  // no se source
  // Header only: nothing survives.
  CHECK_THROWS_AS(parse_text("cpm_id,auc,se\n"), DataError);
  // All rows dropped.
  CHECK_THROWS_AS(parse_text("cpm_id,auc,se\na,1.7,0.05\n"), DataError);
  CHECK_THROWS_AS(parse_registry("/nonexistent/path.csv"), DataError);
}

TEST_CASE("writer emits the canonical schema at full precision") {
  const auto res = parse_text(
      "cpm_id,auc,se,dev_auc\n"
      "a,0.7012345678901234,0.05,0.78\n"
      "b,0.66,0.03,\n");
  const std::string csv = registry_to_csv(res.registry);
  CHECK(csv.rfind("cpm_id,study_id,seq,auc,se,dev_auc\n", 0) == 0);

  std::istringstream in(csv);
  const auto back = parse_registry_stream(in);
  REQUIRE(back.registry.size() == res.registry.size());
  CHECK(back.registry[0].studies[0].auc_hat ==
        res.registry[0].studies[0].auc_hat);
  CHECK(back.registry[0].development_auc == res.registry[0].development_auc);
}
