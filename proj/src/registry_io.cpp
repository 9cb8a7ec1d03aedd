#include "aucmeta/registry_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "aucmeta/errors.hpp"

namespace aucmeta {
namespace {

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  s.erase(0, i);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      field.push_back(c);
    } else if (c == ',' && !quoted) {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(trim(field));
  return fields;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  const char* end = begin + s.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

struct RawRow {
  std::string cpm_id;
  std::string study_id;
  std::optional<long long> seq;
  double auc = 0.0;
  double se = 0.0;
  std::optional<double> dev_auc;
  std::size_t arrival = 0;
};

constexpr double kCiToSe = 2.0 * 1.96;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ParseResult parse_registry_stream(std::istream& in,
                                  const SchemaOptions& options) {
  std::string line;
  if (!std::getline(in, line))
    throw DataError("registry CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_csv(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(header[i], i);

  auto find_col = [&](const std::string& canonical) -> std::optional<std::size_t> {
    std::string actual = canonical;
    auto it = options.column_map.find(canonical);
    if (it != options.column_map.end()) actual = it->second;
    auto hit = col.find(actual);
    if (hit == col.end()) return std::nullopt;
    return hit->second;
  };

  const auto c_cpm = find_col("cpm_id");
  const auto c_study = find_col("study_id");
  const auto c_seq = find_col("seq");
  const auto c_auc = find_col("auc");
  const auto c_se = find_col("se");
  const auto c_lo = find_col("ci_lower");
  const auto c_hi = find_col("ci_upper");
  const auto c_dev = find_col("dev_auc");

  if (!c_cpm) throw DataError("registry CSV: header lacks a cpm_id column");
  if (!c_auc) throw DataError("registry CSV: header lacks an auc column");
  if (!c_se && !(c_lo && c_hi))
    throw DataError(
        "registry CSV: header needs an se column or a ci_lower/ci_upper pair");

  ParseResult out;
  FilterReport& report = out.report;

  std::vector<std::string> cpm_order;
  std::unordered_map<std::string, std::vector<RawRow>> groups;
  std::unordered_map<std::string, double> dev_by_cpm;

  auto drop = [&](const char* reason) { report.dropped[reason] += 1; };

  std::size_t arrival = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    report.rows_total += 1;
    const auto fields = split_csv(line);
    auto at = [&](std::optional<std::size_t> idx) -> std::string {
      if (!idx || *idx >= fields.size()) return {};
      return fields[*idx];
    };

    RawRow row;
    row.arrival = arrival++;
    row.cpm_id = at(c_cpm);
    if (row.cpm_id.empty()) {
      drop("missing_cpm_id");
      continue;
    }
    if (groups.find(row.cpm_id) == groups.end()) cpm_order.push_back(row.cpm_id);
    auto& group = groups[row.cpm_id];  // counts the CPM even if its rows all drop

    const auto auc = parse_double(at(c_auc));
    if (!auc) {
      drop("missing_auc");
      continue;
    }
    if (!(*auc > 0.0 && *auc < 1.0)) {
      drop("auc_out_of_range");
      continue;
    }

    std::optional<double> se = c_se ? parse_double(at(c_se)) : std::nullopt;
    if (!se && c_lo && c_hi) {
      const auto lo = parse_double(at(c_lo));
      const auto hi = parse_double(at(c_hi));
      if (lo && hi) se = (*hi - *lo) / kCiToSe;
    }
    if (!se) {
      drop("missing_se");
      continue;
    }
    if (!(*se > 0.0) || !std::isfinite(*se)) {
      drop("nonpositive_se");
      continue;
    }

    row.auc = *auc;
    row.se = *se;
    row.study_id = at(c_study);
    if (c_seq) {
      const std::string raw = at(c_seq);
      if (!raw.empty()) {
        const auto parsed = parse_double(raw);
        if (!parsed || *parsed != std::floor(*parsed)) {
          drop("malformed_seq");
          continue;
        }
        row.seq = static_cast<long long>(*parsed);
      }
    }
    if (c_dev) {
      const auto dev = parse_double(at(c_dev));
      if (dev && *dev > 0.0 && *dev < 1.0 &&
          dev_by_cpm.find(row.cpm_id) == dev_by_cpm.end())
        dev_by_cpm.emplace(row.cpm_id, *dev);
    }
    group.push_back(std::move(row));
    report.rows_kept += 1;
  }

  report.cpms_seen = cpm_order.size();
  for (const auto& id : cpm_order) {
    auto& rows = groups[id];
    if (rows.empty()) continue;
    std::stable_sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) {
      const long long sa = a.seq.value_or(static_cast<long long>(a.arrival));
      const long long sb = b.seq.value_or(static_cast<long long>(b.arrival));
      if (sa != sb) return sa < sb;
      return a.arrival < b.arrival;
    });
    CpmSeries series;
    series.cpm_label = id;
    auto dev = dev_by_cpm.find(id);
    if (dev != dev_by_cpm.end()) series.development_auc = dev->second;
    series.studies.reserve(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      ValidationStudy study;
      study.auc_hat = rows[j].auc;
      study.se = rows[j].se;
      study.study_label =
          rows[j].study_id.empty() ? id + "-v" + std::to_string(j + 1)
                                   : rows[j].study_id;
      study.sequence_index = static_cast<std::int64_t>(j);
      series.studies.push_back(std::move(study));
    }
    validate(series);
    out.registry.push_back(std::move(series));
  }
  report.cpms_kept = out.registry.size();

  if (out.registry.empty())
    throw DataError("registry CSV: no rows survived filtering");
  return out;
}

ParseResult parse_registry(const std::string& path,
                           const SchemaOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("registry CSV: cannot open '" + path + "'");
  return parse_registry_stream(in, options);
}

std::string registry_to_csv(const std::vector<CpmSeries>& registry) {
  std::ostringstream out;
  out << "cpm_id,study_id,seq,auc,se,dev_auc\n";
  for (const auto& series : registry) {
    for (const auto& study : series.studies) {
      out << series.cpm_label << ',' << study.study_label << ','
          << study.sequence_index << ',' << format_double(study.auc_hat) << ','
          << format_double(study.se) << ',';
      if (series.development_auc) out << format_double(*series.development_auc);
      out << '\n';
    }
  }
  return out.str();
}

void write_registry(const std::vector<CpmSeries>& registry,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("registry CSV: cannot write '" + path + "'");
  out << registry_to_csv(registry);
  if (!out) throw DataError("registry CSV: write failed for '" + path + "'");
}

}  // namespace aucmeta
