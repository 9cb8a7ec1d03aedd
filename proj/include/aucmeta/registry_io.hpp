#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "aucmeta/types.hpp"

namespace aucmeta {

// Canonical CSV columns: cpm_id, study_id, seq, auc, se, ci_lower,
// ci_upper, dev_auc. Required per row: cpm_id, auc, and either se or the
// CI pair (se is derived as (ci_upper - ci_lower) / (2 * 1.96) when
// absent). column_map renames canonical to actual header names.
struct SchemaOptions {
  std::map<std::string, std::string> column_map;
};

struct FilterReport {
  std::size_t rows_total = 0;
  std::size_t rows_kept = 0;
  std::map<std::string, std::size_t> dropped;  // reason -> count
  std::size_t cpms_seen = 0;
  std::size_t cpms_kept = 0;

  std::size_t rows_dropped() const {
    std::size_t total = 0;
    for (const auto& [reason, count] : dropped) total += count;
    return total;
  }
};

struct ParseResult {
  std::vector<CpmSeries> registry;
  FilterReport report;
};

ParseResult parse_registry(const std::string& path,
                           const SchemaOptions& options = {});
ParseResult parse_registry_stream(std::istream& in,
                                  const SchemaOptions& options = {});

void write_registry(const std::vector<CpmSeries>& registry,
                    const std::string& path);
std::string registry_to_csv(const std::vector<CpmSeries>& registry);

}  // namespace aucmeta
