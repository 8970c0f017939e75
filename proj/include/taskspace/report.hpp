#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace taskspace {

/// One output row. Per-k rows carry k; scalar rows leave it empty. `type` is
/// the task type the value refers to (the initial type for whole-system
/// quantities) and may be empty.
struct ReportRow {
  std::optional<std::int64_t> k;
  std::string quantity;
  std::string type;
  double value = 0.0;
  std::optional<double> standard_error;

  bool operator==(const ReportRow&) const = default;
};

struct SystemSummary {
  std::size_t types = 0;
  std::size_t rules = 0;
  std::string init;
  std::vector<std::string> names;

  bool operator==(const SystemSummary&) const = default;
};

struct Report {
  std::string command;
  SystemSummary system;
  std::optional<std::string> classification;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
  /// Tool version, tolerances, seeds; values rendered as strings.
  std::vector<std::pair<std::string, std::string>> provenance;

  bool operator==(const Report&) const = default;
};

enum class Format { Csv, Json, Text };

std::optional<Format> parse_format(const std::string& name);

/// Shortest round-trip decimal form.
std::string format_number(double x);

nlohmann::ordered_json to_json(const Report& report);
Report report_from_json(const nlohmann::ordered_json& j);

/// CSV header `k,quantity,type,value,stderr`; empty cells for absent fields.
std::string emit_csv(const Report& report);
std::string emit_json(const Report& report);
std::string emit_text(const Report& report);
std::string emit(const Report& report, Format format);

}  // namespace taskspace
