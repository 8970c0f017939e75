#include "taskspace/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace taskspace {

std::optional<Format> parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  if (name == "text") return Format::Text;
  return std::nullopt;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

nlohmann::ordered_json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

double read_number(const nlohmann::ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

}  // namespace

nlohmann::ordered_json to_json(const Report& report) {
  nlohmann::ordered_json j;
  j["command"] = report.command;
  j["system"] = {{"types", report.system.types},
                 {"rules", report.system.rules},
                 {"init", report.system.init},
                 {"names", report.system.names}};
  j["classification"] = report.classification ? nlohmann::ordered_json(*report.classification) : nullptr;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["k"] = r.k ? nlohmann::ordered_json(*r.k) : nullptr;
    row["quantity"] = r.quantity;
    row["type"] = r.type;
    row["value"] = number_or_string(r.value);
    row["stderr"] = r.standard_error ? number_or_string(*r.standard_error) : nullptr;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["notes"] = report.notes;
  nlohmann::ordered_json prov = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.provenance) prov[key] = value;
  j["provenance"] = std::move(prov);
  return j;
}

Report report_from_json(const nlohmann::ordered_json& j) {
  Report r;
  r.command = j.at("command").get<std::string>();
  const auto& sys = j.at("system");
  r.system.types = sys.at("types").get<std::size_t>();
  r.system.rules = sys.at("rules").get<std::size_t>();
  r.system.init = sys.at("init").get<std::string>();
  r.system.names = sys.at("names").get<std::vector<std::string>>();
  if (!j.at("classification").is_null()) r.classification = j.at("classification").get<std::string>();
  for (const auto& row : j.at("rows")) {
    ReportRow out;
    if (!row.at("k").is_null()) out.k = row.at("k").get<std::int64_t>();
    out.quantity = row.at("quantity").get<std::string>();
    out.type = row.at("type").get<std::string>();
    out.value = read_number(row.at("value"));
    if (!row.at("stderr").is_null()) out.standard_error = read_number(row.at("stderr"));
    r.rows.push_back(std::move(out));
  }
  r.notes = j.at("notes").get<std::vector<std::string>>();
  for (const auto& [key, value] : j.at("provenance").items()) r.provenance.emplace_back(key, value.get<std::string>());
  return r;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string emit_csv(const Report& report) {
  std::string out = "k,quantity,type,value,stderr\n";
  for (const auto& r : report.rows) {
    if (r.k) out += std::to_string(*r.k);
    out += ',' + csv_field(r.quantity) + ',' + csv_field(r.type) + ',' + format_number(r.value) + ',';
    if (r.standard_error) out += format_number(*r.standard_error);
    out += '\n';
  }
  return out;
}

std::string emit_json(const Report& report) { return to_json(report).dump(2) + "\n"; }

std::string emit_text(const Report& report) {
  std::ostringstream os;
  os << report.command << ": " << report.system.types << " types, " << report.system.rules << " rules, init "
     << report.system.init << "\n";
  if (report.classification) os << *report.classification << "\n";

  std::vector<std::array<std::string, 5>> cells;
  cells.push_back({"k", "quantity", "type", "value", "stderr"});
  for (const auto& r : report.rows)
    cells.push_back({r.k ? std::to_string(*r.k) : "", r.quantity, r.type, format_number(r.value),
                     r.standard_error ? format_number(*r.standard_error) : ""});
  if (!report.rows.empty()) {
    std::array<std::size_t, 5> width{};
    for (const auto& row : cells)
      for (std::size_t c = 0; c < 5; ++c) width[c] = std::max(width[c], row[c].size());
    for (const auto& row : cells) {
      std::string line;
      for (std::size_t c = 0; c < 5; ++c) {
        if (c > 0) line += "  ";
        line += row[c] + std::string(width[c] - row[c].size(), ' ');
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      os << line << "\n";
    }
  }
  for (const auto& n : report.notes) os << "note: " << n << "\n";
  return os.str();
}

std::string emit(const Report& report, Format format) {
  switch (format) {
    case Format::Csv: return emit_csv(report);
    case Format::Json: return emit_json(report);
    case Format::Text: return emit_text(report);
  }
  return {};
}

}  // namespace taskspace
