#include "gridfisher/cli.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>

#ifndef GRIDFISHER_VERSION
#define GRIDFISHER_VERSION "0.0.0"
#endif

namespace gridfisher::cli {

namespace {

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_real(v);
        } else if constexpr (std::is_same_v<T, long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
        }
        return v;
      },
      c);
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const RunConfig& cfg, const Table& table) {
  out << "# command=" << cfg.command() << '\n';
  out << "# version=" << GRIDFISHER_VERSION << '\n';
  for (const auto& [k, v] : cfg.values()) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
  for (const auto& [k, v] : table.summary) out << "# " << k << '=' << cell_text(v) << '\n';
}

void write_json(std::ostream& out, const RunConfig& cfg, const Table& table) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json config;
  config["command"] = cfg.command();
  config["version"] = GRIDFISHER_VERSION;
  for (const auto& [k, v] : cfg.values()) config[k] = v;
  j["config"] = config;
  j["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) r.push_back(cell_json(c));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.summary) summary[k] = cell_json(v);
  j["summary"] = summary;
  out << j.dump(2) << '\n';
}

}  // namespace gridfisher::cli
