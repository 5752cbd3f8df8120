#pragma once

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "error.hpp"

namespace icec {

struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Metadata every output file carries.
inline std::vector<std::pair<std::string, std::string>> run_metadata(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> m;
  m.emplace_back("code", std::string("icec ") + version);
  m.emplace_back("config_hash", c.hash());
  m.emplace_back("CALIBRATION-REQUIRED", c.calibration_required() ? "yes" : "no");
  m.emplace_back("units", "energies eV, cross sections Mb");
  for (auto& kv : c.canonical()) m.push_back(kv);
  return m;
}

// shortest text that reads back to the same double
inline std::string format_value(double v) { return fmt::format("{}", v); }

inline void write_csv(std::ostream& out, const Table& t) {
  for (const auto& [k, v] : t.metadata) out << "# " << k << ": " << v << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_value(row[i]);
    out << "\n";
  }
}

inline void write_json(std::ostream& out, const Table& t) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.metadata) meta[k] = v;
  j["metadata"] = meta;
  j["columns"] = t.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (double v : row) r.push_back(v);
    rows.push_back(r);
  }
  j["rows"] = rows;
  out << j.dump(1) << "\n";
}

inline void write_table(const Table& t, const std::string& path, const std::string& format) {
  auto emit = [&](std::ostream& o) {
    if (format == "json")
      write_json(o, t);
    else
      write_csv(o, t);
  };
  if (path.empty() || path == "-") {
    emit(std::cout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write output file " + path);
  emit(f);
}

}  // namespace icec
