#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace hiresim {

struct Table {
  std::string filename;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ResultsBundle {
  nlohmann::json manifest;
  std::vector<Table> tables;
};

// Shortest exact decimal round-trip is not needed; 17 significant digits
// reproduce the double bit for bit.
std::string fmt_g17(double v);

std::string csv_text(const Table& t);

// Writes manifest.json plus every table into out_dir (created if missing).
void emit_results(const ResultsBundle& bundle, const std::string& out_dir);

// ISO-8601 UTC, second resolution; stamped into manifests at bundle build time.
std::string utc_timestamp();

}  // namespace hiresim
