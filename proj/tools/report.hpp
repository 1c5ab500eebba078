#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace locfit::cli {

/// Writes metrics.csv, deltas.csv, boxplot.csv, wins.csv and timings.csv for a
/// compare report. Output depends only on the JSON document.
void write_report_csvs(const nlohmann::json& report, const std::filesystem::path& dir);

/// Text of a CSV number: shortest round-trip form, empty for null.
std::string csv_number(const nlohmann::json& v);

}  // namespace locfit::cli
