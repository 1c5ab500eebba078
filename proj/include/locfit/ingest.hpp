#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locfit/family.hpp"

namespace locfit {

enum class Provenance { measured, file, synthetic };

std::string_view provenance_name(Provenance p);

struct Sample {
  std::vector<double> values;
  std::string label;
  Provenance provenance = Provenance::file;
  std::map<std::string, std::string> metadata;
};

struct MeasureOptions {
  bool export_seed = false;  // set LOCFIT_SEED in each child's environment
  std::uint64_t seed = 0;
  bool quiet = true;  // discard child stdout
};

/// Runs `/bin/sh -c command` warmup + runs times, strictly one after another,
/// and records the wall-clock seconds of each measured run. Throws
/// MeasurementError naming the run on spawn failure or nonzero exit.
Sample measure_command(const std::string& command, std::size_t runs, std::size_t warmup = 0,
                       const MeasureOptions& options = {});

struct HalfSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::array<double, 9> deciles{};
};

struct HalvesReport {
  HalfSummary first;
  HalfSummary second;
  double sup_distance = 0.0;  // between the two empirical cdfs
};

/// Side-by-side summary of the first and second halves, for a visual
/// stationarity check. Throws SampleTooSmall for n < 20.
HalvesReport split_halves_check(std::span<const double> values);

/// Text format: one number per line; `#` lines are comments, and `# key: value`
/// comments are metadata. Throws ParseError (with line number) or IoError.
Sample read_sample(const std::filesystem::path& path);
void write_sample(const Sample& sample, const std::filesystem::path& path);

/// Draws from (family, params) moved up by c.
Sample synth_sample(const Family& family, const ParamVector& params, double c, std::size_t n, std::uint64_t seed);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace locfit
