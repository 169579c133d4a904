#ifndef XLSIM_IO_HPP
#define XLSIM_IO_HPP

#include <string>
#include <vector>

#include "xlsim/config.hpp"
#include "xlsim/sim.hpp"

namespace xlsim {

inline constexpr const char* kToolVersion = "0.1.0";

// Parses a key = value document ('#' starts a comment). Every key has a
// default, so an empty document yields default_config(). Unknown keys,
// duplicate keys, malformed values and constraint violations throw
// std::invalid_argument naming the line and key.
SystemConfig parse_config(const std::string& text);
SystemConfig parse_config_file(const std::string& path);

// Canonical key = value rendering; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SystemConfig& config);

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string created_utc;
  std::uint64_t seed = 0;
  std::string config_text;  // canonical serialization
  std::vector<std::string> outputs;
  double average_column_energy = 0.0;
  std::string command;
};

void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

// "out/sweep.csv" -> "out/sweep.manifest.json"
std::string manifest_path_for(const std::string& csv_path);

// Header snr_db,detector,ser,ci_half_width,trials,ops; rows ordered by SNR
// ascending then detector name ascending; 6 significant digits. Byte-stable
// for a fixed result. When `manifest` is given, writes the companion
// manifest next to the CSV.
void write_sweep_csv(const SweepResult& result, const std::string& path,
                     const RunManifest* manifest = nullptr);

// Closed-form complexity table over swept array sizes at fixed load ratios;
// num_users = round(num_antennas / ratio), floored at 1.
void write_complexity_csv(const std::string& path, const std::vector<int>& antennas,
                          const std::vector<int>& ratios, int constellation_order,
                          int iterations);

std::string utc_timestamp();

}  // namespace xlsim

#endif
