#include "xlsim/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace xlsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

[[noreturn]] void parse_fail(int line, const std::string& message) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& value, int line, const std::string& key) {
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    parse_fail(line, "key '" + key + "': invalid number '" + value + "'");
  }
  if (used != value.size()) {
    parse_fail(line, "key '" + key + "': trailing characters in '" + value + "'");
  }
  return parsed;
}

long long parse_integer(const std::string& value, int line, const std::string& key) {
  std::size_t used = 0;
  long long parsed = 0;
  try {
    parsed = std::stoll(value, &used);
  } catch (const std::exception&) {
    parse_fail(line, "key '" + key + "': invalid integer '" + value + "'");
  }
  if (used != value.size()) {
    parse_fail(line, "key '" + key + "': trailing characters in '" + value + "'");
  }
  return parsed;
}

std::uint64_t parse_u64(const std::string& value, int line, const std::string& key) {
  std::size_t used = 0;
  unsigned long long parsed = 0;
  try {
    parsed = std::stoull(value, &used);
  } catch (const std::exception&) {
    parse_fail(line, "key '" + key + "': invalid unsigned integer '" + value + "'");
  }
  if (used != value.size()) {
    parse_fail(line, "key '" + key + "': trailing characters in '" + value + "'");
  }
  return parsed;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_sig6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  SystemConfig config;  // defaults; finalize() after parsing
  bool spacing_given = false;
  bool kl_rank_given = false;
  double explicit_array_length = -1.0;
  int array_length_line = 0;

  std::map<std::string, int> seen;
  std::istringstream stream(text);
  std::string raw;
  int line_number = 0;
  while (std::getline(stream, raw)) {
    ++line_number;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      parse_fail(line_number, "expected 'key = value', got '" + trim(raw) + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) parse_fail(line_number, "missing key");
    if (value.empty()) parse_fail(line_number, "key '" + key + "': missing value");
    if (seen.count(key) != 0) {
      parse_fail(line_number,
                 "key '" + key + "' already set on line " + std::to_string(seen[key]));
    }
    seen[key] = line_number;

    if (key == "num_antennas") {
      config.num_antennas = static_cast<int>(parse_integer(value, line_number, key));
    } else if (key == "num_users") {
      config.num_users = static_cast<int>(parse_integer(value, line_number, key));
    } else if (key == "carrier_frequency_hz") {
      config.carrier_frequency_hz = parse_double(value, line_number, key);
    } else if (key == "antenna_spacing_m") {
      config.antenna_spacing_m = parse_double(value, line_number, key);
      spacing_given = true;
    } else if (key == "array_length_m") {
      explicit_array_length = parse_double(value, line_number, key);
      array_length_line = line_number;
    } else if (key == "pathloss_exponent") {
      config.pathloss_exponent = parse_double(value, line_number, key);
    } else if (key == "pathloss_exponent_sign") {
      config.pathloss_exponent_sign =
          static_cast<int>(parse_integer(value, line_number, key));
    } else if (key == "attenuation_omega") {
      config.attenuation_omega = parse_double(value, line_number, key);
    } else if (key == "kl_rank") {
      config.kl_rank = static_cast<int>(parse_integer(value, line_number, key));
      kl_rank_given = true;
    } else if (key == "vr_log_mean") {
      config.vr_log_mean = parse_double(value, line_number, key);
    } else if (key == "vr_log_sigma") {
      config.vr_log_sigma = parse_double(value, line_number, key);
    } else if (key == "scatter_radius_min") {
      config.scatter_radius_min = parse_double(value, line_number, key);
    } else if (key == "scatter_radius_max") {
      config.scatter_radius_max = parse_double(value, line_number, key);
    } else if (key == "noise_variance") {
      config.noise_variance = parse_double(value, line_number, key);
    } else if (key == "vmp_iterations") {
      config.vmp_iterations = static_cast<int>(parse_integer(value, line_number, key));
    } else if (key == "vmp_damping") {
      config.vmp_damping = parse_double(value, line_number, key);
    } else if (key == "gamma_prior_shape") {
      config.gamma_prior_shape = parse_double(value, line_number, key);
    } else if (key == "gamma_prior_rate") {
      config.gamma_prior_rate = parse_double(value, line_number, key);
    } else if (key == "symbol_power") {
      config.symbol_power = parse_double(value, line_number, key);
    } else if (key == "constellation_order") {
      config.constellation_order =
          static_cast<int>(parse_integer(value, line_number, key));
    } else if (key == "rng_seed") {
      config.rng_seed = parse_u64(value, line_number, key);
    } else if (key == "user_depth_min") {
      config.user_depth_min = parse_double(value, line_number, key);
    } else if (key == "user_depth_max") {
      config.user_depth_max = parse_double(value, line_number, key);
    } else if (key == "vmp_schedule") {
      if (value == "jacobi") {
        config.vmp_schedule = UpdateSchedule::jacobi;
      } else if (value == "gauss_seidel") {
        config.vmp_schedule = UpdateSchedule::gauss_seidel;
      } else {
        parse_fail(line_number,
                   "key 'vmp_schedule': expected jacobi or gauss_seidel, got '" +
                       value + "'");
      }
    } else if (key == "snr_start_db") {
      config.snr_start_db = parse_double(value, line_number, key);
    } else if (key == "snr_step_db") {
      config.snr_step_db = parse_double(value, line_number, key);
    } else if (key == "snr_stop_db") {
      config.snr_stop_db = parse_double(value, line_number, key);
    } else if (key == "max_trials") {
      config.max_trials = static_cast<long>(parse_integer(value, line_number, key));
    } else if (key == "target_errors") {
      config.target_errors = static_cast<int>(parse_integer(value, line_number, key));
    } else if (key == "workers") {
      config.workers = static_cast<int>(parse_integer(value, line_number, key));
    } else {
      parse_fail(line_number, "unknown key '" + key + "'");
    }
  }

  if (!spacing_given) config.antenna_spacing_m = 0.0;
  if (!kl_rank_given) config.kl_rank = 0;
  config.finalize();

  if (explicit_array_length >= 0.0) {
    const double derived = config.array_length();
    if (std::abs(explicit_array_length - derived) >
        1e-9 * std::max(1.0, std::abs(derived))) {
      parse_fail(array_length_line,
                 "key 'array_length_m': inconsistent with num_antennas * "
                 "antenna_spacing_m = " +
                     format_double(derived));
    }
  }
  validate(config);
  return config;
}

SystemConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const SystemConfig& c) {
  std::ostringstream out;
  out << "num_antennas = " << c.num_antennas << "\n";
  out << "num_users = " << c.num_users << "\n";
  out << "carrier_frequency_hz = " << format_double(c.carrier_frequency_hz) << "\n";
  out << "antenna_spacing_m = " << format_double(c.antenna_spacing_m) << "\n";
  out << "pathloss_exponent = " << format_double(c.pathloss_exponent) << "\n";
  out << "pathloss_exponent_sign = " << c.pathloss_exponent_sign << "\n";
  out << "attenuation_omega = " << format_double(c.attenuation_omega) << "\n";
  out << "kl_rank = " << c.kl_rank << "\n";
  out << "vr_log_mean = " << format_double(c.vr_log_mean) << "\n";
  out << "vr_log_sigma = " << format_double(c.vr_log_sigma) << "\n";
  out << "scatter_radius_min = " << format_double(c.scatter_radius_min) << "\n";
  out << "scatter_radius_max = " << format_double(c.scatter_radius_max) << "\n";
  out << "noise_variance = " << format_double(c.noise_variance) << "\n";
  out << "vmp_iterations = " << c.vmp_iterations << "\n";
  out << "vmp_damping = " << format_double(c.vmp_damping) << "\n";
  out << "gamma_prior_shape = " << format_double(c.gamma_prior_shape) << "\n";
  out << "gamma_prior_rate = " << format_double(c.gamma_prior_rate) << "\n";
  out << "symbol_power = " << format_double(c.symbol_power) << "\n";
  out << "constellation_order = " << c.constellation_order << "\n";
  out << "rng_seed = " << c.rng_seed << "\n";
  out << "user_depth_min = " << format_double(c.user_depth_min) << "\n";
  out << "user_depth_max = " << format_double(c.user_depth_max) << "\n";
  out << "vmp_schedule = " << to_string(c.vmp_schedule) << "\n";
  out << "snr_start_db = " << format_double(c.snr_start_db) << "\n";
  out << "snr_step_db = " << format_double(c.snr_step_db) << "\n";
  out << "snr_stop_db = " << format_double(c.snr_stop_db) << "\n";
  out << "max_trials = " << c.max_trials << "\n";
  out << "target_errors = " << c.target_errors << "\n";
  out << "workers = " << c.workers << "\n";
  return out.str();
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  nlohmann::json doc;
  doc["tool_version"] = manifest.tool_version;
  doc["created_utc"] = manifest.created_utc;
  doc["seed"] = manifest.seed;
  doc["config"] = manifest.config_text;
  doc["outputs"] = manifest.outputs;
  doc["average_column_energy"] = manifest.average_column_energy;
  doc["command"] = manifest.command;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << doc.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest: " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  RunManifest manifest;
  manifest.tool_version = doc.at("tool_version").get<std::string>();
  manifest.created_utc = doc.at("created_utc").get<std::string>();
  manifest.seed = doc.at("seed").get<std::uint64_t>();
  manifest.config_text = doc.at("config").get<std::string>();
  manifest.outputs = doc.at("outputs").get<std::vector<std::string>>();
  manifest.average_column_energy = doc.at("average_column_energy").get<double>();
  manifest.command = doc.value("command", std::string{});
  return manifest;
}

std::string manifest_path_for(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() >= suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return csv_path.substr(0, csv_path.size() - suffix.size()) + ".manifest.json";
  }
  return csv_path + ".manifest.json";
}

void write_sweep_csv(const SweepResult& result, const std::string& path,
                     const RunManifest* manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  out << "snr_db,detector,ser,ci_half_width,trials,ops\n";
  std::vector<SweepPoint> points = result.points;
  std::stable_sort(points.begin(), points.end(),
                   [](const SweepPoint& a, const SweepPoint& b) {
                     return a.snr_db < b.snr_db;
                   });
  for (const SweepPoint& point : points) {
    struct Row {
      const char* name;
      const RateEstimate* rate;
      std::uint64_t ops;
    };
    // detector names in ascending order
    const Row rows[3] = {
        {"mfb", &point.mfb, point.mfb.ops},
        {"vmp", &point.vmp, point.vmp.ops},
        {"zf", &point.zf, thirds_to_nearest(point.zf.ops)},
    };
    for (const Row& row : rows) {
      out << format_sig6(point.snr_db) << ',' << row.name << ','
          << format_sig6(row.rate->ser()) << ','
          << format_sig6(row.rate->wilson().half_width) << ',' << point.trials << ','
          << row.ops << "\n";
    }
  }
  out.close();
  if (manifest != nullptr) {
    write_manifest(*manifest, manifest_path_for(path));
  }
}

void write_complexity_csv(const std::string& path, const std::vector<int>& antennas,
                          const std::vector<int>& ratios, int constellation_order,
                          int iterations) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  out << "num_antennas,num_users,load_ratio,c_zf,c_zf_thirds,c_vmp\n";
  for (int m : antennas) {
    for (int ratio : ratios) {
      const int k = std::max(
          1, static_cast<int>(std::llround(static_cast<double>(m) / ratio)));
      const ComplexityCount count =
          complexity_closed_form(m, k, constellation_order, iterations);
      out << m << ',' << k << ',' << ratio << ',' << count.zf_nearest() << ','
          << count.zf_thirds << ',' << count.vmp << "\n";
    }
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

}  // namespace xlsim
