#include "xlsim/config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace xlsim {

void SystemConfig::finalize() {
  if (antenna_spacing_m == 0.0 && carrier_frequency_hz > 0.0) {
    antenna_spacing_m = wavelength() / 2.0;
  }
  if (kl_rank == 0 && num_antennas > 0) {
    kl_rank = std::max(1, num_antennas / 4);
  }
}

SystemConfig default_config() {
  SystemConfig config;
  config.finalize();
  return config;
}

SystemConfig desk_scale(SystemConfig config) {
  config.num_antennas = 128;
  config.num_users = 64;
  config.kl_rank = 0;
  config.finalize();
  return config;
}

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

}  // namespace

void validate(const SystemConfig& c) {
  if (c.num_antennas < 1) fail("num_antennas must be >= 1");
  if (c.num_users < 1) fail("num_users must be >= 1");
  if (c.num_users > c.num_antennas) fail("num_users must not exceed num_antennas");
  if (c.carrier_frequency_hz <= 0.0) fail("carrier_frequency_hz must be positive");
  if (c.antenna_spacing_m <= 0.0) fail("antenna_spacing_m must be positive");
  if (c.pathloss_exponent < 0.0) fail("pathloss_exponent must be non-negative");
  if (c.pathloss_exponent_sign != -1 && c.pathloss_exponent_sign != 1) {
    fail("pathloss_exponent_sign must be -1 or 1");
  }
  if (c.attenuation_omega <= 0.0) fail("attenuation_omega must be positive");
  if (c.kl_rank < 1 || c.kl_rank > c.num_antennas) {
    fail("kl_rank must lie in [1, num_antennas]");
  }
  if (c.vr_log_sigma <= 0.0) fail("vr_log_sigma must be positive");
  if (c.scatter_radius_min <= 0.0) fail("scatter_radius_min must be positive");
  if (c.scatter_radius_min > c.scatter_radius_max) {
    fail("scatter_radius_min must not exceed scatter_radius_max");
  }
  if (c.noise_variance < 0.0) fail("noise_variance must be non-negative");
  if (c.vmp_iterations < 0) fail("vmp_iterations must be non-negative");
  if (c.vmp_damping < 0.0 || c.vmp_damping > 1.0) fail("vmp_damping must lie in [0, 1]");
  if (c.gamma_prior_shape < 0.0) fail("gamma_prior_shape must be non-negative");
  if (c.gamma_prior_rate < 0.0) fail("gamma_prior_rate must be non-negative");
  if (c.symbol_power <= 0.0) fail("symbol_power must be positive");
  if (c.constellation_order != 4 && c.constellation_order != 16) {
    fail("constellation_order must be 4 or 16");
  }
  if (c.user_depth_min <= 0.0) fail("user_depth_min must be positive");
  if (c.user_depth_min > c.user_depth_max) {
    fail("user_depth_min must not exceed user_depth_max");
  }
  if (c.snr_step_db <= 0.0) fail("snr_step_db must be positive");
  if (c.snr_stop_db < c.snr_start_db) fail("snr_stop_db must be >= snr_start_db");
  if (c.max_trials < 1) fail("max_trials must be >= 1");
  if (c.target_errors < 1) fail("target_errors must be >= 1");
  if (c.workers < 1) fail("workers must be >= 1");
}

bool operator==(const SystemConfig& a, const SystemConfig& b) {
  return a.num_antennas == b.num_antennas && a.num_users == b.num_users &&
         a.carrier_frequency_hz == b.carrier_frequency_hz &&
         a.antenna_spacing_m == b.antenna_spacing_m &&
         a.pathloss_exponent == b.pathloss_exponent &&
         a.pathloss_exponent_sign == b.pathloss_exponent_sign &&
         a.attenuation_omega == b.attenuation_omega && a.kl_rank == b.kl_rank &&
         a.vr_log_mean == b.vr_log_mean && a.vr_log_sigma == b.vr_log_sigma &&
         a.scatter_radius_min == b.scatter_radius_min &&
         a.scatter_radius_max == b.scatter_radius_max &&
         a.noise_variance == b.noise_variance && a.vmp_iterations == b.vmp_iterations &&
         a.vmp_damping == b.vmp_damping && a.gamma_prior_shape == b.gamma_prior_shape &&
         a.gamma_prior_rate == b.gamma_prior_rate && a.symbol_power == b.symbol_power &&
         a.constellation_order == b.constellation_order && a.rng_seed == b.rng_seed &&
         a.user_depth_min == b.user_depth_min && a.user_depth_max == b.user_depth_max &&
         a.vmp_schedule == b.vmp_schedule && a.snr_start_db == b.snr_start_db &&
         a.snr_step_db == b.snr_step_db && a.snr_stop_db == b.snr_stop_db &&
         a.max_trials == b.max_trials && a.target_errors == b.target_errors &&
         a.workers == b.workers;
}

std::string to_string(UpdateSchedule schedule) {
  return schedule == UpdateSchedule::jacobi ? "jacobi" : "gauss_seidel";
}

}  // namespace xlsim
