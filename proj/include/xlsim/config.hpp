#ifndef XLSIM_CONFIG_HPP
#define XLSIM_CONFIG_HPP

#include <cstdint>
#include <string>

namespace xlsim {

inline constexpr double kSpeedOfLight = 299792458.0;

enum class UpdateSchedule { jacobi, gauss_seidel };

// All scalar model parameters plus sweep and seed controls. Defaults are the
// full-scale simulation setting (512 x 256); desk_scale() shrinks the array
// for fast runs while keeping the load ratio M/K = 2.
//
// antenna_spacing_m and kl_rank support value 0 in config files, meaning
// "derive": half a carrier wavelength and num_antennas / 4 respectively.
// parse_config resolves both, so a validated config always holds concrete
// values.
struct SystemConfig {
  int num_antennas = 512;
  int num_users = 256;
  double carrier_frequency_hz = 2.6e9;
  double antenna_spacing_m = 0.0;  // resolved by finalize()
  double pathloss_exponent = 3.0;
  int pathloss_exponent_sign = -1;  // -1: weights decay as s^-nu
  double attenuation_omega = 4.0;
  int kl_rank = 0;  // resolved by finalize()
  double vr_log_mean = 2.25;   // log-normal location of the VR length, ln-meters
  double vr_log_sigma = 0.1;   // log-normal scale
  double scatter_radius_min = 5.0;
  double scatter_radius_max = 10.0;
  double noise_variance = 0.1;
  int vmp_iterations = 3;
  double vmp_damping = 0.45;
  double gamma_prior_shape = 0.0;  // precision prior shape
  double gamma_prior_rate = 0.0;   // precision prior rate
  double symbol_power = 1.0;
  int constellation_order = 4;
  std::uint64_t rng_seed = 1;
  double user_depth_min = 10.0;  // user rectangle, meters in front of the array
  double user_depth_max = 100.0;
  UpdateSchedule vmp_schedule = UpdateSchedule::jacobi;

  // Sweep controls.
  double snr_start_db = 0.0;
  double snr_step_db = 2.0;
  double snr_stop_db = 20.0;
  long max_trials = 100000;
  int target_errors = 200;
  int workers = 1;

  double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }
  double array_length() const { return num_antennas * antenna_spacing_m; }

  // Fills derived fields (spacing, KL rank) where left at 0.
  void finalize();
};

// Returns the finalized default config.
SystemConfig default_config();

// 128 x 64 variant of the default config (same load ratio, same channel
// statistics, KL rank re-derived).
SystemConfig desk_scale(SystemConfig config);

// Throws std::invalid_argument naming the offending field.
void validate(const SystemConfig& config);

bool operator==(const SystemConfig& a, const SystemConfig& b);

std::string to_string(UpdateSchedule schedule);

}  // namespace xlsim

#endif
