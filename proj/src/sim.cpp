#include "xlsim/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "xlsim/channel.hpp"

namespace xlsim {

namespace {

constexpr std::uint64_t kCalibrationSeed = 0xca11b5eedULL;
constexpr int kCalibrationRealizations = 256;
constexpr long kBlockTrials = 64;

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t hash_realization(const Eigen::MatrixXcd& channel,
                               const std::vector<int>& symbols,
                               const Eigen::VectorXcd& noise) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  hash = fnv1a(hash, channel.data(), sizeof(std::complex<double>) * channel.size());
  hash = fnv1a(hash, symbols.data(), sizeof(int) * symbols.size());
  hash = fnv1a(hash, noise.data(), sizeof(std::complex<double>) * noise.size());
  return hash;
}

std::string energy_cache_key(const SystemConfig& c) {
  std::ostringstream key;
  key.precision(17);
  key << c.num_antennas << '|' << c.num_users << '|' << c.antenna_spacing_m << '|'
      << c.vr_log_mean << '|' << c.vr_log_sigma << '|' << c.attenuation_omega << '|'
      << c.pathloss_exponent << '|' << c.pathloss_exponent_sign << '|'
      << c.user_depth_min << '|' << c.user_depth_max;
  return key.str();
}

}  // namespace

WilsonInterval wilson_interval(long errors, long n, double z) {
  WilsonInterval interval;
  if (n <= 0) return interval;
  const double p = static_cast<double>(errors) / static_cast<double>(n);
  const double z2n = z * z / static_cast<double>(n);
  const double denom = 1.0 + z2n;
  interval.center = (p + z2n / 2.0) / denom;
  interval.half_width =
      z * std::sqrt(p * (1.0 - p) / static_cast<double>(n) + z2n / (4.0 * n)) / denom;
  return interval;
}

double average_column_energy(const SystemConfig& config) {
  static std::mutex mutex;
  static std::map<std::string, double> cache;
  const std::string key = energy_cache_key(config);
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  // Expected column energy is sum of in-VR large-scale weights (the fading
  // covariance has unit diagonal inside the VR), so no eigen work is needed.
  double total = 0.0;
  long count = 0;
  for (int r = 0; r < kCalibrationRealizations; ++r) {
    const std::uint64_t seed = derive_seed(kCalibrationSeed, static_cast<std::uint64_t>(r));
    Rng geometry_rng(stream_seed(seed, Stream::geometry));
    Rng vr_rng(stream_seed(seed, Stream::visibility));
    const SystemGeometry geometry = build_geometry(config, geometry_rng);
    for (int k = 0; k < config.num_users; ++k) {
      const VisibilityRegion vr = sample_visibility_region(config, geometry, vr_rng);
      const Eigen::VectorXd weights =
          large_scale_weights(k, geometry, config.attenuation_omega,
                              config.pathloss_exponent, config.pathloss_exponent_sign);
      double energy = 0.0;
      for (int m = vr.first; m <= vr.last; ++m) energy += weights[m];
      total += energy;
      ++count;
    }
  }
  const double mean = total / static_cast<double>(count);

  std::lock_guard<std::mutex> lock(mutex);
  cache[key] = mean;
  return mean;
}

std::vector<double> snr_grid(const SystemConfig& config) {
  std::vector<double> grid;
  for (double snr = config.snr_start_db; snr <= config.snr_stop_db + 1e-9;
       snr += config.snr_step_db) {
    grid.push_back(snr);
  }
  return grid;
}

TrialRecord run_trial(const SystemConfig& config, double snr_db, std::uint64_t seed) {
  const double noise_variance =
      config.symbol_power / std::pow(10.0, snr_db / 10.0);
  const double scale = 1.0 / std::sqrt(average_column_energy(config));

  Rng geometry_rng(stream_seed(seed, Stream::geometry));
  Rng vr_rng(stream_seed(seed, Stream::visibility));
  Rng fading_rng(stream_seed(seed, Stream::fading));
  Rng symbol_rng(stream_seed(seed, Stream::symbols));
  Rng noise_rng(stream_seed(seed, Stream::noise));

  ChannelRealization realization =
      generate_channel(config, geometry_rng, vr_rng, fading_rng, false);
  const Eigen::MatrixXcd channel = realization.matrix * scale;

  const Constellation constellation =
      make_constellation(config.constellation_order, config.symbol_power);
  const int num_users = config.num_users;
  std::vector<int> sent(num_users);
  Eigen::VectorXcd symbols(num_users);
  for (int k = 0; k < num_users; ++k) {
    sent[k] = symbol_rng.uniform_int(constellation.order());
    symbols[k] = constellation.points[sent[k]];
  }

  const Observation observation = transmit(channel, symbols, noise_variance, noise_rng);

  TrialRecord record;
  record.seed = seed;
  record.snr_db = snr_db;
  record.noise_variance = noise_variance;
  record.symbols_tested = num_users;
  record.realization_hash = hash_realization(channel, sent, observation.noise);

  SystemConfig detect_config = config;
  detect_config.noise_variance = noise_variance;

  const DetectionResult vmp =
      vmp_detect(channel, observation.received, detect_config, constellation);
  record.vmp_ops = vmp.op_count;
  for (int k = 0; k < num_users; ++k) {
    if (vmp.hard_symbols[k] != sent[k]) ++record.vmp_errors;
  }

  try {
    const DetectionResult zf = zf_detect(channel, observation.received, constellation);
    record.zf_ops_thirds = zf.ops.zf_thirds;
    for (int k = 0; k < num_users; ++k) {
      if (zf.hard_symbols[k] != sent[k]) ++record.zf_errors;
    }
  } catch (const RankDeficientError&) {
    record.zf_rank_deficient = true;
    record.zf_errors = num_users;
  }

  for (int k = 0; k < num_users; ++k) {
    const int decided =
        mfb_detect(channel.col(k), symbols[k], observation.noise, constellation);
    if (decided != sent[k]) ++record.mfb_errors;
    record.mfb_ops += 3ull * static_cast<std::uint64_t>(config.num_antennas);
  }
  return record;
}

SweepResult ser_sweep(const SystemConfig& config, const std::vector<double>& grid,
                      long trials_per_point) {
  validate(config);
  if (trials_per_point < 1) {
    throw std::invalid_argument("ser_sweep: trials_per_point must be >= 1");
  }

  SweepResult result;
  result.config = config;
  result.snr_grid_db = grid;
  result.average_column_energy = average_column_energy(config);

  const int workers = std::max(1, config.workers);
  for (std::size_t point_index = 0; point_index < grid.size(); ++point_index) {
    SweepPoint point;
    point.snr_db = grid[point_index];
    point.noise_variance =
        config.symbol_power / std::pow(10.0, point.snr_db / 10.0);

    long trials = 0;
    bool done = false;
    while (!done && trials < trials_per_point) {
      const long block = std::min(kBlockTrials, trials_per_point - trials);
      std::vector<TrialRecord> records(static_cast<std::size_t>(block));
      std::atomic<long> next{0};
      std::mutex error_mutex;
      std::exception_ptr error;
      auto worker = [&]() {
        try {
          for (;;) {
            const long index = next.fetch_add(1);
            if (index >= block) break;
            records[static_cast<std::size_t>(index)] =
                run_trial(config, point.snr_db,
                          trial_seed(config.rng_seed, point_index,
                                     static_cast<std::uint64_t>(trials + index)));
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      };
      std::vector<std::thread> pool;
      const int spawn = static_cast<int>(std::min<long>(workers, block));
      pool.reserve(static_cast<std::size_t>(spawn));
      for (int w = 1; w < spawn; ++w) pool.emplace_back(worker);
      worker();
      for (auto& thread : pool) thread.join();
      if (error) std::rethrow_exception(error);

      for (const TrialRecord& record : records) {
        point.vmp.errors += record.vmp_errors;
        point.zf.errors += record.zf_errors;
        point.mfb.errors += record.mfb_errors;
        point.vmp.ops += record.vmp_ops;
        point.zf.ops += record.zf_ops_thirds;
        point.mfb.ops += record.mfb_ops;
        if (record.zf_rank_deficient) ++point.zf_rank_deficient_trials;
      }
      trials += block;
      const long target = config.target_errors;
      done = point.vmp.errors >= target && point.zf.errors >= target;
    }

    point.trials = trials;
    const long symbols = trials * config.num_users;
    point.vmp.symbols = symbols;
    point.zf.symbols = symbols;
    point.mfb.symbols = symbols;
    result.points.push_back(point);
  }
  return result;
}

ComplexityCount complexity_closed_form(int num_antennas, int num_users,
                                       int constellation_order, int iterations) {
  if (num_antennas < 1 || num_users < 1 || constellation_order < 1 || iterations < 0) {
    throw std::invalid_argument("complexity_closed_form: arguments must be positive");
  }
  const auto m = static_cast<std::uint64_t>(num_antennas);
  const auto k = static_cast<std::uint64_t>(num_users);
  const auto a = static_cast<std::uint64_t>(constellation_order);
  const auto i = static_cast<std::uint64_t>(iterations);

  ComplexityCount count;
  count.vmp = i * (m * (3 + 2 * k) + m * k * a) + 3 * m * k;
  count.zf_thirds = k * k * k + 3 * m * k * k + 3 * m * k;
  return count;
}

CounterReport verify_counters(const SystemConfig& config) {
  validate(config);
  const Constellation constellation =
      make_constellation(config.constellation_order, config.symbol_power);

  Rng geometry_rng(stream_seed(config.rng_seed, Stream::geometry));
  Rng vr_rng(stream_seed(config.rng_seed, Stream::visibility));
  Rng fading_rng(stream_seed(config.rng_seed, Stream::fading));
  Rng symbol_rng(stream_seed(config.rng_seed, Stream::symbols));
  Rng noise_rng(stream_seed(config.rng_seed, Stream::noise));

  const ChannelRealization realization =
      generate_channel(config, geometry_rng, vr_rng, fading_rng, false);
  Eigen::VectorXcd symbols(config.num_users);
  for (int k = 0; k < config.num_users; ++k) {
    symbols[k] = constellation.points[symbol_rng.uniform_int(constellation.order())];
  }
  const Observation observation =
      transmit(realization.matrix, symbols, config.noise_variance, noise_rng);

  const DetectionResult vmp =
      vmp_detect(realization.matrix, observation.received, config, constellation);
  const DetectionResult zf =
      zf_detect(realization.matrix, observation.received, constellation);

  const ComplexityCount closed =
      complexity_closed_form(config.num_antennas, config.num_users,
                             config.constellation_order, config.vmp_iterations);

  const auto m = static_cast<std::uint64_t>(config.num_antennas);
  const auto k = static_cast<std::uint64_t>(config.num_users);
  const auto a = static_cast<std::uint64_t>(config.constellation_order);
  const auto i = static_cast<std::uint64_t>(config.vmp_iterations);

  CounterReport report;
  report.expected_precision = i * m * (3 + 2 * k);
  report.expected_message = i * m * k * a;
  report.expected_init = 3 * m * k;
  report.measured_precision = vmp.ops.precision_update;
  report.measured_message = vmp.ops.message_update;
  report.measured_init = vmp.ops.mrc_init;
  report.expected_zf_thirds = closed.zf_thirds;
  report.measured_zf_thirds = zf.ops.zf_thirds;
  report.ok = report.expected_precision == report.measured_precision &&
              report.expected_message == report.measured_message &&
              report.expected_init == report.measured_init &&
              report.expected_zf_thirds == report.measured_zf_thirds &&
              vmp.op_count == closed.vmp;
  return report;
}

}  // namespace xlsim
