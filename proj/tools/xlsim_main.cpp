// Command-line front end: SER sweeps, complexity tables, channel
// diagnostics and a quick self test.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xlsim/channel.hpp"
#include "xlsim/io.hpp"
#include "xlsim/oracles.hpp"
#include "xlsim/sim.hpp"

namespace {

using namespace xlsim;

struct CommonOptions {
  std::string config_path;
  std::string scale = "desk";
  bool scale_given = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string snr_spec;
  long trials = 0;
  std::string out_dir;
  int workers = 0;
};

std::string default_out_dir() {
  const char* env = std::getenv("XLSIM_OUT_DIR");
  return env != nullptr ? env : "xlsim_out";
}

SystemConfig apply_scale(SystemConfig config, const std::string& scale) {
  if (scale == "desk") return desk_scale(config);
  config.num_antennas = 512;
  config.num_users = 256;
  config.kl_rank = 0;
  config.finalize();
  return config;
}

SystemConfig resolve_config(const CommonOptions& options) {
  SystemConfig config;
  if (!options.config_path.empty()) {
    config = parse_config_file(options.config_path);
    if (options.scale_given) config = apply_scale(config, options.scale);
  } else {
    config = apply_scale(default_config(),
                         options.scale_given ? options.scale : "desk");
  }
  if (options.seed_given) config.rng_seed = options.seed;
  if (options.workers > 0) config.workers = options.workers;
  if (options.trials > 0) config.max_trials = options.trials;
  if (!options.snr_spec.empty()) {
    double start = 0.0, step = 0.0, stop = 0.0;
    if (std::sscanf(options.snr_spec.c_str(), "%lf:%lf:%lf", &start, &step, &stop) != 3) {
      throw std::invalid_argument("--snr expects start:step:stop (dB)");
    }
    config.snr_start_db = start;
    config.snr_step_db = step;
    config.snr_stop_db = stop;
  }
  validate(config);
  return config;
}

std::string join_command(int argc, char** argv) {
  std::string command;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) command += ' ';
    command += argv[i];
  }
  return command;
}

int run_sweep(const CommonOptions& options, const std::string& command) {
  const SystemConfig config = resolve_config(options);
  const std::vector<double> grid = snr_grid(config);
  std::cout << "sweep: M=" << config.num_antennas << " K=" << config.num_users
            << " seed=" << config.rng_seed << " workers=" << config.workers
            << " points=" << grid.size() << "\n";

  const SweepResult result = ser_sweep(config, grid, config.max_trials);

  const std::string out_dir =
      options.out_dir.empty() ? default_out_dir() : options.out_dir;
  std::filesystem::create_directories(out_dir);
  const std::string csv_path = out_dir + "/sweep.csv";

  RunManifest manifest;
  manifest.created_utc = utc_timestamp();
  manifest.seed = config.rng_seed;
  manifest.config_text = serialize_config(config);
  manifest.outputs = {"sweep.csv"};
  manifest.average_column_energy = result.average_column_energy;
  manifest.command = command;
  write_sweep_csv(result, csv_path, &manifest);

  std::printf("%8s %12s %12s %12s %8s\n", "snr_db", "ser_mfb", "ser_vmp", "ser_zf",
              "trials");
  for (const SweepPoint& point : result.points) {
    std::printf("%8.2f %12.4e %12.4e %12.4e %8ld\n", point.snr_db, point.mfb.ser(),
                point.vmp.ser(), point.zf.ser(), point.trials);
  }
  std::cout << "wrote " << csv_path << "\n";
  return 0;
}

int run_complexity(const CommonOptions& options) {
  const std::vector<int> antennas = {64, 128, 256, 512};
  const std::vector<int> ratios = {2, 10, 20};
  const ComplexityCount headline = complexity_closed_form(512, 256, 4, 3);
  std::cout << "closed form at M=512 K=256 |A|=4 I=3: C_VMP=" << headline.vmp
            << " C_ZF=" << headline.zf_thirds << "/3 (~" << headline.zf_nearest()
            << ")\n\n";

  std::printf("%6s %6s %6s %14s %14s %8s\n", "M", "K", "M/K", "c_zf", "c_vmp",
              "vmp<zf");
  for (int m : antennas) {
    for (int ratio : ratios) {
      const int k =
          std::max(1, static_cast<int>(std::llround(static_cast<double>(m) / ratio)));
      const ComplexityCount count = complexity_closed_form(m, k, 4, 3);
      const bool vmp_smaller = 3 * count.vmp < count.zf_thirds;
      std::printf("%6d %6d %6d %14llu %14llu %8s\n", m, k, ratio,
                  static_cast<unsigned long long>(count.zf_nearest()),
                  static_cast<unsigned long long>(count.vmp),
                  vmp_smaller ? "yes" : "no");
    }
  }

  bool all_ok = true;
  std::cout << "\ninstrumented counter check:\n";
  for (const auto& [m, k] : std::vector<std::pair<int, int>>{{16, 8}, {64, 32}, {128, 64}}) {
    SystemConfig config = default_config();
    config.num_antennas = m;
    config.num_users = k;
    config.kl_rank = 0;
    config.finalize();
    const CounterReport report = verify_counters(config);
    all_ok = all_ok && report.ok;
    std::printf(
        "  M=%3d K=%3d  precision %llu/%llu  message %llu/%llu  init %llu/%llu  "
        "zf(third) %llu/%llu  %s\n",
        m, k, static_cast<unsigned long long>(report.measured_precision),
        static_cast<unsigned long long>(report.expected_precision),
        static_cast<unsigned long long>(report.measured_message),
        static_cast<unsigned long long>(report.expected_message),
        static_cast<unsigned long long>(report.measured_init),
        static_cast<unsigned long long>(report.expected_init),
        static_cast<unsigned long long>(report.measured_zf_thirds),
        static_cast<unsigned long long>(report.expected_zf_thirds),
        report.ok ? "ok" : "MISMATCH");
  }

  if (!options.out_dir.empty() || std::getenv("XLSIM_OUT_DIR") != nullptr) {
    const std::string out_dir =
        options.out_dir.empty() ? default_out_dir() : options.out_dir;
    std::filesystem::create_directories(out_dir);
    const std::string path = out_dir + "/complexity.csv";
    write_complexity_csv(path, antennas, ratios, 4, 3);
    std::cout << "wrote " << path << "\n";
  }
  return all_ok ? 0 : 2;
}

void dump_channel(const ChannelRealization& realization, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (std::size_t k = 0; k < realization.users.size(); ++k) {
    const UserChannel& user = realization.users[k];
    {
      std::ofstream out(out_dir + "/channel_user" + std::to_string(k) + ".csv",
                        std::ios::binary);
      out << "antenna,re,im\n";
      for (int m = 0; m < user.column.size(); ++m) {
        char line[96];
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", m, user.column[m].real(),
                      user.column[m].imag());
        out << line;
      }
    }
    {
      std::ofstream out(out_dir + "/covariance_user" + std::to_string(k) + ".csv",
                        std::ios::binary);
      out << "p,q,re,im\n";
      for (int p = user.vr.first; p <= user.vr.last; ++p) {
        for (int q = user.vr.first; q <= user.vr.last; ++q) {
          char line[96];
          std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g\n", p, q,
                        user.covariance(p, q).real(), user.covariance(p, q).imag());
          out << line;
        }
      }
    }
  }
}

int run_channel_stats(const CommonOptions& options, bool dump) {
  SystemConfig config = resolve_config(options);
  std::cout << "channel-stats: M=" << config.num_antennas << " K=" << config.num_users
            << " seed=" << config.rng_seed << "\n";

  Rng geometry_rng(stream_seed(config.rng_seed, Stream::geometry));
  Rng vr_rng(stream_seed(config.rng_seed, Stream::visibility));
  Rng fading_rng(stream_seed(config.rng_seed, Stream::fading));
  const ChannelRealization realization =
      generate_channel(config, geometry_rng, vr_rng, fading_rng, true);

  std::printf("%5s %5s %5s %5s %12s %12s %12s %12s\n", "user", "nvr", "first", "last",
              "minEigRel", "hermErr", "keptTrace", "klRelErr");
  for (int k = 0; k < config.num_users; ++k) {
    const UserChannel& user = realization.users[k];
    const int n = user.vr.count();
    const Eigen::MatrixXcd block =
        user.covariance.block(user.vr.first, user.vr.first, n, n);
    const double herm_err = (block - block.adjoint()).norm();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
    const double max_eig = solver.eigenvalues().maxCoeff();
    const double min_eig_rel = solver.eigenvalues().minCoeff() / std::max(max_eig, 1e-300);
    const double kept = user.kl.eigenvalues.sum() / block.trace().real();
    Eigen::MatrixXcd reconstruction =
        user.kl.basis * user.kl.eigenvalues.asDiagonal() * user.kl.basis.adjoint();
    const double rel_err =
        (reconstruction - user.covariance).norm() / user.covariance.norm();
    std::printf("%5d %5d %5d %5d %12.3e %12.3e %12.6f %12.3e\n", k, n, user.vr.first,
                user.vr.last, min_eig_rel, herm_err, kept, rel_err);
  }
  if (dump) {
    const std::string out_dir =
        options.out_dir.empty() ? default_out_dir() : options.out_dir;
    dump_channel(realization, out_dir);
    std::cout << "dumped per-user channel and covariance CSVs to " << out_dir << "\n";
  }
  return 0;
}

bool check(const char* name, bool ok) {
  std::printf("  %-38s %s\n", name, ok ? "pass" : "FAIL");
  return ok;
}

int run_selftest() {
  bool all = true;

  {
    const ComplexityCount headline = complexity_closed_form(512, 256, 4, 3);
    all &= check("closed-form headline counts",
                 headline.vmp == 2757120ull && headline.zf_thirds == 117833728ull);
    SystemConfig config = default_config();
    config.num_antennas = 16;
    config.num_users = 8;
    config.kl_rank = 0;
    config.finalize();
    all &= check("instrumented counters (16x8)", verify_counters(config).ok);
  }

  {
    SystemConfig config = desk_scale(default_config());
    config.num_antennas = 8;
    config.num_users = 2;
    config.kl_rank = 2;
    const Constellation constellation = make_constellation(4, 1.0);
    long ml_errors = 0, vmp_errors = 0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t seed = trial_seed(7, 0, static_cast<std::uint64_t>(t));
      const TrialRecord record = run_trial(config, 10.0, seed);
      vmp_errors += record.vmp_errors;
      // rebuild the identical realization for the ML reference
      Rng geometry_rng(stream_seed(seed, Stream::geometry));
      Rng vr_rng(stream_seed(seed, Stream::visibility));
      Rng fading_rng(stream_seed(seed, Stream::fading));
      Rng symbol_rng(stream_seed(seed, Stream::symbols));
      Rng noise_rng(stream_seed(seed, Stream::noise));
      const ChannelRealization realization =
          generate_channel(config, geometry_rng, vr_rng, fading_rng, false);
      const double scale = 1.0 / std::sqrt(average_column_energy(config));
      const Eigen::MatrixXcd channel = realization.matrix * scale;
      std::vector<int> sent(config.num_users);
      Eigen::VectorXcd symbols(config.num_users);
      for (int k = 0; k < config.num_users; ++k) {
        sent[k] = symbol_rng.uniform_int(4);
        symbols[k] = constellation.points[sent[k]];
      }
      const Observation obs = transmit(channel, symbols, record.noise_variance, noise_rng);
      const std::vector<int> ml = exhaustive_ml_detect(channel, obs.received, constellation);
      for (int k = 0; k < config.num_users; ++k) {
        if (ml[k] != sent[k]) ++ml_errors;
      }
    }
    const bool sandwich = ml_errors <= vmp_errors && vmp_errors <= 3 * ml_errors;
    std::printf("  ml/vmp errors over %d trials: %ld/%ld\n", trials, ml_errors,
                vmp_errors);
    all &= check("ML-oracle sandwich (8x2, 10 dB)", sandwich);
  }

  {
    SystemConfig config = desk_scale(default_config());
    config.num_users = 5;
    Rng geometry_rng(stream_seed(11, Stream::geometry));
    Rng vr_rng(stream_seed(11, Stream::visibility));
    Rng fading_rng(stream_seed(11, Stream::fading));
    const ChannelRealization realization =
        generate_channel(config, geometry_rng, vr_rng, fading_rng, true);
    bool ok = true;
    for (const UserChannel& user : realization.users) {
      const Eigen::MatrixXcd& r = user.covariance;
      ok = ok && (r - r.adjoint()).norm() < 1e-10;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(r);
      ok = ok && solver.eigenvalues().minCoeff() >=
                     -1e-8 * std::max(solver.eigenvalues().maxCoeff(), 0.0);
      for (int m = 0; m < config.num_antennas; ++m) {
        if (!user.vr.contains(m) && user.column[m] != std::complex<double>(0.0, 0.0)) {
          ok = false;
        }
      }
    }
    all &= check("covariance Hermitian/PSD/support", ok);
  }

  {
    const SystemConfig config = default_config();
    const std::string text = serialize_config(config);
    all &= check("config round trip", parse_config(text) == config);
  }

  std::cout << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"XL-MIMO multi-user detection simulator"};
  app.require_subcommand(1);

  CommonOptions options;

  auto add_common = [&](CLI::App* cmd, bool with_sweep_flags) {
    cmd->add_option("--config", options.config_path, "config file (key = value)");
    cmd->add_option("--seed", options.seed, "master RNG seed")
        ->each([&](const std::string&) { options.seed_given = true; });
    cmd->add_option("--scale", options.scale, "desk (128x64) or paper (512x256)")
        ->check(CLI::IsMember({"desk", "paper"}))
        ->each([&](const std::string&) { options.scale_given = true; });
    cmd->add_option("--out", options.out_dir, "output directory");
    if (with_sweep_flags) {
      cmd->add_option("--snr", options.snr_spec, "SNR grid start:step:stop in dB");
      cmd->add_option("--trials", options.trials, "max trials per SNR point");
      cmd->add_option("--workers", options.workers, "worker threads");
    }
  };

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo SER vs SNR sweep");
  add_common(sweep, true);
  CLI::App* complexity =
      app.add_subcommand("complexity", "closed-form counts and counter verification");
  complexity->add_option("--out", options.out_dir, "output directory");
  CLI::App* stats =
      app.add_subcommand("channel-stats", "covariance and KL diagnostics");
  add_common(stats, false);
  bool dump = false;
  stats->add_flag("--dump", dump, "write per-user channel/covariance CSVs");
  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in oracle suite");
  (void)selftest;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sweep->parsed()) return run_sweep(options, join_command(argc, argv));
    if (complexity->parsed()) return run_complexity(options);
    if (stats->parsed()) return run_channel_stats(options, dump);
    return run_selftest();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
