#include <doctest.h>

#include <cmath>
#include <vector>

#include "xlsim/rng.hpp"
#include "xlsim/sim.hpp"

using namespace xlsim;

namespace {

SystemConfig toy_config() {
  SystemConfig config = default_config();
  config.num_antennas = 16;
  config.num_users = 2;
  config.kl_rank = 4;
  config.user_depth_min = 15.0;
  config.user_depth_max = 25.0;
  return config;
}

}  // namespace

TEST_CASE("wilson interval basics") {
  const WilsonInterval all_good = wilson_interval(0, 1000);
  CHECK(all_good.lo() >= 0.0);
  CHECK(all_good.hi() < 0.005);

  const WilsonInterval half = wilson_interval(500, 1000);
  CHECK(half.center == doctest::Approx(0.5).epsilon(1e-9));

  // against a literal recomputation of the score interval
  const long e = 37, n = 420;
  const double z = 1.959963984540054;
  const double p = double(e) / n;
  const double denom = 1.0 + z * z / n;
  const WilsonInterval got = wilson_interval(e, n);
  CHECK(got.center == doctest::Approx((p + z * z / (2.0 * n)) / denom).epsilon(1e-12));
  CHECK(got.half_width ==
        doctest::Approx(z * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n)) / denom)
            .epsilon(1e-12));
}

TEST_CASE("quadrupling the sample count halves the half-width") {
  for (double p : {0.01, 0.1, 0.3}) {
    const long n = 4000;
    const auto base = wilson_interval(std::lround(p * n), n);
    const auto bigger = wilson_interval(std::lround(p * 4 * n), 4 * n);
    const double shrink = base.half_width / bigger.half_width;
    CHECK(shrink > 2.0 * 0.8);
    CHECK(shrink < 2.0 * 1.2);
  }
}

TEST_CASE("run_trial is deterministic") {
  const SystemConfig config = toy_config();
  const TrialRecord a = run_trial(config, 10.0, 424242);
  const TrialRecord b = run_trial(config, 10.0, 424242);
  CHECK(a.realization_hash == b.realization_hash);
  CHECK(a.vmp_errors == b.vmp_errors);
  CHECK(a.zf_errors == b.zf_errors);
  CHECK(a.mfb_errors == b.mfb_errors);
  CHECK(a.noise_variance == b.noise_variance);
  const TrialRecord c = run_trial(config, 10.0, 424243);
  CHECK(c.realization_hash != a.realization_hash);
}

TEST_CASE("trial error counts stay within the user count") {
  const SystemConfig config = toy_config();
  for (int t = 0; t < 50; ++t) {
    const TrialRecord record = run_trial(config, 2.0, trial_seed(1, 0, t));
    CHECK(record.symbols_tested == config.num_users);
    for (int errors : {record.vmp_errors, record.zf_errors, record.mfb_errors}) {
      CHECK(errors >= 0);
      CHECK(errors <= config.num_users);
    }
  }
}

TEST_CASE("essentially noiseless trials decode cleanly") {
  const SystemConfig config = toy_config();
  for (int t = 0; t < 20; ++t) {
    const TrialRecord record = run_trial(config, 80.0, trial_seed(9, 0, t));
    CHECK(record.vmp_errors == 0);
    CHECK(record.zf_errors == 0);
    CHECK(record.mfb_errors == 0);
  }
}

TEST_CASE("trial op counts match the closed forms") {
  const SystemConfig config = toy_config();
  const TrialRecord record = run_trial(config, 10.0, 7);
  const ComplexityCount closed =
      complexity_closed_form(config.num_antennas, config.num_users,
                             config.constellation_order, config.vmp_iterations);
  CHECK(record.vmp_ops == closed.vmp);
  CHECK(record.zf_ops_thirds == closed.zf_thirds);
  CHECK(record.mfb_ops == 3ull * 16 * 2);
}

TEST_CASE("sweep aggregation equals a manual re-run of the same seeds") {
  SystemConfig config = toy_config();
  config.rng_seed = 99;
  config.workers = 2;
  config.target_errors = 1000000;  // disable early stop
  const std::vector<double> grid{6.0};
  const long trials = 40;
  const SweepResult result = ser_sweep(config, grid, trials);
  REQUIRE(result.points.size() == 1);
  long vmp = 0, zf = 0, mfb = 0;
  for (long t = 0; t < trials; ++t) {
    const TrialRecord record =
        run_trial(config, 6.0, trial_seed(config.rng_seed, 0, t));
    vmp += record.vmp_errors;
    zf += record.zf_errors;
    mfb += record.mfb_errors;
  }
  CHECK(result.points[0].trials == trials);
  CHECK(result.points[0].vmp.errors == vmp);
  CHECK(result.points[0].zf.errors == zf);
  CHECK(result.points[0].mfb.errors == mfb);
  // symbols per point = trials * users
  CHECK(result.points[0].vmp.symbols == trials * config.num_users);
}

TEST_CASE("worker count does not change sweep results") {
  SystemConfig one = toy_config();
  one.rng_seed = 5;
  one.workers = 1;
  SystemConfig many = one;
  many.workers = 4;
  const std::vector<double> grid{4.0, 8.0};
  const SweepResult a = ser_sweep(one, grid, 96);
  const SweepResult b = ser_sweep(many, grid, 96);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].trials == b.points[i].trials);
    CHECK(a.points[i].vmp.errors == b.points[i].vmp.errors);
    CHECK(a.points[i].zf.errors == b.points[i].zf.errors);
    CHECK(a.points[i].mfb.errors == b.points[i].mfb.errors);
    CHECK(a.points[i].vmp.ops == b.points[i].vmp.ops);
  }
}

TEST_CASE("early stop halts once vmp and zf reach the target") {
  SystemConfig config = toy_config();
  config.rng_seed = 31;
  config.target_errors = 5;  // reached within the first block at low SNR
  const SweepResult result = ser_sweep(config, {0.0}, 100000);
  CHECK(result.points[0].trials <= 128);
  CHECK(result.points[0].vmp.errors >= 5);
  CHECK(result.points[0].zf.errors >= 5);
}

TEST_CASE("closed-form complexity values") {
  const ComplexityCount big = complexity_closed_form(512, 256, 4, 3);
  CHECK(big.vmp == 2757120ull);
  CHECK(big.zf_thirds == 117833728ull);
  CHECK(big.zf_nearest() == 39277909ull);
  CHECK(big.zf_value() == doctest::Approx(39277909.333333).epsilon(1e-12));

  // no iterations: only the initialization term remains
  const ComplexityCount init_only = complexity_closed_form(512, 256, 4, 0);
  CHECK(init_only.vmp == 3ull * 512 * 256);

  const ComplexityCount small = complexity_closed_form(16, 8, 4, 3);
  CHECK(small.vmp == 2832ull);
  CHECK(small.zf_thirds == 3968ull);
  CHECK(thirds_to_nearest(small.zf_thirds) == 1323ull);
}

TEST_CASE("instrumented counters equal the closed forms") {
  for (const auto& [m, k] : std::vector<std::pair<int, int>>{{16, 8}, {32, 16}}) {
    SystemConfig config = default_config();
    config.num_antennas = m;
    config.num_users = k;
    config.kl_rank = 0;
    config.finalize();
    const CounterReport report = verify_counters(config);
    CHECK(report.ok);
    CHECK(report.measured_precision == report.expected_precision);
    CHECK(report.measured_message == report.expected_message);
    CHECK(report.measured_init == report.expected_init);
    CHECK(report.measured_zf_thirds == report.expected_zf_thirds);
  }
}

TEST_CASE("SER decreases with SNR up to confidence overlap") {
  SystemConfig config = toy_config();
  config.rng_seed = 2718;
  config.workers = 2;
  config.target_errors = 1000000;
  const SweepResult result = ser_sweep(config, {0.0, 10.0, 20.0}, 600);
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    const SweepPoint& lo = result.points[i - 1];
    const SweepPoint& hi = result.points[i];
    CHECK(hi.vmp.ser() <=
          lo.vmp.ser() + lo.vmp.wilson().half_width + hi.vmp.wilson().half_width);
    CHECK(hi.zf.ser() <=
          lo.zf.ser() + lo.zf.wilson().half_width + hi.zf.wilson().half_width);
    CHECK(hi.mfb.ser() <=
          lo.mfb.ser() + lo.mfb.wilson().half_width + hi.mfb.wilson().half_width);
  }
}

TEST_CASE("snr grid spans start to stop inclusively") {
  SystemConfig config = default_config();
  config.snr_start_db = 0.0;
  config.snr_step_db = 2.0;
  config.snr_stop_db = 20.0;
  const std::vector<double> grid = snr_grid(config);
  REQUIRE(grid.size() == 11);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(20.0));
}

TEST_CASE("average column energy is deterministic and positive") {
  const SystemConfig config = toy_config();
  const double a = average_column_energy(config);
  const double b = average_column_energy(config);
  CHECK(a == b);
  CHECK(a > 0.0);
}
