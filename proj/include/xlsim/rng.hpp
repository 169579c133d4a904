#ifndef XLSIM_RNG_HPP
#define XLSIM_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace xlsim {

// One SplitMix64 output for the given input word. Used for seed derivation,
// not as a running generator.
std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent sub-seed from (seed, salt). All stream splitting in
// the simulator goes through this single construction so that any run is
// reproducible from the master seed alone:
//
//   trial  = derive_seed(master, kTrialTag ^ (point_index << 32) ^ trial_index)
//   stream = derive_seed(trial, stream_tag)
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

// Stream tags for the per-trial sub-generators.
enum class Stream : std::uint64_t {
  geometry = 0x67656f6d,
  visibility = 0x76697369,
  fading = 0x66616465,
  symbols = 0x73796d62,
  noise = 0x6e6f6973,
};

inline constexpr std::uint64_t kTrialTag = 0x747269616cULL;

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t point_index,
                         std::uint64_t trial_index);
std::uint64_t stream_seed(std::uint64_t trial, Stream stream);

// Deterministic random source. Distribution code is hand-rolled on top of
// std::mt19937_64 so that sequences do not depend on the standard library's
// unspecified distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., n-1} without modulo bias.
  int uniform_int(int n);

  // Standard normal deviate (Box-Muller; the pair partner is cached).
  double gaussian();

  // Circularly-symmetric complex Gaussian with the given total variance
  // (variance/2 per real dimension).
  std::complex<double> complex_gaussian(double variance);

  double lognormal(double log_mean, double log_sigma) {
    return std::exp(log_mean + log_sigma * gaussian());
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace xlsim

#endif
