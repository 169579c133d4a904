#include "xlsim/rng.hpp"

#include <cmath>

namespace xlsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt));
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t point_index,
                         std::uint64_t trial_index) {
  return derive_seed(master_seed, kTrialTag ^ (static_cast<std::uint64_t>(point_index) << 32) ^
                                      trial_index);
}

std::uint64_t stream_seed(std::uint64_t trial, Stream stream) {
  return derive_seed(trial, static_cast<std::uint64_t>(stream));
}

int Rng::uniform_int(int n) {
  const std::uint64_t bound = ~std::uint64_t{0} - (~std::uint64_t{0} % static_cast<std::uint64_t>(n));
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= bound);
  return static_cast<int>(x % static_cast<std::uint64_t>(n));
}

double Rng::gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

std::complex<double> Rng::complex_gaussian(double variance) {
  const double scale = std::sqrt(variance / 2.0);
  const double re = gaussian();
  const double im = gaussian();
  return {scale * re, scale * im};
}

}  // namespace xlsim
