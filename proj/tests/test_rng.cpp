#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "xlsim/rng.hpp"

using namespace xlsim;

TEST_CASE("same seed reproduces the sequence") {
  Rng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("derived stream seeds differ per tag and trial") {
  std::set<std::uint64_t> seen;
  for (auto stream : {Stream::geometry, Stream::visibility, Stream::fading,
                      Stream::symbols, Stream::noise}) {
    seen.insert(stream_seed(42, stream));
  }
  CHECK(seen.size() == 5);
  CHECK(trial_seed(7, 0, 0) != trial_seed(7, 0, 1));
  CHECK(trial_seed(7, 0, 0) != trial_seed(7, 1, 0));
  CHECK(trial_seed(7, 0, 0) != trial_seed(8, 0, 0));
}

TEST_CASE("uniform stays in range") {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(3.0, 7.0);
    CHECK(u >= 3.0);
    CHECK(u < 7.0);
  }
}

TEST_CASE("uniform_int covers all buckets") {
  Rng rng(5);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 40000; ++i) {
    const int v = rng.uniform_int(4);
    REQUIRE(v >= 0);
    REQUIRE(v < 4);
    ++counts[v];
  }
  for (int c : counts) CHECK(c > 9000);
}

TEST_CASE("gaussian moments") {
  Rng rng(77);
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sum2 += g * g;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("complex gaussian variance splits over components") {
  Rng rng(78);
  const int n = 100000;
  const double variance = 0.5;
  double re2 = 0.0, im2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = rng.complex_gaussian(variance);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
  }
  CHECK(re2 / n == doctest::Approx(variance / 2).epsilon(0.03));
  CHECK(im2 / n == doctest::Approx(variance / 2).epsilon(0.03));
}

TEST_CASE("log-normal empirical median matches the closed form") {
  Rng rng(79);
  const int n = 100000;
  std::vector<double> draws(n);
  for (int i = 0; i < n; ++i) draws[i] = rng.lognormal(2.25, 0.1);
  std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
  const double median = draws[n / 2];
  CHECK(median == doctest::Approx(std::exp(2.25)).epsilon(0.02));
}
