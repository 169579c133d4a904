#include <doctest.h>

#include <cmath>
#include <complex>

#include "xlsim/constellation.hpp"

using namespace xlsim;
using cplx = std::complex<double>;

TEST_CASE("QPSK points and energy") {
  const Constellation qpsk = make_constellation(4, 1.0);
  REQUIRE(qpsk.order() == 4);
  double energy = 0.0;
  for (const cplx& p : qpsk.points) {
    CHECK(std::abs(p.real()) == doctest::Approx(std::sqrt(0.5)));
    CHECK(std::abs(p.imag()) == doctest::Approx(std::sqrt(0.5)));
    energy += std::norm(p);
  }
  CHECK(energy / 4.0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("QPSK labels are Gray coded around the circle") {
  const Constellation qpsk = make_constellation(4, 1.0);
  for (int i = 0; i < 4; ++i) {
    const std::string& a = qpsk.bit_labels[i];
    const std::string& b = qpsk.bit_labels[(i + 1) % 4];
    int flips = 0;
    for (int j = 0; j < 2; ++j) {
      if (a[j] != b[j]) ++flips;
    }
    CHECK(flips == 1);
  }
}

TEST_CASE("power scales every point") {
  const Constellation qpsk = make_constellation(4, 2.0);
  for (const cplx& p : qpsk.points) {
    CHECK(std::norm(p) == doctest::Approx(2.0));
  }
}

TEST_CASE("16-QAM mean energy equals the configured power") {
  const Constellation qam = make_constellation(16, 3.0);
  REQUIRE(qam.order() == 16);
  double energy = 0.0;
  for (const cplx& p : qam.points) energy += std::norm(p);
  CHECK(energy / 16.0 == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("unsupported orders are rejected") {
  CHECK_THROWS_AS(make_constellation(64, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_constellation(3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_constellation(4, 0.0), std::invalid_argument);
}

TEST_CASE("nearest point, ties to the lowest index") {
  const Constellation qpsk = make_constellation(4, 1.0);
  CHECK(qpsk.nearest(qpsk.points[2] * 1.01) == 2);
  CHECK(qpsk.nearest(cplx(0.0, 0.0)) == 0);  // equidistant from all four
  CHECK(qpsk.nearest(cplx(5.0, 0.1)) == 0);
  CHECK(qpsk.nearest(cplx(-5.0, -0.1)) == 2);
}
