// Independent reference implementations used only by the tests. These stay
// deliberately naive (plain loops, textbook formulas) so they cannot share a
// bug with the library code they check.
#ifndef XLSIM_TEST_ORACLES_HPP
#define XLSIM_TEST_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace test_oracle {

using cplx = std::complex<double>;

// Recursive adaptive Simpson on a complex integrand.
inline cplx adaptive_simpson(const std::function<cplx(double)>& f, double a, double b,
                             double tol, int depth = 60) {
  const double m = 0.5 * (a + b);
  const cplx fa = f(a), fm = f(m), fb = f(b);
  std::function<cplx(double, double, cplx, cplx, cplx, double, int)> recurse =
      [&](double lo, double hi, cplx flo, cplx fmid, cplx fhi, double eps,
          int level) -> cplx {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const cplx flm = f(lm), frm = f(rm);
    const cplx whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    const cplx left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const cplx right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    const cplx delta = left + right - whole;
    if (level <= 0 || std::abs(delta) <= 15.0 * eps) {
      return left + right + delta / 15.0;
    }
    return recurse(lo, mid, flo, flm, fmid, eps / 2.0, level - 1) +
           recurse(mid, hi, fmid, frm, fhi, eps / 2.0, level - 1);
  };
  return recurse(a, b, fa, fm, fb, tol, depth);
}

// One-ring correlation entry between antennas p and q of a half-wavelength
// ULA, integrated to 1e-12 by adaptive quadrature.
inline cplx one_ring_entry(int p, int q, double azimuth, double spread, double spacing,
                           double wavelength) {
  const double beta = 2.0 * M_PI * spacing / wavelength;
  const double lag = static_cast<double>(p - q);
  const auto integrand = [&](double alpha) {
    return std::exp(cplx(0.0, -beta * lag * std::cos(azimuth + alpha)));
  };
  return adaptive_simpson(integrand, -spread, spread, 1e-13 * 2.0 * spread) /
         (2.0 * spread);
}

struct MrcReference {
  cplx estimate;
  double variance;
};

// Straight-loop matched-filter estimate and interference-plus-noise variance.
inline MrcReference mrc_reference(const Eigen::MatrixXcd& channel,
                                  const Eigen::VectorXcd& received, int user,
                                  double noise_variance, double power) {
  const int num_antennas = static_cast<int>(channel.rows());
  const int num_users = static_cast<int>(channel.cols());
  cplx filtered(0.0, 0.0);
  double energy = 0.0;
  for (int b = 0; b < num_antennas; ++b) {
    filtered += std::conj(channel(b, user)) * received[b];
    energy += std::norm(channel(b, user));
  }
  double interference = 0.0;
  for (int other = 0; other < num_users; ++other) {
    if (other == user) continue;
    cplx cross(0.0, 0.0);
    for (int b = 0; b < num_antennas; ++b) {
      cross += std::conj(channel(b, user)) * channel(b, other);
    }
    interference += std::norm(cross);
  }
  MrcReference ref;
  ref.estimate = filtered / energy;
  ref.variance = (interference + energy * noise_variance) / (power * energy * energy);
  return ref;
}

// Normal-equations least squares through an explicit Gram inverse.
inline Eigen::VectorXcd normal_equations_solve(const Eigen::MatrixXcd& channel,
                                               const Eigen::VectorXcd& received) {
  const Eigen::MatrixXcd gram = channel.adjoint() * channel;
  return gram.fullPivLu().solve(channel.adjoint() * received);
}

}  // namespace test_oracle

#endif
