#ifndef XLSIM_CHANNEL_HPP
#define XLSIM_CHANNEL_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "xlsim/config.hpp"
#include "xlsim/geometry.hpp"
#include "xlsim/rng.hpp"

namespace xlsim {

using cplx = std::complex<double>;

// Contiguous stretch of the array where one user's channel is non-zero.
// The antenna index range is closed; an interval that misses every antenna
// is empty (last < first) and gets resampled by sample_visibility_region.
struct VisibilityRegion {
  double center = 0.0;  // meters along the array
  double length = 0.0;  // meters
  int first = 0;
  int last = -1;

  bool empty() const { return last < first; }
  int count() const { return empty() ? 0 : last - first + 1; }
  bool contains(int antenna) const { return antenna >= first && antenna <= last; }
};

// Interval [center - length/2, center + length/2] clipped to the array;
// antennas on the closed boundary are included.
VisibilityRegion visibility_region_from_interval(double center, double length,
                                                 const SystemConfig& config);

// Draws center ~ U(0, L) and length ~ LogNormal(vr_log_mean, vr_log_sigma),
// resampling until the region covers at least one antenna (at most 1000
// attempts).
VisibilityRegion sample_visibility_region(const SystemConfig& config,
                                          const SystemGeometry& geometry, Rng& rng);

// One-ring correlation over the visibility region: the (p, q) entry is the
// scattering-ring average of the plane-wave phase between antennas p and q,
//
//   (1 / 2*spread) * integral_{-spread}^{+spread}
//       exp(-j * (2*pi/lambda) * cos(azimuth + a) * (x_p - x_q)) da,
//
// for p, q inside the region and exactly zero elsewhere. Quadrature is
// composite Gauss-Legendre with the panel count chosen from the worst-lag
// phase swing, keeping the absolute error below 1e-8.

// In-VR block only (count x count), Hermitian PSD with unit diagonal.
Eigen::MatrixXcd one_ring_covariance_block(const VisibilityRegion& vr, double azimuth,
                                           double spread, double spacing,
                                           double wavelength);

// Full masked matrix (M x M) with exact zeros outside the region.
Eigen::MatrixXcd one_ring_covariance(const VisibilityRegion& vr, double azimuth,
                                     double spread, const SystemGeometry& geometry,
                                     double wavelength);

// Truncated eigenexpansion of a covariance matrix: `basis` has orthonormal
// columns, `eigenvalues` is descending and clamped at zero.
struct KlFactor {
  Eigen::MatrixXcd basis;       // M x rank
  Eigen::VectorXd eigenvalues;  // rank
};

// Top-`rank` eigenpairs of a Hermitian PSD matrix. Backed by a diagonally
// pivoted low-rank Cholesky factorization plus a dense eigensolve of the
// small Gram matrix; modes beyond the numerical rank come out as zero
// eigenvalues with orthonormal complement vectors.
KlFactor kl_factor(const Eigen::MatrixXcd& covariance, int rank);

// Same, starting from the in-VR block of the masked matrix.
KlFactor kl_factor_block(const Eigen::MatrixXcd& block, const VisibilityRegion& vr,
                         int num_antennas, int rank);

// basis * diag(sqrt(eigenvalues)) * white
Eigen::VectorXcd kl_map(const KlFactor& kl, const Eigen::VectorXcd& white);

// Correlated fading draw: white ~ CN(0, I_rank).
Eigen::VectorXcd sample_fast_fading(const KlFactor& kl, Rng& rng);

// Large-scale gain per antenna: omega * s^(sign * exponent).
Eigen::VectorXd large_scale_weights(int user, const SystemGeometry& geometry,
                                    double omega, double exponent, int sign);

// Element-wise sqrt(weights) * fast_fading. Throws on negative weights.
Eigen::VectorXcd assemble_channel(const Eigen::VectorXd& weights,
                                  const Eigen::VectorXcd& fast_fading);

Eigen::MatrixXcd assemble_matrix(const std::vector<Eigen::VectorXcd>& columns);

struct UserChannel {
  VisibilityRegion vr;
  Eigen::MatrixXcd covariance;  // M x M, masked; empty if not retained
  KlFactor kl;
  Eigen::VectorXd weights;
  Eigen::VectorXcd fast_fading;
  Eigen::VectorXcd column;
};

struct Observation {
  Eigen::VectorXcd received;
  Eigen::VectorXcd true_symbols;
  double noise_variance = 0.0;
  Eigen::VectorXcd noise;  // retained for the matched-filter bound
};

// received = H * symbols + noise, noise ~ CN(0, noise_variance * I).
Observation transmit(const Eigen::MatrixXcd& channel_matrix,
                     const Eigen::VectorXcd& symbols, double noise_variance, Rng& rng);

struct ChannelRealization {
  SystemGeometry geometry;
  std::vector<UserChannel> users;
  Eigen::MatrixXcd matrix;  // M x K
};

// Full channel draw: geometry, per-user VR / covariance / KL factor /
// weights / fading, and the stacked matrix. Each random ingredient consumes
// its own stream. keep_covariance=false skips retaining the M x M masked
// covariances (the hot path for Monte Carlo sweeps).
ChannelRealization generate_channel(const SystemConfig& config, Rng& geometry_rng,
                                    Rng& vr_rng, Rng& fading_rng,
                                    bool keep_covariance = true);

}  // namespace xlsim

#endif
