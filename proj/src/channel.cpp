#include "xlsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace xlsim {

namespace {

constexpr int kNodesPerPanel = 64;
// Max phase range (radians) one 64-point panel is allowed to cover; well
// inside the range where Gauss-Legendre is accurate to ~1e-13 for exp(j q x).
constexpr double kMaxPanelPhase = 100.0;

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes and weights on [-1, 1] via Newton iteration on the Legendre
// recurrence.
GaussLegendre gauss_legendre(int n) {
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

const GaussLegendre& panel_rule() {
  static const GaussLegendre rule = gauss_legendre(kNodesPerPanel);
  return rule;
}

// Range of cos over [lo, hi]: endpoints plus any interior extremum of cos.
void cosine_range(double lo, double hi, double& cmin, double& cmax) {
  cmin = std::min(std::cos(lo), std::cos(hi));
  cmax = std::max(std::cos(lo), std::cos(hi));
  const long first = static_cast<long>(std::ceil(lo / M_PI));
  const long last = static_cast<long>(std::floor(hi / M_PI));
  for (long k = first; k <= last; ++k) {
    const double extremum = (k % 2 == 0) ? 1.0 : -1.0;
    cmin = std::min(cmin, extremum);
    cmax = std::max(cmax, extremum);
  }
}

// Scattering-ring correlation at integer antenna lags 0 .. num_lags-1:
//   rho(l) = (1 / 2*spread) * integral exp(-j * beta * l * cos(azimuth + a)) da
// over a in [-spread, spread], beta = 2*pi*spacing/wavelength. Nodes are
// shared across lags so each lag costs one complex multiply per node.
std::vector<cplx> lag_correlation(int num_lags, double beta, double azimuth,
                                  double spread) {
  double cmin = 0.0, cmax = 0.0;
  cosine_range(azimuth - spread, azimuth + spread, cmin, cmax);
  const double worst_swing = beta * std::max(0, num_lags - 1) * (cmax - cmin);
  const int panels =
      std::clamp(static_cast<int>(std::ceil(worst_swing / kMaxPanelPhase)), 1, 65536);

  const GaussLegendre& rule = panel_rule();
  const int num_nodes = panels * kNodesPerPanel;
  // split real/imag so the per-lag recurrence vectorizes across nodes
  std::vector<double> acc_re(num_nodes), acc_im(num_nodes);
  std::vector<double> step_re(num_nodes), step_im(num_nodes);
  const double panel_width = 2.0 * spread / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = -spread + p * panel_width;
    const double mid = a + panel_width / 2.0;
    for (int i = 0; i < kNodesPerPanel; ++i) {
      const int idx = p * kNodesPerPanel + i;
      const double alpha = mid + 0.5 * panel_width * rule.nodes[i];
      const double phase = -beta * std::cos(azimuth + alpha);
      // (1/2*spread) * (panel_width/2) * w_i
      acc_re[idx] = rule.weights[i] * panel_width / (4.0 * spread);
      acc_im[idx] = 0.0;
      step_re[idx] = std::cos(phase);
      step_im[idx] = std::sin(phase);
    }
  }

  std::vector<cplx> rho(num_lags);
  for (int lag = 0; lag < num_lags; ++lag) {
    double sum_re = 0.0, sum_im = 0.0;
    for (int i = 0; i < num_nodes; ++i) {
      sum_re += acc_re[i];
      sum_im += acc_im[i];
    }
    if (!std::isfinite(sum_re) || !std::isfinite(sum_im)) {
      throw std::runtime_error("one_ring_covariance: non-finite quadrature result");
    }
    rho[lag] = cplx(sum_re, sum_im);
    if (lag + 1 < num_lags) {
      for (int i = 0; i < num_nodes; ++i) {
        const double re = acc_re[i] * step_re[i] - acc_im[i] * step_im[i];
        acc_im[i] = acc_re[i] * step_im[i] + acc_im[i] * step_re[i];
        acc_re[i] = re;
      }
    }
  }
  rho[0] = cplx(1.0, 0.0);  // integrand is identically 1 at lag 0
  return rho;
}

// Diagonally pivoted Cholesky, stopped once the remaining trace falls below
// rel_tol * trace. Returns L with R ~ L * L^H (n x effective rank); the
// residual R - L L^H is PSD with trace <= rel_tol * trace(R), so the top
// eigenvalues of L L^H match those of R to that absolute accuracy.
Eigen::MatrixXcd pivoted_cholesky(const Eigen::MatrixXcd& matrix, double rel_tol) {
  const int n = static_cast<int>(matrix.rows());
  Eigen::VectorXd diag = matrix.diagonal().real();
  double remaining = diag.sum();
  const double tol = rel_tol * std::max(remaining, 0.0);
  Eigen::MatrixXcd factor(n, n);
  Eigen::VectorXcd pivot_row(n);
  Eigen::VectorXcd column(n);
  int rank = 0;
  while (rank < n && remaining > tol) {
    int pivot = 0;
    double best = diag[0];
    for (int i = 1; i < n; ++i) {
      if (diag[i] > best) {
        best = diag[i];
        pivot = i;
      }
    }
    if (best <= 0.0) break;
    const double scale = std::sqrt(best);
    column = matrix.col(pivot);
    if (rank > 0) {
      for (int j = 0; j < rank; ++j) pivot_row[j] = std::conj(factor(pivot, j));
      column.noalias() -= factor.leftCols(rank) * pivot_row.head(rank);
    }
    column /= scale;
    factor.col(rank) = column;
    remaining = 0.0;
    for (int i = 0; i < n; ++i) {
      diag[i] -= std::norm(column[i]);
      if (diag[i] < 0.0) diag[i] = 0.0;
      remaining += diag[i];
    }
    diag[pivot] = 0.0;
    ++rank;
  }
  return factor.leftCols(rank);
}

// Appends `needed` orthonormal columns spanning directions orthogonal to the
// existing ones, preferring canonical vectors outside `support`.
void pad_orthonormal(Eigen::MatrixXcd& basis, int filled,
                     const std::vector<bool>& in_support) {
  const int rows = static_cast<int>(basis.rows());
  const int total = static_cast<int>(basis.cols());
  std::vector<int> candidates;
  candidates.reserve(rows);
  for (int i = 0; i < rows; ++i) {
    if (!in_support[i]) candidates.push_back(i);
  }
  for (int i = 0; i < rows; ++i) {
    if (in_support[i]) candidates.push_back(i);
  }
  std::size_t next = 0;
  for (int c = filled; c < total; ++c) {
    bool accepted = false;
    while (!accepted && next < candidates.size()) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(rows);
      v[candidates[next++]] = cplx(1.0, 0.0);
      // two Gram-Schmidt passes keep orthogonality near machine precision
      for (int pass = 0; pass < 2; ++pass) {
        v.noalias() -= basis.leftCols(c) * (basis.leftCols(c).adjoint() * v);
      }
      const double norm = v.norm();
      if (norm > 1e-3) {
        basis.col(c) = v / norm;
        accepted = true;
      }
    }
    if (!accepted) {
      throw std::runtime_error("kl_factor: unable to complete orthonormal basis");
    }
  }
}

KlFactor kl_factor_indexed(const Eigen::MatrixXcd& sub, const std::vector<int>& support,
                           int num_antennas, int rank) {
  if (rank < 1 || rank > num_antennas) {
    throw std::invalid_argument("kl_factor: rank must lie in [1, num_antennas]");
  }
  const Eigen::MatrixXcd low_rank = pivoted_cholesky(sub, 1e-10);
  const int chol_rank = static_cast<int>(low_rank.cols());

  KlFactor kl;
  kl.basis = Eigen::MatrixXcd::Zero(num_antennas, rank);
  kl.eigenvalues = Eigen::VectorXd::Zero(rank);

  int filled = 0;
  if (chol_rank > 0) {
    const Eigen::MatrixXcd gram = low_rank.adjoint() * low_rank;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("kl_factor: eigensolver failed");
    }
    const double floor = 1e-14 * std::max(solver.eigenvalues().maxCoeff(), 0.0);
    const int keep = std::min(rank, chol_rank);
    int used = 0;
    Eigen::MatrixXcd combo(chol_rank, keep);
    for (int i = 0; i < keep; ++i) {
      const int src = chol_rank - 1 - i;  // solver sorts ascending
      const double value = solver.eigenvalues()[src];
      if (value <= floor) break;
      combo.col(used) = solver.eigenvectors().col(src) / std::sqrt(value);
      kl.eigenvalues[used] = value;
      ++used;
    }
    if (used > 0) {
      const Eigen::MatrixXcd modes = low_rank * combo.leftCols(used);
      for (std::size_t r = 0; r < support.size(); ++r) {
        kl.basis.row(support[r]).head(used) = modes.row(static_cast<int>(r));
      }
    }
    filled = used;
  }

  if (filled < rank) {
    std::vector<bool> in_support(num_antennas, false);
    for (int idx : support) in_support[idx] = true;
    pad_orthonormal(kl.basis, filled, in_support);
  }
  return kl;
}

}  // namespace

VisibilityRegion visibility_region_from_interval(double center, double length,
                                                 const SystemConfig& config) {
  const double spacing = config.antenna_spacing_m;
  const double array_length = config.array_length();
  const double lo = std::max(0.0, center - length / 2.0);
  const double hi = std::min(array_length, center + length / 2.0);

  VisibilityRegion vr;
  vr.center = center;
  vr.length = length;
  const double eps = 1e-9 * spacing;
  int first = static_cast<int>(std::ceil((lo - eps) / spacing));
  int last = static_cast<int>(std::floor((hi + eps) / spacing));
  first = std::max(first, 0);
  last = std::min(last, config.num_antennas - 1);
  if (lo > hi || first > last) {
    vr.first = 0;
    vr.last = -1;
  } else {
    vr.first = first;
    vr.last = last;
  }
  return vr;
}

VisibilityRegion sample_visibility_region(const SystemConfig& config,
                                          const SystemGeometry& geometry, Rng& rng) {
  (void)geometry;
  const double array_length = config.array_length();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double center = rng.uniform(0.0, array_length);
    const double length = rng.lognormal(config.vr_log_mean, config.vr_log_sigma);
    const VisibilityRegion vr = visibility_region_from_interval(center, length, config);
    if (!vr.empty()) return vr;
  }
  throw std::runtime_error(
      "sample_visibility_region: 1000 rejections; VR length parameters are "
      "inconsistent with the array");
}

Eigen::MatrixXcd one_ring_covariance_block(const VisibilityRegion& vr, double azimuth,
                                           double spread, double spacing,
                                           double wavelength) {
  if (vr.empty()) {
    throw std::invalid_argument("one_ring_covariance: empty visibility region");
  }
  if (spread <= 0.0) {
    throw std::invalid_argument("one_ring_covariance: angular spread must be positive");
  }
  const int n = vr.count();
  const double beta = 2.0 * M_PI * spacing / wavelength;
  const std::vector<cplx> rho = lag_correlation(n, beta, azimuth, spread);

  Eigen::MatrixXcd block(n, n);
  for (int q = 0; q < n; ++q) {
    block(q, q) = rho[0];
    for (int p = q + 1; p < n; ++p) {
      block(p, q) = rho[p - q];
      block(q, p) = std::conj(rho[p - q]);
    }
  }
  return block;
}

Eigen::MatrixXcd one_ring_covariance(const VisibilityRegion& vr, double azimuth,
                                     double spread, const SystemGeometry& geometry,
                                     double wavelength) {
  const int num_antennas = static_cast<int>(geometry.antenna_positions.size());
  double spacing = 1.0;
  if (num_antennas >= 2) {
    spacing = geometry.antenna_positions[1].x - geometry.antenna_positions[0].x;
  }
  const Eigen::MatrixXcd block =
      one_ring_covariance_block(vr, azimuth, spread, spacing, wavelength);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(num_antennas, num_antennas);
  full.block(vr.first, vr.first, vr.count(), vr.count()) = block;
  return full;
}

KlFactor kl_factor(const Eigen::MatrixXcd& covariance, int rank) {
  const int n = static_cast<int>(covariance.rows());
  if (covariance.cols() != n) {
    throw std::invalid_argument("kl_factor: covariance must be square");
  }
  std::vector<int> support;
  support.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (covariance(i, i).real() > 0.0) support.push_back(i);
  }
  Eigen::MatrixXcd sub(support.size(), support.size());
  for (std::size_t r = 0; r < support.size(); ++r) {
    for (std::size_t c = 0; c < support.size(); ++c) {
      sub(static_cast<int>(r), static_cast<int>(c)) = covariance(support[r], support[c]);
    }
  }
  return kl_factor_indexed(sub, support, n, rank);
}

KlFactor kl_factor_block(const Eigen::MatrixXcd& block, const VisibilityRegion& vr,
                         int num_antennas, int rank) {
  if (block.rows() != vr.count() || block.cols() != vr.count()) {
    throw std::invalid_argument("kl_factor_block: block size does not match the VR");
  }
  std::vector<int> support(vr.count());
  for (int i = 0; i < vr.count(); ++i) support[i] = vr.first + i;
  return kl_factor_indexed(block, support, num_antennas, rank);
}

Eigen::VectorXcd kl_map(const KlFactor& kl, const Eigen::VectorXcd& white) {
  if (white.size() != kl.eigenvalues.size()) {
    throw std::invalid_argument("kl_map: white vector size must equal the KL rank");
  }
  const Eigen::VectorXcd scaled =
      kl.eigenvalues.array().max(0.0).sqrt().matrix().asDiagonal() * white;
  return kl.basis * scaled;
}

Eigen::VectorXcd sample_fast_fading(const KlFactor& kl, Rng& rng) {
  Eigen::VectorXcd white(kl.eigenvalues.size());
  for (int i = 0; i < white.size(); ++i) white[i] = rng.complex_gaussian(1.0);
  return kl_map(kl, white);
}

Eigen::VectorXd large_scale_weights(int user, const SystemGeometry& geometry,
                                    double omega, double exponent, int sign) {
  const int num_antennas = static_cast<int>(geometry.antenna_positions.size());
  Eigen::VectorXd weights(num_antennas);
  for (int m = 0; m < num_antennas; ++m) {
    const double distance = geometry.distances(user, m);
    if (distance <= 0.0) {
      throw std::invalid_argument("large_scale_weights: non-positive distance");
    }
    weights[m] = omega * std::pow(distance, sign * exponent);
  }
  return weights;
}

Eigen::VectorXcd assemble_channel(const Eigen::VectorXd& weights,
                                  const Eigen::VectorXcd& fast_fading) {
  if (weights.size() != fast_fading.size()) {
    throw std::invalid_argument("assemble_channel: size mismatch");
  }
  Eigen::VectorXcd column(weights.size());
  for (int m = 0; m < weights.size(); ++m) {
    if (weights[m] < 0.0) {
      throw std::invalid_argument("assemble_channel: negative weight");
    }
    column[m] = std::sqrt(weights[m]) * fast_fading[m];
  }
  return column;
}

Eigen::MatrixXcd assemble_matrix(const std::vector<Eigen::VectorXcd>& columns) {
  if (columns.empty()) {
    throw std::invalid_argument("assemble_matrix: no columns");
  }
  Eigen::MatrixXcd matrix(columns.front().size(), columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k].size() != matrix.rows()) {
      throw std::invalid_argument("assemble_matrix: ragged columns");
    }
    matrix.col(static_cast<int>(k)) = columns[k];
  }
  return matrix;
}

Observation transmit(const Eigen::MatrixXcd& channel_matrix,
                     const Eigen::VectorXcd& symbols, double noise_variance, Rng& rng) {
  if (channel_matrix.cols() != symbols.size()) {
    throw std::invalid_argument("transmit: symbol count must match channel columns");
  }
  if (noise_variance < 0.0) {
    throw std::invalid_argument("transmit: negative noise variance");
  }
  Observation obs;
  obs.true_symbols = symbols;
  obs.noise_variance = noise_variance;
  obs.noise.resize(channel_matrix.rows());
  for (int m = 0; m < obs.noise.size(); ++m) {
    obs.noise[m] = rng.complex_gaussian(noise_variance);
  }
  obs.received = channel_matrix * symbols + obs.noise;
  return obs;
}

ChannelRealization generate_channel(const SystemConfig& config, Rng& geometry_rng,
                                    Rng& vr_rng, Rng& fading_rng, bool keep_covariance) {
  ChannelRealization realization;
  realization.geometry = build_geometry(config, geometry_rng);

  const int num_users = config.num_users;
  std::vector<VisibilityRegion> regions(num_users);
  for (int k = 0; k < num_users; ++k) {
    regions[k] = sample_visibility_region(config, realization.geometry, vr_rng);
  }

  realization.users.resize(num_users);
  std::vector<Eigen::VectorXcd> columns(num_users);
  const double wavelength = config.wavelength();
  for (int k = 0; k < num_users; ++k) {
    set_user_angles(realization.geometry, k, regions[k].center);
    UserChannel& user = realization.users[k];
    user.vr = regions[k];
    const Eigen::MatrixXcd block = one_ring_covariance_block(
        user.vr, realization.geometry.azimuths[k],
        realization.geometry.angular_spreads[k], config.antenna_spacing_m, wavelength);
    user.kl = kl_factor_block(block, user.vr, config.num_antennas, config.kl_rank);
    user.fast_fading = sample_fast_fading(user.kl, fading_rng);
    user.weights =
        large_scale_weights(k, realization.geometry, config.attenuation_omega,
                            config.pathloss_exponent, config.pathloss_exponent_sign);
    user.column = assemble_channel(user.weights, user.fast_fading);
    if (keep_covariance) {
      user.covariance =
          Eigen::MatrixXcd::Zero(config.num_antennas, config.num_antennas);
      user.covariance.block(user.vr.first, user.vr.first, user.vr.count(),
                            user.vr.count()) = block;
    }
    columns[k] = user.column;
  }
  realization.matrix = assemble_matrix(columns);
  return realization;
}

}  // namespace xlsim
