#ifndef XLSIM_DETECTORS_HPP
#define XLSIM_DETECTORS_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "xlsim/config.hpp"
#include "xlsim/constellation.hpp"
#include "xlsim/posterior.hpp"

namespace xlsim {

// Multiply counts under the accounting that reproduces the closed-form
// complexity of both receivers: per VMP iteration, 3 + 2K multiplies per
// antenna for the precision update and |A| per antenna-user pair for the
// message products; 3M per user for the MRC initialization. The ZF count is
// kept in units of one third of a multiply so K^3/3 stays exact.
struct OpCounter {
  std::uint64_t mrc_init = 0;          // MRC initialization
  std::uint64_t precision_update = 0;  // per-antenna precision refresh
  std::uint64_t message_update = 0;    // symbol message products
  std::uint64_t zf_thirds = 0;

  std::uint64_t vmp_total() const { return mrc_init + precision_update + message_update; }
};

// Nearest integer to a count held in thirds (.5 never occurs).
std::uint64_t thirds_to_nearest(std::uint64_t thirds);

// Per-antenna residual energy and posterior-mean noise precision.
struct PrecisionState {
  Eigen::VectorXd residual_energy;  // floored at 1e-12
  Eigen::VectorXd precision_mean;   // (shape + 1) / (rate + residual_energy)
  double prior_shape = 0.0;
  double prior_rate = 0.0;
};

struct DetectionResult {
  std::vector<int> hard_symbols;
  std::vector<SymbolPosterior> posteriors;  // VMP only
  int iterations_run = 0;
  std::uint64_t op_count = 0;
  OpCounter ops;
};

class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MrcEstimate {
  std::complex<double> estimate;
  double variance = 0.0;
};

// Matched-filter estimate x_k = h_k^H y / |h_k|^2 with the
// interference-plus-noise variance
//   (sum_{k' != k} |h_k^H h_k'|^2 + |h_k|^2 nv) / (P |h_k|^4),
// floored at 1e-12. Throws on a zero-norm column.
std::vector<MrcEstimate> mrc_estimates(const Eigen::MatrixXcd& channel,
                                       const Eigen::VectorXcd& received,
                                       double noise_variance, double power);

// The estimates projected onto the constellation,
// log q0(a) = -|a - estimate|^2 / variance, normalized.
std::vector<SymbolPosterior> mrc_initialize(const Eigen::MatrixXcd& channel,
                                            const Eigen::VectorXcd& received,
                                            double noise_variance,
                                            const Constellation& constellation,
                                            OpCounter* ops = nullptr);

// Residual energy per antenna from the current symbol moments,
//   Z_b = |y_b - sum_k H_bk mean_k|^2 + sum_k var_k |H_bk|^2,
// floored at 1e-12, and its induced posterior-mean precision.
PrecisionState update_precisions(const Eigen::MatrixXcd& channel,
                                 const Eigen::VectorXcd& received,
                                 const std::vector<SymbolPosterior>& posteriors,
                                 double prior_shape, double prior_rate,
                                 OpCounter* ops = nullptr);

// Per-user findings fused across antennas:
//   log q_k(a) = sum_b -precision_b |H_bk a - (y_b - sum_{k'!=k} H_bk' mean_k')|^2
// plus the (uniform) log prior, normalized with log-sum-exp. The Jacobi
// schedule uses the snapshot moments throughout; gauss_seidel refreshes the
// residual after each user.
std::vector<SymbolPosterior> update_symbol_posteriors(
    const Eigen::MatrixXcd& channel, const Eigen::VectorXcd& received,
    const PrecisionState& precision, const std::vector<SymbolPosterior>& posteriors,
    const Constellation& constellation,
    UpdateSchedule schedule = UpdateSchedule::jacobi, OpCounter* ops = nullptr);

// MRC initialization followed by `vmp_iterations` rounds of precision and
// symbol updates with damping, then per-user hard decisions (ties toward the
// lowest index). Pure function of its inputs.
DetectionResult vmp_detect(const Eigen::MatrixXcd& channel,
                           const Eigen::VectorXcd& received, const SystemConfig& config,
                           const Constellation& constellation);

// Least-squares interference nulling via rank-revealing QR; throws
// RankDeficientError when the channel loses column rank.
DetectionResult zf_detect(const Eigen::MatrixXcd& channel,
                          const Eigen::VectorXcd& received,
                          const Constellation& constellation);

// Genie bound: interference-free observation h x + n, MRC, slice.
int mfb_detect(const Eigen::VectorXcd& column, std::complex<double> symbol,
               const Eigen::VectorXcd& noise, const Constellation& constellation);

// Closed-form QPSK symbol error rate at post-combining SNR `snr`
// (symbol energy over noise power).
double qpsk_symbol_error_rate(double snr);

}  // namespace xlsim

#endif
