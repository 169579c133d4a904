#include "xlsim/detectors.hpp"

#include <cmath>

namespace xlsim {

namespace {

constexpr double kVarianceFloor = 1e-12;
constexpr double kResidualFloor = 1e-12;

Eigen::VectorXcd posterior_means(const std::vector<SymbolPosterior>& posteriors) {
  Eigen::VectorXcd means(posteriors.size());
  for (std::size_t k = 0; k < posteriors.size(); ++k) means[k] = posteriors[k].mean;
  return means;
}

Eigen::VectorXd posterior_variances(const std::vector<SymbolPosterior>& posteriors) {
  Eigen::VectorXd variances(posteriors.size());
  for (std::size_t k = 0; k < posteriors.size(); ++k) {
    variances[k] = posteriors[k].variance;
  }
  return variances;
}

}  // namespace

std::uint64_t thirds_to_nearest(std::uint64_t thirds) {
  return thirds / 3 + (thirds % 3 == 2 ? 1 : 0);
}

std::vector<MrcEstimate> mrc_estimates(const Eigen::MatrixXcd& channel,
                                       const Eigen::VectorXcd& received,
                                       double noise_variance, double power) {
  const int num_users = static_cast<int>(channel.cols());
  const Eigen::MatrixXcd gram = channel.adjoint() * channel;
  const Eigen::VectorXcd matched = channel.adjoint() * received;

  std::vector<MrcEstimate> estimates(num_users);
  for (int k = 0; k < num_users; ++k) {
    const double energy = gram(k, k).real();
    if (energy <= 0.0) {
      throw std::runtime_error("mrc_estimates: user has a zero-norm channel column");
    }
    double interference = 0.0;
    for (int j = 0; j < num_users; ++j) {
      if (j != k) interference += std::norm(gram(k, j));
    }
    estimates[k].estimate = matched[k] / energy;
    estimates[k].variance = std::max(
        (interference + energy * noise_variance) / (power * energy * energy),
        kVarianceFloor);
  }
  return estimates;
}

std::vector<SymbolPosterior> mrc_initialize(const Eigen::MatrixXcd& channel,
                                            const Eigen::VectorXcd& received,
                                            double noise_variance,
                                            const Constellation& constellation,
                                            OpCounter* ops) {
  const int num_antennas = static_cast<int>(channel.rows());
  const int num_users = static_cast<int>(channel.cols());
  const std::vector<MrcEstimate> estimates =
      mrc_estimates(channel, received, noise_variance, constellation.power);

  std::vector<SymbolPosterior> posteriors;
  posteriors.reserve(num_users);
  std::vector<double> log_weights(constellation.order());
  for (int k = 0; k < num_users; ++k) {
    for (int i = 0; i < constellation.order(); ++i) {
      log_weights[i] =
          -std::norm(constellation.points[i] - estimates[k].estimate) /
          estimates[k].variance;
    }
    posteriors.push_back(make_posterior_from_log(constellation, log_weights));
    if (ops != nullptr) ops->mrc_init += 3ull * num_antennas;
  }
  return posteriors;
}

PrecisionState update_precisions(const Eigen::MatrixXcd& channel,
                                 const Eigen::VectorXcd& received,
                                 const std::vector<SymbolPosterior>& posteriors,
                                 double prior_shape, double prior_rate,
                                 OpCounter* ops) {
  const int num_antennas = static_cast<int>(channel.rows());
  const int num_users = static_cast<int>(channel.cols());

  const Eigen::VectorXcd residual = received - channel * posterior_means(posteriors);
  const Eigen::VectorXd spread =
      channel.cwiseAbs2() * posterior_variances(posteriors);

  PrecisionState state;
  state.prior_shape = prior_shape;
  state.prior_rate = prior_rate;
  state.residual_energy.resize(num_antennas);
  state.precision_mean.resize(num_antennas);
  for (int b = 0; b < num_antennas; ++b) {
    const double energy = std::max(std::norm(residual[b]) + spread[b], kResidualFloor);
    state.residual_energy[b] = energy;
    state.precision_mean[b] = (prior_shape + 1.0) / (prior_rate + energy);
    if (ops != nullptr) ops->precision_update += 3ull + 2ull * num_users;
  }
  return state;
}

std::vector<SymbolPosterior> update_symbol_posteriors(
    const Eigen::MatrixXcd& channel, const Eigen::VectorXcd& received,
    const PrecisionState& precision, const std::vector<SymbolPosterior>& posteriors,
    const Constellation& constellation, UpdateSchedule schedule, OpCounter* ops) {
  const int num_antennas = static_cast<int>(channel.rows());
  const int num_users = static_cast<int>(channel.cols());
  const int order = constellation.order();
  const double log_prior = 0.0;  // uniform over the constellation

  Eigen::VectorXcd residual = received - channel * posterior_means(posteriors);

  std::vector<SymbolPosterior> updated;
  updated.reserve(num_users);
  std::vector<double> log_weights(order);
  for (int k = 0; k < num_users; ++k) {
    const std::complex<double> old_mean = posteriors[k].mean;
    std::complex<double> matched(0.0, 0.0);
    double gain = 0.0;
    for (int b = 0; b < num_antennas; ++b) {
      const std::complex<double> coeff = channel(b, k);
      const std::complex<double> target = residual[b] + coeff * old_mean;
      matched += precision.precision_mean[b] * coeff * std::conj(target);
      gain += precision.precision_mean[b] * std::norm(coeff);
      if (ops != nullptr) ops->message_update += static_cast<std::uint64_t>(order);
    }
    for (int i = 0; i < order; ++i) {
      const std::complex<double> point = constellation.points[i];
      log_weights[i] = 2.0 * (matched * point).real() - gain * std::norm(point) + log_prior;
    }
    updated.push_back(make_posterior_from_log(constellation, log_weights));
    if (schedule == UpdateSchedule::gauss_seidel) {
      const std::complex<double> shift = updated[k].mean - old_mean;
      if (shift != std::complex<double>(0.0, 0.0)) {
        residual -= channel.col(k) * shift;
      }
    }
  }
  return updated;
}

DetectionResult vmp_detect(const Eigen::MatrixXcd& channel,
                           const Eigen::VectorXcd& received, const SystemConfig& config,
                           const Constellation& constellation) {
  if (channel.rows() != received.size()) {
    throw std::invalid_argument("vmp_detect: dimension mismatch");
  }
  DetectionResult result;
  std::vector<SymbolPosterior> posteriors = mrc_initialize(
      channel, received, config.noise_variance, constellation, &result.ops);

  for (int iteration = 0; iteration < config.vmp_iterations; ++iteration) {
    const PrecisionState precision =
        update_precisions(channel, received, posteriors, config.gamma_prior_shape,
                          config.gamma_prior_rate, &result.ops);
    const std::vector<SymbolPosterior> fresh =
        update_symbol_posteriors(channel, received, precision, posteriors,
                                 constellation, config.vmp_schedule, &result.ops);
    for (std::size_t k = 0; k < posteriors.size(); ++k) {
      posteriors[k] = damp(fresh[k], posteriors[k], config.vmp_damping, constellation);
    }
  }

  result.iterations_run = config.vmp_iterations;
  result.hard_symbols.resize(posteriors.size());
  for (std::size_t k = 0; k < posteriors.size(); ++k) {
    result.hard_symbols[k] = argmax_index(posteriors[k]);
  }
  result.posteriors = std::move(posteriors);
  result.op_count = result.ops.vmp_total();
  return result;
}

DetectionResult zf_detect(const Eigen::MatrixXcd& channel,
                          const Eigen::VectorXcd& received,
                          const Constellation& constellation) {
  if (channel.rows() != received.size()) {
    throw std::invalid_argument("zf_detect: dimension mismatch");
  }
  const auto num_antennas = static_cast<std::uint64_t>(channel.rows());
  const auto num_users = static_cast<std::uint64_t>(channel.cols());

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(channel);
  if (qr.rank() < channel.cols()) {
    throw RankDeficientError("zf_detect: channel matrix is rank deficient");
  }
  const Eigen::VectorXcd estimate = qr.solve(received);

  DetectionResult result;
  result.hard_symbols.resize(channel.cols());
  for (int k = 0; k < channel.cols(); ++k) {
    result.hard_symbols[k] = constellation.nearest(estimate[k]);
  }
  // Counted per the closed form K^3/3 + M K^2 + M K, in thirds.
  result.ops.zf_thirds = num_users * num_users * num_users +
                         3ull * num_antennas * num_users * num_users +
                         3ull * num_antennas * num_users;
  result.op_count = thirds_to_nearest(result.ops.zf_thirds);
  return result;
}

int mfb_detect(const Eigen::VectorXcd& column, std::complex<double> symbol,
               const Eigen::VectorXcd& noise, const Constellation& constellation) {
  const double energy = column.squaredNorm();
  if (energy <= 0.0) {
    throw std::runtime_error("mfb_detect: zero-norm channel column");
  }
  const Eigen::VectorXcd genie = column * symbol + noise;
  const std::complex<double> combined = column.dot(genie) / energy;
  return constellation.nearest(combined);
}

double qpsk_symbol_error_rate(double snr) {
  const double q = 0.5 * std::erfc(std::sqrt(snr) / std::sqrt(2.0));
  return 2.0 * q - q * q;
}

}  // namespace xlsim
