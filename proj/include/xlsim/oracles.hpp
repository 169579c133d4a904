#ifndef XLSIM_ORACLES_HPP
#define XLSIM_ORACLES_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "xlsim/constellation.hpp"

namespace xlsim {

// Brute-force maximum-likelihood detection: minimizes |y - Hx|^2 over all
// |A|^K symbol combinations. Verification reference for the iterative
// detectors; only sensible for toy sizes.
inline std::vector<int> exhaustive_ml_detect(const Eigen::MatrixXcd& channel,
                                             const Eigen::VectorXcd& received,
                                             const Constellation& constellation) {
  const int num_users = static_cast<int>(channel.cols());
  const int order = constellation.order();
  double hypotheses = 1.0;
  for (int k = 0; k < num_users; ++k) hypotheses *= order;
  if (hypotheses > 1e6) {
    throw std::invalid_argument("exhaustive_ml_detect: search space too large");
  }

  std::vector<int> best(num_users, 0);
  std::vector<int> current(num_users, 0);
  double best_metric = -1.0;
  const auto total = static_cast<std::uint64_t>(hypotheses);
  for (std::uint64_t h = 0; h < total; ++h) {
    std::uint64_t rest = h;
    for (int k = 0; k < num_users; ++k) {
      current[k] = static_cast<int>(rest % order);
      rest /= order;
    }
    Eigen::VectorXcd x(num_users);
    for (int k = 0; k < num_users; ++k) x[k] = constellation.points[current[k]];
    const double metric = (received - channel * x).squaredNorm();
    if (best_metric < 0.0 || metric < best_metric) {
      best_metric = metric;
      best = current;
    }
  }
  return best;
}

}  // namespace xlsim

#endif
