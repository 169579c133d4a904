#include "xlsim/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace xlsim {

void recompute_moments(SymbolPosterior& posterior, const Constellation& constellation) {
  const std::size_t size = posterior.log_pmf.size();
  posterior.pmf.resize(size);
  std::complex<double> mean(0.0, 0.0);
  double second_moment = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    posterior.pmf[i] = std::exp(posterior.log_pmf[i]);
    mean += posterior.pmf[i] * constellation.points[i];
    second_moment += posterior.pmf[i] * std::norm(constellation.points[i]);
  }
  posterior.mean = mean;
  posterior.variance = second_moment - std::norm(mean);
}

SymbolPosterior make_posterior_from_log(const Constellation& constellation,
                                        const std::vector<double>& log_weights) {
  if (log_weights.size() != static_cast<std::size_t>(constellation.order())) {
    throw std::invalid_argument("posterior: weight count must match the constellation");
  }
  // shift by the peak before normalizing; differences of nearby large
  // weights stay exact while the raw values may not
  const double peak = *std::max_element(log_weights.begin(), log_weights.end());
  SymbolPosterior posterior;
  posterior.log_pmf.resize(log_weights.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    posterior.log_pmf[i] = log_weights[i] - peak;
    sum += std::exp(posterior.log_pmf[i]);
  }
  const double log_sum = std::log(sum);
  for (double& value : posterior.log_pmf) value -= log_sum;
  recompute_moments(posterior, constellation);
  return posterior;
}

SymbolPosterior make_uniform_posterior(const Constellation& constellation) {
  return make_posterior_from_log(
      constellation, std::vector<double>(constellation.order(), 0.0));
}

SymbolPosterior damp(const SymbolPosterior& fresh, const SymbolPosterior& previous,
                     double factor, const Constellation& constellation) {
  if (factor < 0.0 || factor > 1.0) {
    throw std::invalid_argument("damp: factor must lie in [0, 1]");
  }
  SymbolPosterior result;
  const std::size_t size = fresh.pmf.size();
  result.log_pmf.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double p = factor * fresh.pmf[i] + (1.0 - factor) * previous.pmf[i];
    result.log_pmf[i] = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  }
  recompute_moments(result, constellation);
  return result;
}

int argmax_index(const SymbolPosterior& posterior) {
  int best = 0;
  for (std::size_t i = 1; i < posterior.pmf.size(); ++i) {
    if (posterior.pmf[i] > posterior.pmf[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace xlsim
