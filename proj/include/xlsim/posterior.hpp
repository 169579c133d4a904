#ifndef XLSIM_POSTERIOR_HPP
#define XLSIM_POSTERIOR_HPP

#include <complex>
#include <vector>

#include "xlsim/constellation.hpp"

namespace xlsim {

// Discrete distribution of one user's symbol over the constellation.
// log_pmf is canonical; pmf, mean and variance are kept in sync by
// recompute_moments(), which every constructor and update goes through.
struct SymbolPosterior {
  std::vector<double> log_pmf;
  std::vector<double> pmf;
  std::complex<double> mean{0.0, 0.0};
  double variance = 0.0;
};

// Normalizes arbitrary log weights with log-sum-exp.
SymbolPosterior make_posterior_from_log(const Constellation& constellation,
                                        const std::vector<double>& log_weights);

SymbolPosterior make_uniform_posterior(const Constellation& constellation);

// Derives pmf from log_pmf and refreshes the cached moments. The only
// moment writer, so cached values always reproduce bitwise.
void recompute_moments(SymbolPosterior& posterior, const Constellation& constellation);

// factor * fresh + (1 - factor) * previous, in the probability domain.
SymbolPosterior damp(const SymbolPosterior& fresh, const SymbolPosterior& previous,
                     double factor, const Constellation& constellation);

// Most probable index; ties break toward the lowest index.
int argmax_index(const SymbolPosterior& posterior);

}  // namespace xlsim

#endif
