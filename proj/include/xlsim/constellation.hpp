#ifndef XLSIM_CONSTELLATION_HPP
#define XLSIM_CONSTELLATION_HPP

#include <complex>
#include <string>
#include <vector>

namespace xlsim {

struct Constellation {
  std::vector<std::complex<double>> points;
  std::vector<std::string> bit_labels;  // Gray-coded
  double power = 1.0;                   // mean symbol energy

  int order() const { return static_cast<int>(points.size()); }

  // Index of the nearest point; ties break toward the lowest index.
  int nearest(std::complex<double> value) const;
};

// order 4: QPSK at (+-1 +- j) * sqrt(power/2), Gray labels 00/01/11/10 in
// angular order. order 16: square Gray-mapped QAM. Other orders throw.
Constellation make_constellation(int order, double power);

}  // namespace xlsim

#endif
