#include "xlsim/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace xlsim {

int Constellation::nearest(std::complex<double> value) const {
  int best = 0;
  double best_distance = std::norm(value - points[0]);
  for (int i = 1; i < order(); ++i) {
    const double distance = std::norm(value - points[i]);
    if (distance < best_distance) {
      best_distance = distance;
      best = i;
    }
  }
  return best;
}

Constellation make_constellation(int order, double power) {
  if (power <= 0.0) {
    throw std::invalid_argument("make_constellation: power must be positive");
  }
  Constellation constellation;
  constellation.power = power;
  if (order == 4) {
    const double amplitude = std::sqrt(power / 2.0);
    constellation.points = {
        {amplitude, amplitude},
        {-amplitude, amplitude},
        {-amplitude, -amplitude},
        {amplitude, -amplitude},
    };
    constellation.bit_labels = {"00", "01", "11", "10"};
  } else if (order == 16) {
    const double scale = std::sqrt(power / 10.0);
    const double levels[4] = {-3.0, -1.0, 1.0, 3.0};
    const char* gray[4] = {"00", "01", "11", "10"};
    for (int i = 0; i < 4; ++i) {
      for (int q = 0; q < 4; ++q) {
        constellation.points.emplace_back(levels[i] * scale, levels[q] * scale);
        constellation.bit_labels.push_back(std::string(gray[i]) + gray[q]);
      }
    }
  } else {
    throw std::invalid_argument("make_constellation: unsupported order");
  }
  return constellation;
}

}  // namespace xlsim
