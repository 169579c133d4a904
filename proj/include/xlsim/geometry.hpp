#ifndef XLSIM_GEOMETRY_HPP
#define XLSIM_GEOMETRY_HPP

#include <vector>

#include <Eigen/Dense>

#include "xlsim/config.hpp"
#include "xlsim/rng.hpp"

namespace xlsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Uniform linear array on the x-axis plus randomly placed users in a
// rectangle in front of it. Azimuths and angular spreads are defined with
// respect to each user's visibility-region center, so they are filled in by
// set_user_angles() once the regions have been sampled.
struct SystemGeometry {
  std::vector<Vec2> antenna_positions;
  std::vector<Vec2> user_positions;
  Eigen::MatrixXd distances;  // num_users x num_antennas, meters
  std::vector<double> scatter_radii;
  std::vector<double> azimuths;         // radians, in (0, pi)
  std::vector<double> angular_spreads;  // radians, in (0, pi/2)
};

SystemGeometry build_geometry(const SystemConfig& config, Rng& rng);

// Azimuth of `point` as seen from x = reference_x on the array axis.
double azimuth_from(const Vec2& point, double reference_x);

// Fills azimuth and angular spread of one user for the given VR center.
// Spread is arctan(scatter radius / distance to the center).
void set_user_angles(SystemGeometry& geometry, int user, double vr_center_x);

}  // namespace xlsim

#endif
