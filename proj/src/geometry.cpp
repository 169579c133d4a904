#include "xlsim/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace xlsim {

SystemGeometry build_geometry(const SystemConfig& config, Rng& rng) {
  const int num_antennas = config.num_antennas;
  const int num_users = config.num_users;
  const double spacing = config.antenna_spacing_m;
  const double array_length = config.array_length();

  SystemGeometry geometry;
  geometry.antenna_positions.resize(num_antennas);
  for (int m = 0; m < num_antennas; ++m) {
    geometry.antenna_positions[m] = {m * spacing, 0.0};
  }

  geometry.user_positions.resize(num_users);
  for (int k = 0; k < num_users; ++k) {
    const double x = rng.uniform(0.0, array_length);
    const double y = rng.uniform(config.user_depth_min, config.user_depth_max);
    geometry.user_positions[k] = {x, y};
  }

  geometry.distances.resize(num_users, num_antennas);
  for (int k = 0; k < num_users; ++k) {
    for (int m = 0; m < num_antennas; ++m) {
      const double dx = geometry.user_positions[k].x - geometry.antenna_positions[m].x;
      const double dy = geometry.user_positions[k].y - geometry.antenna_positions[m].y;
      const double distance = std::hypot(dx, dy);
      if (distance <= 0.0) {
        throw std::runtime_error("geometry: user coincides with an antenna");
      }
      geometry.distances(k, m) = distance;
    }
  }

  geometry.scatter_radii.resize(num_users);
  for (int k = 0; k < num_users; ++k) {
    geometry.scatter_radii[k] =
        rng.uniform(config.scatter_radius_min, config.scatter_radius_max);
  }

  geometry.azimuths.assign(num_users, 0.0);
  geometry.angular_spreads.assign(num_users, 0.0);
  return geometry;
}

double azimuth_from(const Vec2& point, double reference_x) {
  return std::atan2(point.y, point.x - reference_x);
}

void set_user_angles(SystemGeometry& geometry, int user, double vr_center_x) {
  const Vec2& position = geometry.user_positions.at(user);
  const double dx = position.x - vr_center_x;
  const double reference_distance = std::hypot(dx, position.y);
  if (reference_distance <= 0.0) {
    throw std::runtime_error("geometry: user coincides with its VR center");
  }
  geometry.azimuths.at(user) = azimuth_from(position, vr_center_x);
  geometry.angular_spreads.at(user) =
      std::atan(geometry.scatter_radii.at(user) / reference_distance);
}

}  // namespace xlsim
