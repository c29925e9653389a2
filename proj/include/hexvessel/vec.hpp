#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hexvessel {

// Coordinates are millimetres wherever they cross an I/O boundary.
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace hexvessel
