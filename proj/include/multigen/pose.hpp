#pragma once

#include <cmath>
#include <numbers>

#include "multigen/error.hpp"
#include "multigen/vec2.hpp"

namespace multigen {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps any finite angle onto the canonical range [-pi, pi).
inline double wrap_angle(double theta) {
  if (!std::isfinite(theta)) throw GeometryError("wrap_angle: non-finite angle");
  double wrapped = theta - kTwoPi * std::floor((theta + kPi) / kTwoPi);
  // floor() rounding can land exactly on the open end or a hair below the start.
  if (wrapped >= kPi) wrapped -= kTwoPi;
  if (wrapped < -kPi) wrapped = -kPi;
  return wrapped;
}

/// Player position and yaw. Theta is kept canonical by every mutator.
class Pose {
 public:
  Pose() = default;
  Pose(double x, double y, double theta) : x_(x), y_(y), theta_(wrap_angle(theta)) {}
  Pose(Vec2 p, double theta) : Pose(p.x, p.y, theta) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Vec2 position() const { return {x_, y_}; }
  Vec2 forward() const { return unit_from_angle(theta_); }

  void set_position(Vec2 p) {
    x_ = p.x;
    y_ = p.y;
  }
  void set_theta(double theta) { theta_ = wrap_angle(theta); }

  bool operator==(const Pose&) const = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

}  // namespace multigen
