#pragma once

#include <Eigen/Core>

#include <optional>

#include "pendlim/lti.hpp"

namespace pendlim {

inline constexpr double kDefaultGravity = 9.81;

/// Rigid-body quantities as measured: human mass M', stick mass m', actual
/// stick length l'. The fixation point is already on the effective scale.
struct RawParams {
  double human_mass = 0.0;    // kg
  double stick_mass = 0.0;    // kg
  double stick_length = 0.0;  // m
  double fixation_point = 0.0;
  double gravity = kDefaultGravity;

  void validate() const;
};

/// Point-mass cart-pendulum parameters.
///
/// A stick mass of zero is accepted so that mass-ratio sweeps can start at
/// m/M = 0; every other field must be strictly positive (l0 >= 0).
struct PendulumParams {
  double cart_mass = 0.0;     // M, kg
  double stick_mass = 0.0;    // m, kg
  double stick_length = 0.0;  // l, m
  double fixation_point = 0.0;  // l0, m
  double gravity = kDefaultGravity;

  void validate() const;
};

enum class Orientation { Upright, Downward };

struct PoleZeroSet {
  std::vector<Complex> poles;  // double pole at the origin listed twice
  std::vector<Complex> zeros;
};

/// Upright linearization. State (x, xdot, theta, thetadot), input u + r,
/// output z = x + l0 theta.
struct StateSpaceUp {
  Eigen::Matrix4d A;
  Eigen::Vector4d B;
  Eigen::RowVector4d Cz;

  /// C_z (sI - A)^{-1} B
  Complex transfer(Complex s) const;
};

struct RhpPoleZero {
  double p;
  std::optional<double> q;  // present iff l0 < l
};

/// m = 3/4 m', M = 1/4 m' + M', l = 2/3 l'.
PendulumParams effective_params(const RawParams& raw);

/// Inverse of effective_params. Throws if the implied human mass is not positive.
RawParams actual_params(const PendulumParams& params);

/// P(s) = ((l - l0)s^2 -/+ g) / (s^2 (M l s^2 -/+ (M + m) g)), top sign upright.
RationalTF plant_tf(const PendulumParams& params, Orientation orient);

PoleZeroSet poles_zeros(const PendulumParams& params, Orientation orient);

RhpPoleZero rhp_pole_zero(const PendulumParams& params);

StateSpaceUp state_space_up(const PendulumParams& params);

}  // namespace pendlim
