#include "pendlim/plant.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "pendlim/errors.hpp"

namespace pendlim {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(name, "must be finite and > 0");
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(name, "must be finite and >= 0");
}

}  // namespace

void RawParams::validate() const {
  require_positive(human_mass, "human_mass");
  require_positive(stick_mass, "stick_mass");
  require_positive(stick_length, "stick_length_actual");
  require_nonnegative(fixation_point, "fixation_point");
  require_positive(gravity, "gravity");
}

void PendulumParams::validate() const {
  require_positive(cart_mass, "cart_mass");
  require_nonnegative(stick_mass, "stick_mass");
  require_positive(stick_length, "stick_length");
  require_nonnegative(fixation_point, "fixation_point");
  require_positive(gravity, "gravity");
}

PendulumParams effective_params(const RawParams& raw) {
  raw.validate();
  PendulumParams p;
  p.stick_mass = 0.75 * raw.stick_mass;
  p.cart_mass = 0.25 * raw.stick_mass + raw.human_mass;
  p.stick_length = (2.0 / 3.0) * raw.stick_length;
  p.fixation_point = raw.fixation_point;
  p.gravity = raw.gravity;
  return p;
}

RawParams actual_params(const PendulumParams& params) {
  params.validate();
  RawParams raw;
  raw.stick_mass = params.stick_mass / 0.75;
  raw.human_mass = params.cart_mass - 0.25 * raw.stick_mass;
  raw.stick_length = 1.5 * params.stick_length;
  raw.fixation_point = params.fixation_point;
  raw.gravity = params.gravity;
  raw.validate();
  return raw;
}

RationalTF plant_tf(const PendulumParams& params, Orientation orient) {
  params.validate();
  const double M = params.cart_mass;
  const double m = params.stick_mass;
  const double l = params.stick_length;
  const double g = params.gravity;
  const double sign = orient == Orientation::Upright ? -1.0 : 1.0;
  return RationalTF({l - params.fixation_point, 0.0, sign * g},
                    {M * l, 0.0, sign * (M + m) * g, 0.0, 0.0});
}

PoleZeroSet poles_zeros(const PendulumParams& params, Orientation orient) {
  params.validate();
  const double M = params.cart_mass;
  const double m = params.stick_mass;
  const double l = params.stick_length;
  const double l0 = params.fixation_point;
  const double g = params.gravity;
  const double pole = std::sqrt((M + m) * g / (M * l));
  const bool upright = orient == Orientation::Upright;

  PoleZeroSet out;
  out.poles = {0.0, 0.0};
  if (upright) {
    out.poles.insert(out.poles.end(), {Complex{pole, 0.0}, Complex{-pole, 0.0}});
  } else {
    out.poles.insert(out.poles.end(), {Complex{0.0, pole}, Complex{0.0, -pole}});
  }

  if (l0 == l) return out;
  const double zero = std::sqrt(g / std::abs(l - l0));
  // Real pair for (upright, l0 < l) and (downward, l0 > l); imaginary otherwise.
  const bool real_pair = upright == (l0 < l);
  if (real_pair) {
    out.zeros = {Complex{zero, 0.0}, Complex{-zero, 0.0}};
  } else {
    out.zeros = {Complex{0.0, zero}, Complex{0.0, -zero}};
  }
  return out;
}

RhpPoleZero rhp_pole_zero(const PendulumParams& params) {
  params.validate();
  const double M = params.cart_mass;
  const double m = params.stick_mass;
  const double l = params.stick_length;
  const double l0 = params.fixation_point;
  const double g = params.gravity;
  RhpPoleZero out{std::sqrt((M + m) * g / (M * l)), std::nullopt};
  if (l0 < l) out.q = std::sqrt(g / (l - l0));
  return out;
}

StateSpaceUp state_space_up(const PendulumParams& params) {
  params.validate();
  const double M = params.cart_mass;
  const double m = params.stick_mass;
  const double l = params.stick_length;
  const double g = params.gravity;
  // thetaddot = ((M+m) g theta - (u+r)) / (M l),  xddot = -(m/M) g theta + (u+r)/M
  StateSpaceUp ss;
  ss.A.setZero();
  ss.A(0, 1) = 1.0;
  ss.A(1, 2) = -m * g / M;
  ss.A(2, 3) = 1.0;
  ss.A(3, 2) = (M + m) * g / (M * l);
  ss.B << 0.0, 1.0 / M, 0.0, -1.0 / (M * l);
  ss.Cz << 1.0, 0.0, params.fixation_point, 0.0;
  return ss;
}

Complex StateSpaceUp::transfer(Complex s) const {
  const Eigen::Matrix4cd resolvent = s * Eigen::Matrix4cd::Identity() - A.cast<Complex>();
  const Eigen::Vector4cd x = resolvent.partialPivLu().solve(B.cast<Complex>());
  return Cz.cast<Complex>() * x;
}

}  // namespace pendlim
