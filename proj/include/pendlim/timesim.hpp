#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pendlim/lti.hpp"
#include "pendlim/plant.hpp"

namespace pendlim {

/// Counter-based standard normal source: draw k uses SplitMix64 of
/// seed + (k+1) * 0x9E3779B97F4A7C15 for two 53-bit uniforms, then Box-Muller.
/// Pair k yields (cos branch, sin branch).
class GaussianCounterStream {
 public:
  explicit GaussianCounterStream(std::uint64_t seed) : seed_(seed) {}

  /// Two independent N(0, 1) samples for step k.
  std::array<double, 2> pair(std::uint64_t k) const;
  /// Uniform in [0, 1) for counter index i.
  double uniform(std::uint64_t i) const;

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct SimConfig {
  PendulumParams params{};
  RationalTF controller = RationalTF::constant(0.0);
  double delay = 0.0;       // s
  double dt = 1e-3;         // s
  double duration = 1.0;    // s
  double sensor_noise_std = 0.0;     // m
  double actuation_noise_std = 0.0;  // N
  std::uint64_t seed = 0;
  std::array<double, 4> initial_state{0.0, 0.0, 0.0, 0.0};  // x, xdot, theta, thetadot

  void validate() const;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> theta;
  std::vector<double> z;
  std::vector<double> y;
  std::vector<double> u;
  bool diverged = false;

  std::size_t size() const noexcept { return t.size(); }
};

/// Controllable canonical realization of a proper controller.
struct ControllerRealization {
  std::vector<std::vector<double>> A;
  std::vector<double> B;
  std::vector<double> C;
  double D = 0.0;

  std::size_t order() const noexcept { return B.size(); }
};

/// Throws DomainError("controller", ...) for an improper transfer function.
ControllerRealization realize(const RationalTF& tf);

/// Fixed-step RK4 of the upright linearization with u(t) = -C[y](t - tau) + r.
/// Sensor noise n (added to y) and actuation noise r are held constant over
/// each step. The delayed controller output is read from a buffer of past
/// step values with linear interpolation. Integration halts and sets
/// `diverged` once |z| exceeds 1e6 m.
Trajectory simulate(const SimConfig& cfg);

/// "t_s,x_m,theta_rad,z_m,y_m,u_N"
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);

struct Spectrum {
  std::vector<double> freqs;  // Hz
  std::vector<double> power;  // unit^2 / Hz, one-sided
};

enum class TrajectoryColumn { X, Theta, Z, Y, U };
TrajectoryColumn parse_trajectory_column(const std::string& name);
const std::vector<double>& column(const Trajectory& traj, TrajectoryColumn c);

/// Segment-averaged periodogram (Welch): periodic Hann window, segment mean
/// removed, one-sided density. overlap is the fraction of segment_len shared
/// by consecutive segments, in [0, 0.9].
Spectrum welch_psd(std::span<const double> samples, double sample_rate_hz, std::size_t segment_len,
                   double overlap = 0.5);
Spectrum psd(const Trajectory& traj, TrajectoryColumn col, std::size_t segment_len, double overlap = 0.5);

/// "freq_hz,power"
void write_spectrum_csv(std::ostream& os, const Spectrum& spec);

}  // namespace pendlim
