#include "pendlim/timesim.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pendlim/errors.hpp"
#include "pendlim/format.hpp"

namespace pendlim {

std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double GaussianCounterStream::uniform(std::uint64_t i) const {
  const std::uint64_t h = splitmix64(seed_ + (i + 1) * 0x9E3779B97F4A7C15ULL);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::array<double, 2> GaussianCounterStream::pair(std::uint64_t k) const {
  const double u1 = uniform(2 * k);
  const double u2 = uniform(2 * k + 1);
  const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

void SimConfig::validate() const {
  params.validate();
  if (!(delay >= 0.0) || !std::isfinite(delay)) throw ConfigError("tau", "delay must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "step must be finite and > 0");
  if (delay > 0.0 && dt > delay / 10.0 * (1.0 + 1e-12)) throw ConfigError("dt", "step must satisfy dt <= tau/10");
  if (!(duration >= 100.0 * dt * (1.0 - 1e-12)) || !std::isfinite(duration)) {
    throw ConfigError("duration", "must be at least 100 steps");
  }
  if (!(sensor_noise_std >= 0.0)) throw ConfigError("sensor_noise_std", "must be >= 0");
  if (!(actuation_noise_std >= 0.0)) throw ConfigError("actuation_noise_std", "must be >= 0");
  for (double v : initial_state) {
    if (!std::isfinite(v)) throw ConfigError("initial_state", "must be finite");
  }
  if (!controller.is_proper()) throw ConfigError("controller", "controller must be proper to be realized");
}

ControllerRealization realize(const RationalTF& tf) {
  if (!tf.is_proper()) throw DomainError("controller", "improper transfer function has no state-space realization");
  const std::size_t n = static_cast<std::size_t>(tf.den_degree());
  const double a0 = tf.den()[0];
  ControllerRealization r;
  std::vector<double> b(n + 1, 0.0);
  const auto& num = tf.num();
  for (std::size_t i = 0; i < num.size(); ++i) b[n + 1 - num.size() + i] = num[i] / a0;
  r.D = b[0];
  if (n == 0) return r;
  std::vector<double> a(n + 1);
  for (std::size_t i = 0; i <= n; ++i) a[i] = tf.den()[i] / a0;
  r.A.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) r.A[0][j] = -a[j + 1];
  for (std::size_t i = 1; i < n; ++i) r.A[i][i - 1] = 1.0;
  r.B.assign(n, 0.0);
  r.B[0] = 1.0;
  r.C.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.C[i] = b[i + 1] - r.D * a[i + 1];
  return r;
}

namespace {

class ClosedLoopSystem {
 public:
  ClosedLoopSystem(const SimConfig& cfg, const ControllerRealization& ctrl)
      : ss_(state_space_up(cfg.params)), delay_(cfg.delay), dt_(cfg.dt) {
    const auto n = static_cast<Eigen::Index>(ctrl.order());
    Ac_.resize(n, n);
    Bc_.resize(n);
    Cc_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) Ac_(i, j) = ctrl.A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      Bc_(i) = ctrl.B[static_cast<std::size_t>(i)];
      Cc_(i) = ctrl.C[static_cast<std::size_t>(i)];
    }
    Dc_ = ctrl.D;
  }

  Eigen::Index size() const { return 4 + Ac_.rows(); }

  double output_z(const Eigen::VectorXd& s) const { return ss_.Cz.dot(s.head<4>()); }

  double controller_output(const Eigen::VectorXd& s, double y) const {
    return Cc_.dot(s.tail(Ac_.rows())) + Dc_ * y;
  }

  // Delayed controller output v(t) from buffered step values; zero before t = 0.
  double delayed(double t) const {
    if (t <= 0.0) return 0.0;
    const double pos = t / dt_;
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    const double v0 = k < history_.size() ? history_[k] : history_.back();
    const double v1 = k + 1 < history_.size() ? history_[k + 1] : history_.back();
    return v0 + frac * (v1 - v0);
  }

  double control(double t, const Eigen::VectorXd& s, double noise_n, double noise_r) const {
    if (delay_ > 0.0) return -delayed(t - delay_) + noise_r;
    return -controller_output(s, output_z(s) + noise_n) + noise_r;
  }

  Eigen::VectorXd derivative(double t, const Eigen::VectorXd& s, double noise_n, double noise_r) const {
    const double y = output_z(s) + noise_n;
    const double u = control(t, s, noise_n, noise_r);
    Eigen::VectorXd ds(size());
    ds.head<4>() = ss_.A * s.head<4>() + ss_.B * u;
    const Eigen::Index n = Ac_.rows();
    if (n > 0) ds.tail(n) = Ac_ * s.tail(n) + Bc_ * y;
    return ds;
  }

  void push_history(double v) { history_.push_back(v); }

 private:
  StateSpaceUp ss_;
  Eigen::MatrixXd Ac_;
  Eigen::VectorXd Bc_;
  Eigen::VectorXd Cc_;
  double Dc_ = 0.0;
  double delay_;
  double dt_;
  std::vector<double> history_;
};

constexpr double kDivergenceLimit = 1e6;

}  // namespace

Trajectory simulate(const SimConfig& cfg) {
  cfg.validate();
  const ControllerRealization ctrl = realize(cfg.controller);
  ClosedLoopSystem sys(cfg, ctrl);
  const GaussianCounterStream noise(cfg.seed);

  Eigen::VectorXd state = Eigen::VectorXd::Zero(sys.size());
  for (int i = 0; i < 4; ++i) state(i) = cfg.initial_state[static_cast<std::size_t>(i)];

  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  Trajectory traj;
  traj.t.reserve(steps + 1);
  const double h = cfg.dt;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    const auto draws = noise.pair(k);
    const double n_k = cfg.sensor_noise_std * draws[0];
    const double r_k = cfg.actuation_noise_std * draws[1];

    const double z = sys.output_z(state);
    const double y = z + n_k;
    sys.push_history(sys.controller_output(state, y));

    traj.t.push_back(t);
    traj.x.push_back(state(0));
    traj.theta.push_back(state(2));
    traj.z.push_back(z);
    traj.y.push_back(y);
    traj.u.push_back(sys.control(t, state, n_k, r_k));

    if (!(std::abs(z) <= kDivergenceLimit)) {
      traj.diverged = true;
      break;
    }
    if (k == steps) break;

    const Eigen::VectorXd k1 = sys.derivative(t, state, n_k, r_k);
    const Eigen::VectorXd k2 = sys.derivative(t + 0.5 * h, state + 0.5 * h * k1, n_k, r_k);
    const Eigen::VectorXd k3 = sys.derivative(t + 0.5 * h, state + 0.5 * h * k2, n_k, r_k);
    const Eigen::VectorXd k4 = sys.derivative(t + h, state + h * k3, n_k, r_k);
    state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t_s,x_m,theta_rad,z_m,y_m,u_N\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_number(traj.t[i]) << ',' << format_number(traj.x[i]) << ',' << format_number(traj.theta[i])
       << ',' << format_number(traj.z[i]) << ',' << format_number(traj.y[i]) << ',' << format_number(traj.u[i])
       << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("input", "empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_s,x_m,theta_rad,z_m,y_m,u_N") throw DomainError("input", "unexpected trajectory header '" + line + "'");
  Trajectory traj;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    double v[6];
    const char* p = line.c_str();
    for (int c = 0; c < 6; ++c) {
      char* end = nullptr;
      v[c] = std::strtod(p, &end);
      if (end == p) throw DomainError("input", "malformed number on line " + std::to_string(lineno));
      p = end;
      if (c < 5) {
        if (*p != ',') throw DomainError("input", "expected 6 columns on line " + std::to_string(lineno));
        ++p;
      }
    }
    traj.t.push_back(v[0]);
    traj.x.push_back(v[1]);
    traj.theta.push_back(v[2]);
    traj.z.push_back(v[3]);
    traj.y.push_back(v[4]);
    traj.u.push_back(v[5]);
  }
  return traj;
}

TrajectoryColumn parse_trajectory_column(const std::string& name) {
  if (name == "x") return TrajectoryColumn::X;
  if (name == "theta") return TrajectoryColumn::Theta;
  if (name == "z") return TrajectoryColumn::Z;
  if (name == "y") return TrajectoryColumn::Y;
  if (name == "u") return TrajectoryColumn::U;
  throw DomainError("column", "unknown trajectory column '" + name + "'");
}

const std::vector<double>& column(const Trajectory& traj, TrajectoryColumn c) {
  switch (c) {
    case TrajectoryColumn::X: return traj.x;
    case TrajectoryColumn::Theta: return traj.theta;
    case TrajectoryColumn::Z: return traj.z;
    case TrajectoryColumn::Y: return traj.y;
    case TrajectoryColumn::U: return traj.u;
  }
  return traj.z;
}

Spectrum psd(const Trajectory& traj, TrajectoryColumn col, std::size_t segment_len, double overlap) {
  if (traj.size() < 2) throw DomainError("trajectory", "need at least two samples");
  const double dt = traj.t[1] - traj.t[0];
  if (!(dt > 0.0)) throw DomainError("trajectory", "time column must increase");
  return welch_psd(column(traj, col), 1.0 / dt, segment_len, overlap);
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spec) {
  os << "freq_hz,power\n";
  for (std::size_t i = 0; i < spec.freqs.size(); ++i) {
    os << format_number(spec.freqs[i]) << ',' << format_number(spec.power[i]) << '\n';
  }
}

}  // namespace pendlim
