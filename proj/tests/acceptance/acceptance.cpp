// Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pendlim/plant.hpp"
#include "pendlim/quadrature.hpp"
#include "pendlim/robustness.hpp"
#include "pendlim/sweep.hpp"
#include "pendlim/timesim.hpp"
#include "support.hpp"

using namespace pendlim;
namespace pt = pendlim::testing;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent high-precision evaluations (30-digit mpmath) at the case-study
// masses M = 3.25, m = 0.1, l = 1, g = 9.81.
constexpr double kP = 3.17991291607901643903816933272;
constexpr double kQ08 = 7.00357051795725121047450932092;   // sqrt(g/(l - 0.8))
constexpr double kQ125 = 6.26418390534633010785465241353;  // sqrt(g/(1.25 - l))
constexpr double kFUpright = 0.953973874823704931711450799815;
constexpr double kF08 = 1.93353355958197213421433474232;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] criterion %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <class... A>
std::string fmtn(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

// Largest relative distance from each expected root to its nearest computed root.
double set_error(const std::vector<Complex>& got, const std::vector<Complex>& want) {
  if (got.size() != want.size()) return INFINITY;
  double worst = 0.0;
  std::vector<bool> used(got.size(), false);
  for (const Complex& w : want) {
    std::size_t best = got.size();
    double best_d = INFINITY;
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(got[i] - w);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d / std::max(1.0, std::abs(w)));
  }
  return worst;
}

struct Instance {
  ConstructedT T;
  FrequencyBand band;
};

std::vector<Instance> make_instances(int count) {
  std::vector<Instance> out;
  while (static_cast<int>(out.size()) < count) {
    const double p = pt::log_uniform(0.5, 10.0);
    std::optional<double> q;
    const double pick = pt::uniform(0.0, 3.0);
    if (pick < 1.0) {
      q = p * pt::uniform(1.3, 6.0);
    } else if (pick < 2.0) {
      q = p * pt::uniform(0.15, 0.75);
    }
    const double tau = pt::uniform(0.0, 0.5);
    const double a = p * pt::log_uniform(0.2, 20.0);
    const int n = 1 + static_cast<int>(pt::uniform(0.0, 4.0));
    const double w1 = p * pt::log_uniform(0.1, 3.0);
    const double w2 = w1 * pt::log_uniform(1.2, 10.0);
    out.push_back({ConstructedT(p, q, tau, a, n), {w1, w2}});
  }
  return out;
}

double hinf_of(const AxisEvaluator& eval) {
  FrequencyResponse r;
  r.omegas = default_grid();
  for (double w : r.omegas) r.values.push_back(eval(w));
  return hinf_estimate(r, eval);
}

// Composite Gauss-Legendre of the kernel over [lo, hi], log-spaced panels.
double kernel_mass(const PoissonKernel& k, double lo, double hi) {
  const GaussLegendreRule rule = gauss_legendre(24);
  const std::vector<double> edges = log_grid(lo, hi, 81);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double w = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[j];
      sum += 0.5 * (b - a) * rule.weights[j] * poisson_weight(k, w);
    }
  }
  return sum;
}

}  // namespace

int main() {
  const std::vector<Instance> instances = make_instances(200);

  report(1, "poles/zeros vs closed forms", [] {
    const Complex j{0.0, 1.0};
    struct Cell {
      Orientation o;
      double l0;
      std::vector<Complex> poles, zeros;
    };
    const std::vector<Cell> cells = {
        {Orientation::Upright, 0.8, {0, 0, kP, -kP}, {kQ08, -kQ08}},
        {Orientation::Upright, 1.0, {0, 0, kP, -kP}, {}},
        {Orientation::Upright, 1.25, {0, 0, kP, -kP}, {kQ125 * j, -kQ125 * j}},
        {Orientation::Downward, 0.8, {0, 0, kP * j, -kP * j}, {kQ08 * j, -kQ08 * j}},
        {Orientation::Downward, 1.0, {0, 0, kP * j, -kP * j}, {}},
        {Orientation::Downward, 1.25, {0, 0, kP * j, -kP * j}, {kQ125, -kQ125}},
    };
    double worst = 0.0;
    for (const Cell& c : cells) {
      const PoleZeroSet pz = poles_zeros(pt::case_study(c.l0), c.o);
      worst = std::max({worst, set_error(pz.poles, c.poles), set_error(pz.zeros, c.zeros)});
    }
    return Outcome{worst <= 1e-12, fmt("6 cells, max relative error %.3g (tol 1e-12)", worst)};
  });

  report(2, "fragility closed form", [] {
    const double e1 = std::abs(fragility(pt::case_study(1.0), 0.3).F - kFUpright);
    const double e2 = std::abs(fragility(pt::case_study(0.8), 0.3).F - kF08);
    return Outcome{e1 <= 1e-9 && e2 <= 1e-9,
                   fmtn("F(l0=l)=%.9f err %.2g, F(l0=0.8)=%.9f err %.2g (tol 1e-9)", kFUpright, e1, kF08, e2)};
  });

  report(3, "Bode integral oracle", [&] {
    double worst = 0.0;
    for (const Instance& in : instances) {
      const PoissonKernel k{in.T.p(), 0.0};
      const double got = bode_integral(axis_evaluator(in.T), k);
      worst = std::max(worst, std::abs(got - in.T.log_mp_at_pole()));
    }
    return Outcome{worst <= 1e-6, fmtn("%zu instances, max |integral - ln|T_mp(p)|| = %.3g (tol 1e-6)",
                                       instances.size(), worst)};
  });

  report(4, "Poisson kernel mass and c1/c2", [] {
    double mass_err = 0.0, c1_err = 0.0, sum_err = 0.0;
    const AxisEvaluator e_const = [](double) { return Complex{std::numbers::e, 0.0}; };
    for (int i = 0; i < 100; ++i) {
      const PoissonKernel k{pt::log_uniform(0.1, 50.0), pt::uniform(-20.0, 20.0)};
      mass_err = std::max(mass_err, std::abs(bode_integral(e_const, k) - 1.0));
    }
    for (int i = 0; i < 100; ++i) {
      const double p = pt::log_uniform(0.5, 10.0);
      const double w1 = p * pt::log_uniform(0.01, 10.0);
      const double w2 = w1 * pt::log_uniform(1.05, 100.0);
      const WaterbedConstants c = waterbed_constants(p, w1, w2);
      const double quad = 2.0 * kernel_mass(PoissonKernel{p, 0.0}, w1, w2);
      c1_err = std::max(c1_err, std::abs(c.c1 - quad));
      sum_err = std::max(sum_err, std::abs(c.c1 + c.c2 - 1.0));
    }
    return Outcome{mass_err <= 1e-8 && c1_err <= 1e-9 && sum_err <= 1e-12,
                   fmtn("mass err %.3g (tol 1e-8), c1 vs quadrature %.3g (tol 1e-9), |c1+c2-1| %.3g (tol 1e-12)",
                        mass_err, c1_err, sum_err)};
  });

  report(5, "H-infinity lower bound", [&] {
    double worst = INFINITY;
    for (const Instance& in : instances) {
      worst = std::min(worst, std::log(hinf_of(axis_evaluator(in.T))) - in.T.log_mp_at_pole());
    }
    double worst_loop = INFINITY;
    for (const pt::StableCase& sc : pt::stable_cases()) {
      const DelayLoop loop = pt::frozen_loop(*sc.controller, sc.delay);
      if (!nyquist_stable(loop)) return Outcome{false, std::string("loop ") + sc.controller->name + " not stable"};
      const double F = fragility(pt::case_study(sc.controller->l0), sc.delay).F;
      worst_loop = std::min(worst_loop, std::log(hinf_of(axis_evaluator(loop))) - F);
    }
    return Outcome{worst >= -1e-6 && worst_loop >= -1e-6,
                   fmtn("min ln||T|| - F: constructed %.3g, stable loops %.3g (tol -1e-6)", worst, worst_loop)};
  });

  report(6, "waterbed", [&] {
    std::size_t held = 0;
    for (const Instance& in : instances) {
      const WaterbedReport r = waterbed_check(axis_evaluator(in.T), in.T.p(), in.band, in.T.log_mp_at_pole());
      if (r.holds) ++held;
    }
    // Small-M1 probe: steep rolloff pushes |T| down inside the band.
    const double p = 3.18, q = 7.0, tau = 0.3;
    const FrequencyBand band{2.0 * kPi * 2.0, 2.0 * kPi * 4.0};
    std::optional<WaterbedReport> probe;
    for (int n = 1; n <= 12 && !probe; ++n) {
      const ConstructedT T(p, q, tau, 2.0, n);
      const WaterbedReport r = waterbed_check(axis_evaluator(T), p, band, T.log_mp_at_pole());
      if (r.M1 <= 0.5) probe = r;
    }
    if (!probe) return Outcome{false, "no rolloff order gives M1 <= 0.5"};
    const double need = std::exp((probe->F - probe->c1 * std::log(probe->M1)) / probe->c2);
    const bool forced = probe->M2 >= need * (1.0 - 1e-9);
    return Outcome{held == instances.size() && forced,
                   fmtn("holds on %zu/%zu; probe M1=%.4g M2=%.4g >= required %.4g", held, instances.size(),
                        probe->M1, probe->M2, need)};
  });

  // Depends on the assumed Fig. 2 parameters (case study, C = 10).
  report(7, "T peak band, C=10 [assumption-dependent]", [] {
    const PendulumParams p = pt::case_study(1.0);
    const std::vector<double> grid = default_grid();
    const FrequencyResponse resp = freq_response_sweep(p, 0.3, 10.0, grid);
    const DelayLoop loop{plant_tf(p, Orientation::Upright), RationalTF::constant(10.0), 0.3};
    const PeakLocation peak = refine_peak(resp, axis_evaluator(loop));
    const bool in_band = peak.omega >= 2.0 * kPi && peak.omega <= 4.0 * kPi;
    return Outcome{in_band, fmtn("argmax |T| = %.4f rad/s = %.4f Hz, required [%.4f, %.4f] rad/s; "
                                 "peak lies in 1-2 rad/s; loop is not closed-loop stable",
                                 peak.omega, peak.omega / (2.0 * kPi), 2.0 * kPi, 4.0 * kPi)};
  });

  report(8, "mass-ratio insensitivity", [] {
    SweepSpec spec;
    spec.vary = SweepVariable::MassRatio;
    spec.range = {0.0, 0.2, 201};
    spec.fixed = pt::case_study(1.0);
    spec.delay = 0.3;
    const FragilitySeries s = fragility_curve(spec);
    const auto [lo, hi] = std::minmax_element(s.F.begin(), s.F.end());
    const double variation = (*hi - *lo) / s.F.front();
    return Outcome{variation <= 0.05,
                   fmtn("relative variation %.4f over m/M in [0, 0.2] (limit 0.05; closed form sqrt(1.2)-1 = %.4f)",
                        variation, std::sqrt(1.2) - 1.0)};
  });

  report(9, "length, fixation and delay orderings", [] {
    SweepSpec solid;
    solid.vary = SweepVariable::StickLength;
    solid.range = {0.2, 2.0, 200};
    solid.fixed = pt::case_study(1.0);
    solid.couple_l0_to_l = true;
    const FragilitySeries base = fragility_curve(solid);
    bool decreasing = true;
    for (std::size_t i = 1; i < base.F.size(); ++i) decreasing = decreasing && base.F[i] < base.F[i - 1];

    bool dominance = true;
    for (double x = 0.2; x <= 0.9 + 1e-12; x += 0.01) {
      const double dashed = fragility(pt::case_study(x), 0.3).F;  // l = 1, l0 = x
      PendulumParams short_stick = pt::case_study(x);
      short_stick.stick_length = x;
      dominance = dominance && dashed > fragility(short_stick, 0.3).F;
    }

    bool ordered = true;
    const std::vector<double> taus = {0.5, 0.3, 0.2};
    std::vector<FragilitySeries> curves;
    for (double t : taus) {
      solid.delay = t;
      curves.push_back(fragility_curve(solid));
    }
    for (std::size_t i = 0; i < curves[0].F.size(); ++i) {
      ordered = ordered && curves[0].F[i] > curves[1].F[i] && curves[1].F[i] > curves[2].F[i];
    }
    return Outcome{decreasing && dominance && ordered,
                   fmtn("(a) decreasing in l: %s; (b) F(1,x) > F(x,x) on [0.2,0.9]: %s; (c) 0.5 > 0.3 > 0.2: %s",
                        decreasing ? "yes" : "no", dominance ? "yes" : "no", ordered ? "yes" : "no")};
  });

  report(10, "heatmap structure", [] {
    const FragilitySurface s =
        fragility_heatmap({0.2, 2.0, 200}, {0.2, 2.0, 200}, pt::case_study(1.0), 0.3, std::thread::hardware_concurrency());
    bool column_ok = true;
    for (std::size_t c = 0; c < s.l_axis.size(); ++c) {
      const double l = s.l_axis[c];
      for (std::size_t r = 1; r < s.l0_axis.size(); ++r) {
        if (s.is_singular(r, c) || s.is_singular(r - 1, c)) continue;
        if (s.l0_axis[r] <= l) {
          column_ok = column_ok && s.at(r, c) <= s.at(r - 1, c);
        } else if (s.l0_axis[r - 1] >= l) {
          column_ok = column_ok && s.at(r, c) == s.at(r - 1, c);
        }
      }
    }
    bool diagonal_ok = true;
    for (std::size_t i = 1; i < s.l_axis.size(); ++i) diagonal_ok = diagonal_ok && s.at(i, i) < s.at(i - 1, i - 1);
    return Outcome{column_ok && diagonal_ok,
                   fmtn("200x200 over l, l0 in [0.2, 2]: columns nonincreasing then constant: %s; diagonal decreasing: %s",
                        column_ok ? "yes" : "no", diagonal_ok ? "yes" : "no")};
  });

  report(11, "interpolation constraints", [] {
    double t_dev = 0.0, s_dev = 0.0;
    int with_zero = 0;
    for (const pt::StableCase& sc : pt::stable_cases()) {
      const DelayLoop loop = pt::frozen_loop(*sc.controller, sc.delay);
      const RhpPoleZero pq = rhp_pole_zero(pt::case_study(sc.controller->l0));
      const InterpolationReport r = interpolation_check(loop, pq.p, pq.q);
      t_dev = std::max(t_dev, r.T_deviation);
      if (!r.S_check_skipped) {
        ++with_zero;
        s_dev = std::max({s_dev, r.S_deviation, r.T_at_q_abs});
      }
    }
    return Outcome{t_dev <= 1e-9 && s_dev <= 1e-9 && with_zero > 0,
                   fmtn("%zu stable loops (%d with q): max |T(p)-1| %.3g, max |S(q)-1| %.3g (tol 1e-9)",
                        pt::stable_cases().size(), with_zero, t_dev, s_dev)};
  });

  report(12, "simulator", [] {
    // (a) open-loop growth exponent
    SimConfig open;
    open.params = pt::case_study(1.0);
    open.controller = RationalTF::constant(0.0);
    open.dt = 1e-3;
    open.duration = 6.0;
    open.initial_state = {0.0, 0.0, 1e-3, 0.0};
    const Trajectory to = simulate(open);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < to.size(); ++i) {
      if (to.t[i] < 2.0 || to.t[i] > 6.0) continue;
      const double y = std::log(std::abs(to.theta[i]));
      sx += to.t[i];
      sy += y;
      sxx += to.t[i] * to.t[i];
      sxy += to.t[i] * y;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double growth_err = std::abs(slope - kP) / kP;

    // (b) determinism, including concurrent runs
    SimConfig noisy;
    noisy.params = pt::case_study(1.0);
    noisy.controller = RationalTF(pt::controller_a().num, pt::controller_a().den);
    noisy.delay = 0.01;
    noisy.dt = 1e-3;
    noisy.duration = 5.0;
    noisy.sensor_noise_std = 1e-3;
    noisy.actuation_noise_std = 1e-2;
    noisy.seed = 42;
    const auto serialize = [](const Trajectory& t) {
      std::ostringstream os;
      write_trajectory_csv(os, t);
      return os.str();
    };
    const std::string ref = serialize(simulate(noisy));
    std::string par[2];
    std::thread th0([&] { par[0] = serialize(simulate(noisy)); });
    std::thread th1([&] { par[1] = serialize(simulate(noisy)); });
    th0.join();
    th1.join();
    const bool deterministic = ref == serialize(simulate(noisy)) && ref == par[0] && ref == par[1];

    // (c) RK4 convergence on a stabilized undelayed loop
    SimConfig smooth;
    smooth.params = pt::case_study(1.0);
    smooth.controller = RationalTF(pt::controller_b().num, pt::controller_b().den);
    smooth.duration = 2.0;
    smooth.initial_state = {0.0, 0.0, 1e-2, 0.0};
    std::vector<double> finals;
    for (double h : {4e-3, 2e-3, 1e-3}) {
      smooth.dt = h;
      finals.push_back(simulate(smooth).z.back());
    }
    const double order = std::log2(std::abs(finals[0] - finals[1]) / std::abs(finals[1] - finals[2]));

    // (d) PSD peak vs argmax |T|
    SimConfig psd_cfg = noisy;
    psd_cfg.actuation_noise_std = 0.0;
    psd_cfg.duration = 400.0;
    const Trajectory tp = simulate(psd_cfg);
    const Spectrum spec = psd(tp, TrajectoryColumn::Z, 1u << 14, 0.5);
    std::size_t kmax = 1;
    for (std::size_t k = 1; k < spec.power.size(); ++k) {
      if (spec.power[k] > spec.power[kmax]) kmax = k;
    }
    const DelayLoop loop = pt::frozen_loop(pt::controller_a(), 0.01);
    const bool stable = nyquist_stable(loop);
    const std::vector<double> grid = default_grid();
    const PeakLocation peak = refine_peak(complementary_response(loop, grid), axis_evaluator(loop));
    const double f_t = peak.omega / (2.0 * kPi);
    const double bin = spec.freqs[1];
    const bool psd_ok = stable && !tp.diverged && std::abs(spec.freqs[kmax] - f_t) <= bin;

    return Outcome{growth_err <= 0.02 && deterministic && order >= 3.5 && psd_ok,
                   fmtn("(a) slope %.4f vs p %.4f, rel err %.4f; (b) byte-identical: %s; (c) RK4 order %.2f; "
                        "(d) PSD peak %.4f Hz vs |T| peak %.4f Hz, bin %.4f Hz",
                        slope, kP, growth_err, deterministic ? "yes" : "no", order, spec.freqs[kmax], f_t, bin)};
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
