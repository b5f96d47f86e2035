#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "pendlim/errors.hpp"
#include "pendlim/robustness.hpp"

namespace pendlim {

namespace {

constexpr double kIndentRadius = 1e-4;
constexpr double kMaxPhaseStep = 0.1;
constexpr std::size_t kMaxSamples = 10'000'000;

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

// One piece of the Nyquist contour, parametrized by t.
struct Segment {
  std::vector<double> initial;  // sorted parameter values
  std::function<Complex(double)> point;
};

class WindingAccumulator {
 public:
  explicit WindingAccumulator(const DelayLoop& loop) : loop_(loop) {}

  double total() const { return total_; }
  std::size_t samples() const { return samples_; }

  void run(const Segment& seg) {
    if (seg.initial.size() < 2) return;
    double t0 = seg.initial.front();
    double a0 = phase(seg.point(t0));
    for (std::size_t i = 1; i < seg.initial.size(); ++i) {
      const double t1 = seg.initial[i];
      const double a1 = phase(seg.point(t1));
      refine(seg, t0, a0, t1, a1);
      t0 = t1;
      a0 = a1;
    }
  }

 private:
  double phase(Complex s) {
    if (++samples_ > kMaxSamples) {
      throw StabilityInconclusiveError("Nyquist sampling exceeded 1e7 points without settling the phase");
    }
    const Complex f = 1.0 + loop_gain(loop_, s);
    if (!std::isfinite(f.real()) || !std::isfinite(f.imag())) {
      throw StabilityInconclusiveError("1 + L is not finite on the Nyquist contour");
    }
    if (f == Complex{0.0, 0.0}) throw ClosedLoopImaginaryPoleError("omega", "1 + L vanishes on the contour");
    return std::arg(f);
  }

  void refine(const Segment& seg, double t0, double a0, double t1, double a1) {
    struct Interval {
      double t0, a0, t1, a1;
    };
    std::vector<Interval> stack{{t0, a0, t1, a1}};
    while (!stack.empty()) {
      Interval iv = stack.back();
      stack.pop_back();
      const double step = wrap_angle(iv.a1 - iv.a0);
      if (std::abs(step) <= kMaxPhaseStep) {
        total_ += step;
        continue;
      }
      const double tm = 0.5 * (iv.t0 + iv.t1);
      if (!(tm > iv.t0 && tm < iv.t1) ||
          iv.t1 - iv.t0 <= 1e-14 * std::max(1.0, std::abs(tm))) {
        throw StabilityInconclusiveError("1 + L passes through (or numerically near) zero on the contour");
      }
      const double am = phase(seg.point(tm));
      // Right half first so that the left half is processed next (in order).
      stack.push_back({tm, am, iv.t1, iv.a1});
      stack.push_back({iv.t0, iv.a0, tm, am});
    }
  }

  const DelayLoop& loop_;
  double total_ = 0.0;
  std::size_t samples_ = 0;
};

double max_root_modulus(const RationalTF& tf) {
  double r = 0.0;
  for (const Complex& z : tf.poles()) r = std::max(r, std::abs(z));
  for (const Complex& z : tf.zeros()) r = std::max(r, std::abs(z));
  return r;
}

// Initial samples on [lo, hi] along the axis: uniform at a step that keeps the
// delay phase increment small, merged with log spacing away from both ends.
std::vector<double> axis_samples(double lo, double hi, double delay) {
  std::vector<double> t;
  const double span = hi - lo;
  std::size_t n_uniform = 256;
  if (delay > 0.0) {
    n_uniform = std::max<std::size_t>(n_uniform, static_cast<std::size_t>(std::ceil(delay * span / 0.05)));
  }
  n_uniform = std::min<std::size_t>(n_uniform, 2'000'000);
  for (std::size_t i = 0; i <= n_uniform; ++i) {
    t.push_back(lo + span * static_cast<double>(i) / static_cast<double>(n_uniform));
  }
  // Geometric clustering toward each end, distance from kIndentRadius/10 to span.
  const double dmin = std::min(kIndentRadius * 0.1, span * 1e-3);
  const int per_decade = 50;
  const int decades = static_cast<int>(std::ceil(std::log10(span / dmin)));
  for (int k = 0; k <= decades * per_decade; ++k) {
    const double d = dmin * std::pow(10.0, static_cast<double>(k) / per_decade);
    if (d >= span) break;
    t.push_back(lo + d);
    t.push_back(hi - d);
  }
  t.push_back(lo);
  t.push_back(hi);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

std::vector<double> uniform(double lo, double hi, std::size_t n) {
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  return t;
}

}  // namespace

StabilityReport nyquist_analysis(const DelayLoop& loop) {
  loop.validate();
  const RationalTF& P = loop.plant;
  const RationalTF& C = loop.controller;
  if (P.num_degree() + C.num_degree() >= P.den_degree() + C.den_degree()) {
    throw DomainError("controller", "loop gain P C must be strictly proper for the Nyquist test");
  }

  StabilityReport report{false, 0, 0, 0};
  if (P.is_zero() || C.is_zero()) {
    // 1 + L == 1: no encirclements.
    for (const auto* tf : {&P, &C}) {
      for (const Complex& r : tf->poles()) {
        if (r.real() > 1e-9 * std::max(1.0, std::abs(r))) ++report.open_loop_rhp_poles;
      }
    }
    report.stable = report.open_loop_rhp_poles == 0;
    return report;
  }

  std::vector<double> axis_poles;
  for (const auto* tf : {&P, &C}) {
    for (const Complex& r : tf->poles()) {
      const double tol = 1e-9 * std::max(1.0, std::abs(r));
      if (std::abs(r.real()) <= tol) {
        axis_poles.push_back(r.imag());
      } else if (r.real() > 0.0) {
        ++report.open_loop_rhp_poles;
      }
    }
  }
  std::sort(axis_poles.begin(), axis_poles.end());
  {
    std::vector<double> merged;
    for (double w : axis_poles) {
      if (merged.empty() || w - merged.back() > 2.0 * kIndentRadius) merged.push_back(w);
    }
    axis_poles = std::move(merged);
  }

  // Radius beyond every root where |P C| has fallen well below 1.
  double W = 10.0 * (1.0 + std::max(max_root_modulus(P), max_root_modulus(C)));
  for (const double w : axis_poles) W = std::max(W, 2.0 * std::abs(w) + 1.0);
  const auto rational_mag = [&](double w) {
    const Complex s{0.0, w};
    return std::abs(eval_polynomial(P.num(), s) * eval_polynomial(C.num(), s) /
                    (eval_polynomial(P.den(), s) * eval_polynomial(C.den(), s)));
  };
  while (rational_mag(W) >= 0.05) {
    W *= 2.0;
    if (W > 1e12) throw StabilityInconclusiveError("loop gain does not roll off on the imaginary axis");
  }

  WindingAccumulator acc(loop);
  const auto on_axis = [](double w) { return Complex{0.0, w}; };
  double lo = -W;
  for (double wp : axis_poles) {
    const double hi = wp - kIndentRadius;
    if (hi > lo) acc.run({axis_samples(lo, hi, loop.delay), on_axis});
    // Right semicircle around j wp: s = j wp + eps e^{i phi}, phi from -pi/2 to pi/2.
    acc.run({uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0, 64), [wp](double phi) {
               return Complex{0.0, wp} + kIndentRadius * std::exp(Complex{0.0, phi});
             }});
    lo = wp + kIndentRadius;
  }
  acc.run({axis_samples(lo, W, loop.delay), on_axis});
  // Closing arc through the right half-plane, clockwise.
  acc.run({uniform(std::numbers::pi / 2.0, -std::numbers::pi / 2.0, 256),
           [W](double phi) { return W * std::exp(Complex{0.0, phi}); }});

  const double turns = acc.total() / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.05) {
    throw StabilityInconclusiveError("Nyquist contour winding is not an integer");
  }
  // The contour runs up the axis with the right half-plane on its right,
  // i.e. clockwise; counter-clockwise turns count negative encirclements.
  report.encirclements = -static_cast<int>(rounded);
  report.samples = acc.samples();
  report.stable = report.encirclements == -report.open_loop_rhp_poles;
  return report;
}

bool nyquist_stable(const DelayLoop& loop) { return nyquist_analysis(loop).stable; }

}  // namespace pendlim
