#include "pendlim/lti.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pendlim/errors.hpp"
#include "pendlim/format.hpp"

namespace pendlim {

namespace {

std::vector<double> trim_leading_zeros(std::vector<double> c) {
  auto first = std::find_if(c.begin(), c.end(), [](double v) { return v != 0.0; });
  if (first == c.end()) return {0.0};
  c.erase(c.begin(), first);
  return c;
}

bool all_finite(const std::vector<double>& c) {
  return std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

Complex eval_polynomial(std::span<const double> coeffs, Complex s) {
  Complex acc{0.0, 0.0};
  for (double c : coeffs) acc = acc * s + c;
  return acc;
}

std::vector<Complex> polynomial_roots(std::span<const double> coeffs) {
  std::vector<double> c = trim_leading_zeros({coeffs.begin(), coeffs.end()});
  std::vector<Complex> roots;
  if (c.size() <= 1) return roots;
  while (c.size() > 1 && c.back() == 0.0) {
    roots.emplace_back(0.0, 0.0);
    c.pop_back();
  }
  const auto n = static_cast<Eigen::Index>(c.size()) - 1;
  if (n == 0) return roots;
  if (n == 1) {
    roots.emplace_back(-c[1] / c[0], 0.0);
    return roots;
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -c[static_cast<std::size_t>(j) + 1] / c[0];
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const auto& ev = solver.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) roots.push_back(ev[i]);
  return roots;
}

RationalTF::RationalTF(std::vector<double> num, std::vector<double> den)
    : num_(trim_leading_zeros(std::move(num))), den_(trim_leading_zeros(std::move(den))) {
  if (!all_finite(num_)) throw DomainError("num", "coefficients must be finite");
  if (!all_finite(den_)) throw DomainError("den", "coefficients must be finite");
  if (den_.size() == 1 && den_[0] == 0.0) {
    throw DomainError("den", "denominator is identically zero");
  }
  poles_ = polynomial_roots(den_);
}

std::vector<Complex> RationalTF::zeros() const {
  if (is_zero()) return {};
  return polynomial_roots(num_);
}

Complex eval_rational(const RationalTF& tf, Complex s) {
  for (const Complex& r : tf.poles()) {
    if (std::abs(s - r) <= 1e-12 * std::max(1.0, std::abs(r))) {
      throw PoleEvaluationError(r, "evaluation at a pole of the rational function");
    }
  }
  return eval_polynomial(tf.num(), s) / eval_polynomial(tf.den(), s);
}

void DelayLoop::validate() const {
  if (!(delay >= 0.0) || !std::isfinite(delay)) throw DomainError("delay", "must be finite and >= 0");
}

namespace {

struct LoopParts {
  Complex a;  // N_P N_C e^{-tau s}
  Complex b;  // D_P D_C
};

LoopParts loop_parts(const DelayLoop& loop, Complex s) {
  const Complex a = eval_polynomial(loop.plant.num(), s) * eval_polynomial(loop.controller.num(), s) *
                    std::exp(-loop.delay * s);
  const Complex b = eval_polynomial(loop.plant.den(), s) * eval_polynomial(loop.controller.den(), s);
  return {a, b};
}

Complex closed_loop_denominator(const LoopParts& parts, Complex s) {
  const Complex d = parts.a + parts.b;
  const double scale = std::abs(parts.a) + std::abs(parts.b);
  if (scale == 0.0 || std::abs(d) <= 1e-12 * scale) {
    throw ClosedLoopImaginaryPoleError(
        "omega", "1 + L vanishes at s = (" + format_number(s.real()) + ", " + format_number(s.imag()) + ")");
  }
  return d;
}

}  // namespace

Complex loop_gain(const DelayLoop& loop, Complex s) {
  const LoopParts parts = loop_parts(loop, s);
  if (parts.b == Complex{0.0, 0.0}) throw PoleEvaluationError(s, "loop gain evaluated at an open-loop pole");
  return parts.a / parts.b;
}

Complex sensitivity_at(const DelayLoop& loop, Complex s) {
  const LoopParts parts = loop_parts(loop, s);
  return parts.b / closed_loop_denominator(parts, s);
}

Complex complementary_at(const DelayLoop& loop, Complex s) {
  const LoopParts parts = loop_parts(loop, s);
  return parts.a / closed_loop_denominator(parts, s);
}

namespace {

void check_grid(std::span<const double> omegas) {
  if (omegas.empty()) throw DomainError("omegas", "frequency grid is empty");
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (!std::isfinite(omegas[i])) throw DomainError("omegas", "non-finite frequency");
    if (i > 0 && !(omegas[i] > omegas[i - 1])) throw DomainError("omegas", "grid must be strictly increasing");
  }
}

}  // namespace

LoopResponse loop_response(const DelayLoop& loop, std::span<const double> omegas) {
  loop.validate();
  check_grid(omegas);
  LoopResponse out;
  out.sensitivity.omegas.assign(omegas.begin(), omegas.end());
  out.complementary.omegas.assign(omegas.begin(), omegas.end());
  out.sensitivity.values.reserve(omegas.size());
  out.complementary.values.reserve(omegas.size());
  for (double w : omegas) {
    const Complex s{0.0, w};
    const LoopParts parts = loop_parts(loop, s);
    const Complex d = closed_loop_denominator(parts, s);
    out.sensitivity.values.push_back(parts.b / d);
    out.complementary.values.push_back(parts.a / d);
  }
  return out;
}

FrequencyResponse complementary_response(const DelayLoop& loop, std::span<const double> omegas) {
  return loop_response(loop, omegas).complementary;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("grid", "need 0 < lo < hi");
  if (count < 2) throw DomainError("grid", "need at least two points");
  std::vector<double> g(count);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_grid() { return log_grid(1e-2, 1e3, 2000); }

Complex allpass_factor(std::optional<double> q, double delay, Complex s) {
  Complex ap = std::exp(-delay * s);
  if (q) ap *= (s - *q) / (s + *q);
  return ap;
}

FactorValues allpass_minphase_at(const DelayLoop& loop, double p, std::optional<double> q, Complex s) {
  loop.validate();
  if (!(p > 0.0)) throw DomainError("p", "RHP pole must be > 0");
  if (q && !(*q > 0.0)) throw DomainError("q", "RHP zero must be > 0");
  if (s.real() < 0.0) throw DomainError("s", "evaluation point must satisfy Re(s) >= 0");
  const bool at_pole = s == Complex{p, 0.0};
  if (at_pole && q && std::abs(*q - p) <= 1e-12 * p) {
    throw FragilitySingularityError("q", "RHP zero coincides with RHP pole (q = p)");
  }
  const Complex ap = allpass_factor(q, loop.delay, s);
  if (at_pole) return {s, ap, 1.0 / ap};
  if (ap == Complex{0.0, 0.0}) throw DomainError("s", "all-pass factor vanishes at the RHP zero");
  return {s, ap, complementary_at(loop, s) / ap};
}

double hinf_estimate(const FrequencyResponse& resp) {
  if (resp.values.empty()) throw DomainError("response", "empty frequency response");
  double best = 0.0;
  for (const Complex& v : resp.values) best = std::max(best, std::abs(v));
  return best;
}

PeakLocation refine_peak(const FrequencyResponse& resp, const std::function<Complex(double)>& eval,
                         double omega_tol) {
  if (resp.values.empty()) throw DomainError("response", "empty frequency response");
  std::size_t imax = 0;
  for (std::size_t i = 1; i < resp.values.size(); ++i) {
    if (std::abs(resp.values[i]) > std::abs(resp.values[imax])) imax = i;
  }
  PeakLocation best{resp.omegas[imax], std::abs(resp.values[imax])};
  if (resp.size() < 2) return best;

  double lo = resp.omegas[imax > 0 ? imax - 1 : 0];
  double hi = resp.omegas[std::min(imax + 1, resp.size() - 1)];
  const auto f = [&](double w) { return std::abs(eval(w)); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > omega_tol * std::max(1.0, std::abs(best.omega))) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  if (f1 > best.magnitude) best = {x1, f1};
  if (f2 > best.magnitude) best = {x2, f2};
  return best;
}

double hinf_estimate(const FrequencyResponse& resp, const std::function<Complex(double)>& eval,
                     double omega_tol) {
  return refine_peak(resp, eval, omega_tol).magnitude;
}

void write_csv(std::ostream& os, const FrequencyResponse& resp) {
  os << "omega_rad_s,re,im,mag,mag_db,phase_rad\n";
  for (std::size_t i = 0; i < resp.size(); ++i) {
    const Complex v = resp.values[i];
    const double mag = std::abs(v);
    os << format_number(resp.omegas[i]) << ',' << format_number(v.real()) << ','
       << format_number(v.imag()) << ',' << format_number(mag) << ','
       << format_number(20.0 * std::log10(mag)) << ',' << format_number(std::arg(v)) << '\n';
  }
}

}  // namespace pendlim
