#include "pendlim/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pendlim/errors.hpp"
#include "pendlim/quadrature.hpp"

namespace pendlim {

std::string to_string(FragilityRegime regime) {
  return regime == FragilityRegime::RhpZero ? "RhpZero" : "NoRhpZero";
}

double singular_fixation_point(const PendulumParams& params) {
  return params.stick_length * params.stick_mass / (params.cart_mass + params.stick_mass);
}

FragilityResult fragility(const PendulumParams& params, double delay) {
  if (!(delay >= 0.0) || !std::isfinite(delay)) throw DomainError("tau", "delay must be finite and >= 0");
  const RhpPoleZero pz = rhp_pole_zero(params);
  FragilityResult out{delay * pz.p, pz.p, pz.q, FragilityRegime::NoRhpZero};
  if (!pz.q) return out;
  const double q = *pz.q;
  if (std::abs(q - pz.p) <= 1e-12 * pz.p) {
    throw FragilitySingularityError("l0", "RHP zero q equals RHP pole p (l0 = l m/(M+m)); F is unbounded");
  }
  out.regime = FragilityRegime::RhpZero;
  out.F += std::log(pz.p + q) - std::log(std::abs(pz.p - q));
  return out;
}

void PoissonKernel::validate() const {
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw DomainError("sigma0", "must be finite and > 0");
  if (!std::isfinite(omega0)) throw DomainError("omega0", "must be finite");
}

double poisson_weight(const PoissonKernel& kernel, double omega) {
  kernel.validate();
  const double d = omega - kernel.omega0;
  return kernel.sigma0 / (std::numbers::pi * (kernel.sigma0 * kernel.sigma0 + d * d));
}

double bode_integral(const AxisEvaluator& t_eval, const PoissonKernel& kernel, const QuadratureConfig& quad) {
  kernel.validate();
  const GaussLegendreRule rule = gauss_legendre(quad.order);
  constexpr double half_pi = std::numbers::pi / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = rule.nodes[i];
    const double u2 = u * u;
    const double grade = (15.0 * u - 10.0 * u * u2 + 3.0 * u * u2 * u2) / 8.0;
    const double dgrade = 15.0 / 8.0 * (1.0 - u2) * (1.0 - u2);
    if (dgrade == 0.0) continue;
    const double omega = kernel.omega0 + kernel.sigma0 * std::tan(half_pi * grade);
    const Complex t = t_eval(omega);
    const double mag = std::abs(t);
    if (!std::isfinite(mag)) throw IntegrandSingularError("T", "non-finite T(jw) at w = " + std::to_string(omega));
    if (mag < 1e-300) throw IntegrandSingularError("T", "|T(jw)| vanishes at w = " + std::to_string(omega));
    sum += rule.weights[i] * dgrade * std::log(mag);
  }
  // (1/pi) * (pi/2) * sum
  return 0.5 * sum;
}

WaterbedConstants waterbed_constants(double p, double omega1, double omega2) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("p", "RHP pole must be finite and > 0");
  if (!(omega1 > 0.0) || !(omega2 > omega1)) throw DomainError("band", "need 0 < w1 < w2");
  const double c1 = 2.0 / std::numbers::pi * (std::atan(omega2 / p) - std::atan(omega1 / p));
  return {c1, 1.0 - c1};
}

WaterbedReport waterbed_check(const AxisEvaluator& t_eval, double p, FrequencyBand band, double F,
                              std::span<const double> full_grid) {
  const WaterbedConstants c = waterbed_constants(p, band.lo, band.hi);
  if (!std::isfinite(band.hi)) throw DomainError("band", "upper band edge must be finite");

  FrequencyResponse in_band;
  in_band.omegas = log_grid(band.lo, band.hi, 512);
  for (double w : in_band.omegas) in_band.values.push_back(t_eval(w));
  const double M1 = hinf_estimate(in_band, t_eval);

  FrequencyResponse full;
  full.omegas.assign(full_grid.begin(), full_grid.end());
  for (double w : full.omegas) full.values.push_back(t_eval(w));
  const double M2 = std::max(hinf_estimate(full, t_eval), M1);

  WaterbedReport r{};
  r.band = band;
  r.c1 = c.c1;
  r.c2 = c.c2;
  r.M1 = M1;
  r.M2 = M2;
  r.F = F;
  r.lhs = c.c1 * std::log(M1) + c.c2 * std::log(M2);
  r.holds = r.lhs >= F - 1e-9;
  r.inconclusive_tight = !r.holds && r.lhs >= F - 1e-3;
  return r;
}

WaterbedReport waterbed_check(const AxisEvaluator& t_eval, double p, FrequencyBand band, double F) {
  const std::vector<double> grid = default_grid();
  return waterbed_check(t_eval, p, band, F, grid);
}

InterpolationReport interpolation_check(const DelayLoop& loop, double p, std::optional<double> q) {
  if (!(p > 0.0)) throw DomainError("p", "RHP pole must be > 0");
  if (!nyquist_stable(loop)) {
    throw InterpolationNotApplicableError("loop", "closed loop is not stable; S(q) = 1, T(p) = 1 need not hold");
  }
  InterpolationReport r{};
  r.T_at_p = complementary_at(loop, Complex{p, 0.0});
  r.T_deviation = std::abs(r.T_at_p - 1.0);
  r.S_check_skipped = !q.has_value();
  if (q) {
    const Complex s{*q, 0.0};
    r.S_at_q = sensitivity_at(loop, s);
    r.S_deviation = std::abs(r.S_at_q - 1.0);
    r.T_at_q_abs = std::abs(complementary_at(loop, s));
  }
  return r;
}

ConstructedT::ConstructedT(double p, std::optional<double> q, double delay, double corner, int order)
    : p_(p), q_(q), delay_(delay), corner_(corner), order_(order) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("p", "must be finite and > 0");
  if (q && (!(*q > 0.0) || !std::isfinite(*q))) throw DomainError("q", "must be finite and > 0");
  if (!(delay >= 0.0) || !std::isfinite(delay)) throw DomainError("tau", "must be finite and >= 0");
  if (!(corner > 0.0) || !std::isfinite(corner)) throw DomainError("a", "rolloff corner must be > 0");
  if (order < 1) throw DomainError("n", "rolloff order must be >= 1");
  if (q && std::abs(*q - p) <= 1e-12 * p) throw FragilitySingularityError("q", "q = p makes T_mp(p) unbounded");
  const double ap_at_p = allpass_factor(q, delay, Complex{p, 0.0}).real();
  gain_ = std::pow(p / corner + 1.0, order) / ap_at_p;
  log_mp_at_pole_ = delay * p + (q ? std::log(p + *q) - std::log(std::abs(p - *q)) : 0.0);
}

Complex ConstructedT::operator()(Complex s) const {
  return gain_ * std::pow(s / corner_ + 1.0, -order_) * allpass_factor(q_, delay_, s);
}

AxisEvaluator axis_evaluator(const DelayLoop& loop) {
  return [loop](double w) { return complementary_at(loop, Complex{0.0, w}); };
}

AxisEvaluator axis_evaluator(const ConstructedT& t) {
  return [t](double w) { return t.on_axis(w); };
}

}  // namespace pendlim
