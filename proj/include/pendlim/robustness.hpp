#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "pendlim/lti.hpp"
#include "pendlim/plant.hpp"

namespace pendlim {

enum class FragilityRegime { NoRhpZero, RhpZero };

std::string to_string(FragilityRegime regime);

/// Lower bound on ln ||T||_inf (nats) for the upright loop with delay.
struct FragilityResult {
  double F;
  double p;
  std::optional<double> q;
  FragilityRegime regime;
};

/// F = tau p when l0 >= l, tau p + ln|(p+q)/(p-q)| when l0 < l.
/// Throws FragilitySingularityError when q = p within 1e-12 relative.
FragilityResult fragility(const PendulumParams& params, double delay);

/// l0 at which the RHP zero meets the RHP pole: l m / (M + m).
double singular_fixation_point(const PendulumParams& params);

struct PoissonKernel {
  double sigma0;
  double omega0 = 0.0;

  void validate() const;
};

/// (1/pi) sigma0 / (sigma0^2 + (w - omega0)^2)
double poisson_weight(const PoissonKernel& kernel, double omega);

struct QuadratureConfig {
  int order = 512;
};

using AxisEvaluator = std::function<Complex(double)>;

/// Poisson-weighted integral (1/pi) int ln|T(jw)| sigma0/(sigma0^2+(w-omega0)^2) dw.
///
/// w = omega0 + sigma0 tan(phi) turns the kernel measure into dphi/pi. The
/// phi interval is then graded by phi = (pi/2) g(u), g' ~ (1-u^2)^2, so the
/// logarithmic endpoint behaviour of ln|T| for a rolling-off T is integrated
/// by Gauss-Legendre at full order.
double bode_integral(const AxisEvaluator& t_eval, const PoissonKernel& kernel,
                     const QuadratureConfig& quad = {});

struct WaterbedConstants {
  double c1;
  double c2;
};

/// Kernel mass of [-w2,-w1] U [w1,w2] for a real pole p (c1) and of the
/// complement (c2), in closed form.
WaterbedConstants waterbed_constants(double p, double omega1, double omega2);

struct FrequencyBand {
  double lo;
  double hi;
};

struct WaterbedReport {
  FrequencyBand band;
  double c1;
  double c2;
  double M1;
  double M2;
  double F;
  double lhs;
  bool holds;
  bool inconclusive_tight;  // lhs in [F - 1e-3, F - 1e-9)
};

/// c1 ln M1 + c2 ln M2 >= F with M1 = max over the band, M2 = peak over
/// full_grid (both grid maxima refined by golden-section search).
WaterbedReport waterbed_check(const AxisEvaluator& t_eval, double p, FrequencyBand band, double F,
                              std::span<const double> full_grid);
WaterbedReport waterbed_check(const AxisEvaluator& t_eval, double p, FrequencyBand band, double F);

struct StabilityReport {
  bool stable;
  int encirclements;        // clockwise encirclements of 0 by 1 + L
  int open_loop_rhp_poles;  // poles of P C strictly inside the indented contour
  std::size_t samples;
};

/// Nyquist test on 1 + L along the imaginary axis, indented to the right by
/// radius 1e-4 around every open-loop pole on the axis (so those poles count
/// as stable), closed by a right half-circle beyond the loop's crossover.
/// Stable iff clockwise encirclements == -(open-loop RHP poles). Requires a
/// strictly proper P C. Throws StabilityInconclusiveError when adaptive
/// sampling exceeds 1e7 points or the winding is not near an integer.
StabilityReport nyquist_analysis(const DelayLoop& loop);
bool nyquist_stable(const DelayLoop& loop);

struct InterpolationReport {
  Complex T_at_p;
  double T_deviation;  // |T(p) - 1|
  bool S_check_skipped;
  Complex S_at_q;
  double S_deviation;  // |S(q) - 1|
  double T_at_q_abs;
};

/// S(q) = 1 and T(p) = 1. Throws InterpolationNotApplicableError when the
/// loop is not Nyquist-stable.
InterpolationReport interpolation_check(const DelayLoop& loop, double p, std::optional<double> q);

/// T(s) = K (s/a + 1)^{-n} T_ap(s) with K = (p/a + 1)^n / T_ap(p), so T(p) = 1
/// and ln|T_mp(p)| is known exactly. Oracle for the integral theorems.
class ConstructedT {
 public:
  ConstructedT(double p, std::optional<double> q, double delay, double corner, int order);

  Complex operator()(Complex s) const;
  Complex on_axis(double omega) const { return (*this)(Complex{0.0, omega}); }

  double gain() const noexcept { return gain_; }
  double p() const noexcept { return p_; }
  std::optional<double> q() const noexcept { return q_; }
  double delay() const noexcept { return delay_; }
  double corner() const noexcept { return corner_; }
  int order() const noexcept { return order_; }
  /// ln|T_mp(p)| = ln|T_ap(p)|^{-1}
  double log_mp_at_pole() const noexcept { return log_mp_at_pole_; }

 private:
  double p_;
  std::optional<double> q_;
  double delay_;
  double corner_;
  int order_;
  double gain_;
  double log_mp_at_pole_;
};

AxisEvaluator axis_evaluator(const DelayLoop& loop);
AxisEvaluator axis_evaluator(const ConstructedT& t);

}  // namespace pendlim
