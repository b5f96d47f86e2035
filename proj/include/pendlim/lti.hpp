#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace pendlim {

using Complex = std::complex<double>;

/// Evaluates a real polynomial (descending powers) at s by Horner's rule.
Complex eval_polynomial(std::span<const double> coeffs, Complex s);

/// Roots of a real polynomial given in descending powers.
///
/// Trailing zero coefficients are peeled off as exact roots at the origin, so
/// s^k factors are never perturbed by the eigenvalue solver. The remaining
/// roots come from the companion matrix.
std::vector<Complex> polynomial_roots(std::span<const double> coeffs);

/// Real-coefficient rational function num(s)/den(s), coefficients in
/// descending powers of s. Leading zeros are trimmed on construction and the
/// denominator roots are cached for pole-proximity checks.
class RationalTF {
 public:
  RationalTF(std::vector<double> num, std::vector<double> den);

  static RationalTF constant(double k) { return RationalTF({k}, {1.0}); }

  const std::vector<double>& num() const noexcept { return num_; }
  const std::vector<double>& den() const noexcept { return den_; }
  const std::vector<Complex>& poles() const noexcept { return poles_; }
  std::vector<Complex> zeros() const;

  int num_degree() const noexcept { return static_cast<int>(num_.size()) - 1; }
  int den_degree() const noexcept { return static_cast<int>(den_.size()) - 1; }
  bool is_proper() const noexcept { return num_degree() <= den_degree(); }
  bool is_strictly_proper() const noexcept { return num_degree() < den_degree(); }
  bool is_zero() const noexcept { return num_.size() == 1 && num_[0] == 0.0; }

 private:
  std::vector<double> num_;
  std::vector<double> den_;
  std::vector<Complex> poles_;
};

/// num(s)/den(s). Throws PoleEvaluationError when s lies within 1e-12 of a
/// denominator root.
Complex eval_rational(const RationalTF& tf, Complex s);

/// Plant, controller and loop delay. The loop gain is L(s) = P(s) C(s) e^{-tau s}
/// with negative feedback.
struct DelayLoop {
  RationalTF plant;
  RationalTF controller;
  double delay = 0.0;

  void validate() const;
};

struct FrequencyResponse {
  std::vector<double> omegas;  // rad/s, strictly increasing
  std::vector<Complex> values;

  std::size_t size() const noexcept { return omegas.size(); }
};

struct LoopResponse {
  FrequencyResponse sensitivity;
  FrequencyResponse complementary;
};

/// Closed-loop functions at an arbitrary complex point.
///
/// With L = a/b, a = N_P N_C e^{-tau s} and b = D_P D_C, these are evaluated as
/// S = b/(a+b) and T = a/(a+b). This is the reciprocal form 1/(1 + 1/L) with the
/// plant denominator kept in the numerator, so T is finite (and equal to 1) at
/// open-loop poles. Throws ClosedLoopImaginaryPoleError if a + b vanishes.
Complex loop_gain(const DelayLoop& loop, Complex s);
Complex sensitivity_at(const DelayLoop& loop, Complex s);
Complex complementary_at(const DelayLoop& loop, Complex s);

LoopResponse loop_response(const DelayLoop& loop, std::span<const double> omegas);
FrequencyResponse complementary_response(const DelayLoop& loop, std::span<const double> omegas);

/// count points spaced logarithmically over [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);
/// 2000 points over [1e-2, 1e3] rad/s.
std::vector<double> default_grid();

struct FactorValues {
  Complex at_point;
  Complex ap_value;
  Complex mp_value;
};

/// T = T_mp T_ap with T_ap(s) = ((s-q)/(s+q)) e^{-tau s} (or e^{-tau s} without
/// an RHP zero). At s = p the interpolation T(p) = 1 gives T_mp(p) = T_ap(p)^{-1}.
FactorValues allpass_minphase_at(const DelayLoop& loop, double p, std::optional<double> q,
                                 Complex s);

Complex allpass_factor(std::optional<double> q, double delay, Complex s);

/// Largest sampled |value|. Throws DomainError on an empty response.
double hinf_estimate(const FrequencyResponse& resp);

/// Grid maximum refined by golden-section search on |eval(w)| inside the
/// bracketing grid interval. Never below the grid maximum.
double hinf_estimate(const FrequencyResponse& resp, const std::function<Complex(double)>& eval,
                     double omega_tol = 1e-9);

struct PeakLocation {
  double omega;
  double magnitude;
};
PeakLocation refine_peak(const FrequencyResponse& resp, const std::function<Complex(double)>& eval,
                         double omega_tol = 1e-9);

/// "omega_rad_s,re,im,mag,mag_db,phase_rad"
void write_csv(std::ostream& os, const FrequencyResponse& resp);

}  // namespace pendlim
