#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include "pendlim/lti.hpp"
#include "pendlim/plant.hpp"

namespace pendlim::testing {

inline PendulumParams case_study(double l0 = 1.0) { return {3.25, 0.1, 1.0, l0, 9.81}; }

// Seventh-order pole-placement controllers (Bessel patterns) designed at tau = 0
// for the upright case-study plant. Descending powers of s.
struct FrozenController {
  const char* name;
  double l0;
  std::vector<double> num;
  std::vector<double> den;
};

inline const FrozenController& controller_a() {
  static const FrozenController c{"A", 1.0,
                                  {-10295.211457925559, -50233.202184311609, -83577.368139109079, -92741.284403669793},
                                  {1.0, 31.070085372640776, 475.54855216645677, 4618.0920516596952}};
  return c;
}

inline const FrozenController& controller_b() {
  static const FrozenController c{"B", 1.0,
                                  {-2445.7962608599237, -9551.4849616781339, -7337.3821137215082, -5427.9306829765565},
                                  {1.0, 20.713390248427231, 216.97260438167288, 1484.6850239269509}};
  return c;
}

// Designed for l0 = 0.8, so the plant carries the RHP zero q.
inline const FrozenController& controller_c() {
  static const FrozenController c{"C", 0.8,
                                  {-3269.3817280573335, -12171.308119172725, -7337.3821137215082, -5427.9306829765565},
                                  {1.0, 20.713390248427256, 418.16532610827801, 2233.6886004914263}};
  return c;
}

inline DelayLoop frozen_loop(const FrozenController& c, double delay) {
  return {plant_tf(case_study(c.l0), Orientation::Upright), RationalTF(c.num, c.den), delay};
}

struct StableCase {
  const FrozenController* controller;
  double delay;
};

// Loops known stable from an independent Pade / eigenvalue check.
inline std::vector<StableCase> stable_cases() {
  return {{&controller_a(), 0.01}, {&controller_b(), 0.01}, {&controller_b(), 0.02}, {&controller_c(), 0.01}};
}

inline std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

inline std::vector<double> poly_add(std::vector<double> a, std::vector<double> b) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t off = a.size() - b.size();
  for (std::size_t i = 0; i < b.size(); ++i) a[off + i] += b[i];
  return a;
}

// Routh-Hurwitz on a real polynomial (descending powers). True iff every root
// lies strictly in the open left half plane. Any zero in the first column
// counts as not Hurwitz.
inline bool routh_hurwitz(std::vector<double> c) {
  while (c.size() > 1 && c.front() == 0.0) c.erase(c.begin());
  if (c.front() < 0.0) {
    for (double& v : c) v = -v;
  }
  const std::size_t n = c.size() - 1;
  if (n == 0) return true;
  for (double v : c) {
    if (!(v > 0.0)) return false;
  }
  std::vector<double> r0, r1;
  for (std::size_t i = 0; i <= n; i += 2) r0.push_back(c[i]);
  for (std::size_t i = 1; i <= n; i += 2) r1.push_back(c[i]);
  if (r1.empty() || !(r1[0] > 0.0)) return false;
  for (std::size_t rows = 2; rows < n + 1; ++rows) {
    std::vector<double> next(r0.size() - 1, 0.0);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double b = i + 1 < r1.size() ? r1[i + 1] : 0.0;
      next[i] = (r1[0] * r0[i + 1] - r0[0] * b) / r1[0];
    }
    if (next.empty() || !(next[0] > 1e-12 * std::abs(r1[0]))) return false;
    r0 = std::move(r1);
    r1 = std::move(next);
  }
  return true;
}

// Characteristic polynomial D_P D_C + N_P N_C of the undelayed loop.
inline std::vector<double> characteristic(const RationalTF& plant, const RationalTF& controller) {
  return poly_add(poly_mul(plant.den(), controller.den()), poly_mul(plant.num(), controller.num()));
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20240611);
  return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

}  // namespace pendlim::testing
