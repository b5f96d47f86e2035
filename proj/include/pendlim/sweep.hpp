#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pendlim/lti.hpp"
#include "pendlim/plant.hpp"

namespace pendlim {

enum class SweepVariable { StickLength, FixationPoint, MassRatio, Delay };

SweepVariable parse_sweep_variable(const std::string& name);
std::string to_string(SweepVariable v);

struct SweepRange {
  double lo;
  double hi;
  std::size_t count;

  void validate(const char* name) const;
  double at(std::size_t i) const;
};

/// One fragility curve. MassRatio varies m = x M with M fixed. StickLength
/// varies the effective length unless actual_length_axis is set, in which
/// case x is l' and l = 2/3 x.
struct SweepSpec {
  SweepVariable vary = SweepVariable::StickLength;
  SweepRange range{0.2, 2.0, 100};
  PendulumParams fixed{};
  double delay = 0.3;
  bool couple_l0_to_l = false;
  bool actual_length_axis = false;
  unsigned threads = 1;
};

struct FragilitySeries {
  std::vector<double> abscissa;
  std::vector<double> F;
  std::vector<double> skipped;  // abscissae dropped at the q = p singularity
};

/// Parameters the sweep feeds to fragility() at abscissa x.
PendulumParams sweep_point_params(const SweepSpec& spec, double x);
double sweep_point_delay(const SweepSpec& spec, double x);

/// Throws DomainError("range", ...) when every point is singular.
FragilitySeries fragility_curve(const SweepSpec& spec);

/// F over an (l, l0) grid. Rows follow l0, columns follow l.
struct FragilitySurface {
  std::vector<double> l_axis;
  std::vector<double> l0_axis;
  std::vector<double> F;             // row-major, l0_axis.size() x l_axis.size()
  std::vector<unsigned char> singular;

  double at(std::size_t row, std::size_t col) const { return F[row * l_axis.size() + col]; }
  bool is_singular(std::size_t row, std::size_t col) const { return singular[row * l_axis.size() + col] != 0; }
};

/// Cells within relative 1e-6 of l0 = l m/(M+m) are masked (F stored as NaN).
FragilitySurface fragility_heatmap(SweepRange l_range, SweepRange l0_range, const PendulumParams& params,
                                   double delay, unsigned threads = 1);

/// T(jw) of the upright plant under constant-gain feedback.
FrequencyResponse freq_response_sweep(const PendulumParams& params, double delay, double controller_gain,
                                      std::span<const double> grid);

/// "abscissa,F_nats"
void write_curve_csv(std::ostream& os, const FragilitySeries& series);
/// "l_m,l0_m,F_nats,singular" (long) or an l0-by-l matrix with an l header row.
void write_heatmap_csv(std::ostream& os, const FragilitySurface& surface, bool matrix_layout = false);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to index-addressed storage so output order stays deterministic.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace pendlim
