#include "pendlim/sweep.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "pendlim/errors.hpp"
#include "pendlim/format.hpp"
#include "pendlim/robustness.hpp"

namespace pendlim {

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "length" || name == "stick-length") return SweepVariable::StickLength;
  if (name == "fixation" || name == "fixation-point") return SweepVariable::FixationPoint;
  if (name == "mass-ratio") return SweepVariable::MassRatio;
  if (name == "delay") return SweepVariable::Delay;
  throw DomainError("vary", "unknown sweep variable '" + name + "'");
}

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::StickLength: return "length";
    case SweepVariable::FixationPoint: return "fixation";
    case SweepVariable::MassRatio: return "mass-ratio";
    case SweepVariable::Delay: return "delay";
  }
  return "?";
}

void SweepRange::validate(const char* name) const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) throw DomainError(name, "need finite lo < hi");
  if (count < 2) throw DomainError(name, "need count >= 2");
}

double SweepRange::at(std::size_t i) const {
  if (i + 1 == count) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

PendulumParams sweep_point_params(const SweepSpec& spec, double x) {
  PendulumParams p = spec.fixed;
  switch (spec.vary) {
    case SweepVariable::StickLength:
      p.stick_length = spec.actual_length_axis ? (2.0 / 3.0) * x : x;
      if (spec.couple_l0_to_l) p.fixation_point = p.stick_length;
      break;
    case SweepVariable::FixationPoint:
      p.fixation_point = x;
      break;
    case SweepVariable::MassRatio:
      p.stick_mass = x * p.cart_mass;
      if (spec.couple_l0_to_l) p.fixation_point = p.stick_length;
      break;
    case SweepVariable::Delay:
      if (spec.couple_l0_to_l) p.fixation_point = p.stick_length;
      break;
  }
  return p;
}

double sweep_point_delay(const SweepSpec& spec, double x) {
  return spec.vary == SweepVariable::Delay ? x : spec.delay;
}

namespace {

bool near_singular(const PendulumParams& p, double rel) {
  if (p.fixation_point >= p.stick_length) return false;
  return std::abs(p.fixation_point - singular_fixation_point(p)) <= rel * p.stick_length;
}

}  // namespace

FragilitySeries fragility_curve(const SweepSpec& spec) {
  spec.range.validate("range");
  spec.fixed.validate();
  std::vector<double> values(spec.range.count, std::numeric_limits<double>::quiet_NaN());
  std::vector<unsigned char> singular(spec.range.count, 0);
  parallel_for(spec.range.count, spec.threads, [&](std::size_t i) {
    const double x = spec.range.at(i);
    const PendulumParams p = sweep_point_params(spec, x);
    if (near_singular(p, 1e-9)) {
      singular[i] = 1;
      return;
    }
    try {
      values[i] = fragility(p, sweep_point_delay(spec, x)).F;
    } catch (const FragilitySingularityError&) {
      singular[i] = 1;
    }
  });

  FragilitySeries out;
  for (std::size_t i = 0; i < spec.range.count; ++i) {
    const double x = spec.range.at(i);
    if (singular[i]) {
      out.skipped.push_back(x);
    } else {
      out.abscissa.push_back(x);
      out.F.push_back(values[i]);
    }
  }
  if (out.abscissa.empty()) throw DomainError("range", "every sweep point is at the q = p singularity");
  return out;
}

FragilitySurface fragility_heatmap(SweepRange l_range, SweepRange l0_range, const PendulumParams& params,
                                   double delay, unsigned threads) {
  l_range.validate("l_range");
  l0_range.validate("l0_range");
  FragilitySurface s;
  for (std::size_t i = 0; i < l_range.count; ++i) s.l_axis.push_back(l_range.at(i));
  for (std::size_t i = 0; i < l0_range.count; ++i) s.l0_axis.push_back(l0_range.at(i));
  const std::size_t cols = s.l_axis.size();
  s.F.assign(s.l0_axis.size() * cols, std::numeric_limits<double>::quiet_NaN());
  s.singular.assign(s.F.size(), 0);

  parallel_for(s.F.size(), threads, [&](std::size_t k) {
    PendulumParams p = params;
    p.stick_length = s.l_axis[k % cols];
    p.fixation_point = s.l0_axis[k / cols];
    if (near_singular(p, 1e-6)) {
      s.singular[k] = 1;
      return;
    }
    try {
      s.F[k] = fragility(p, delay).F;
    } catch (const FragilitySingularityError&) {
      s.singular[k] = 1;
    }
  });
  return s;
}

FrequencyResponse freq_response_sweep(const PendulumParams& params, double delay, double controller_gain,
                                      std::span<const double> grid) {
  const DelayLoop loop{plant_tf(params, Orientation::Upright), RationalTF::constant(controller_gain), delay};
  return complementary_response(loop, grid);
}

void write_curve_csv(std::ostream& os, const FragilitySeries& series) {
  os << "abscissa,F_nats\n";
  for (std::size_t i = 0; i < series.abscissa.size(); ++i) {
    os << format_number(series.abscissa[i]) << ',' << format_number(series.F[i]) << '\n';
  }
}

void write_heatmap_csv(std::ostream& os, const FragilitySurface& s, bool matrix_layout) {
  const std::size_t cols = s.l_axis.size();
  if (matrix_layout) {
    os << "l0_m\\l_m";
    for (double l : s.l_axis) os << ',' << format_number(l);
    os << '\n';
    for (std::size_t r = 0; r < s.l0_axis.size(); ++r) {
      os << format_number(s.l0_axis[r]);
      for (std::size_t c = 0; c < cols; ++c) {
        os << ',';
        if (!s.is_singular(r, c)) os << format_number(s.at(r, c));
      }
      os << '\n';
    }
    return;
  }
  os << "l_m,l0_m,F_nats,singular\n";
  for (std::size_t r = 0; r < s.l0_axis.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      os << format_number(s.l_axis[c]) << ',' << format_number(s.l0_axis[r]) << ',';
      if (!s.is_singular(r, c)) os << format_number(s.at(r, c));
      os << ',' << (s.is_singular(r, c) ? 1 : 0) << '\n';
    }
  }
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace pendlim
