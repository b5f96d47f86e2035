#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "pendlim/errors.hpp"
#include "pendlim/timesim.hpp"

namespace pendlim {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace

Spectrum welch_psd(std::span<const double> samples, double sample_rate_hz, std::size_t segment_len, double overlap) {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) throw DomainError("sample_rate", "must be > 0");
  if (!(overlap >= 0.0 && overlap <= 0.9)) throw DomainError("overlap", "must lie in [0, 0.9]");
  if (segment_len < 2) throw DomainError("segment_len", "must be >= 2");
  if (segment_len > samples.size()) throw DomainError("segment_len", "longer than the trajectory");

  const std::size_t L = segment_len;
  const auto shared = static_cast<std::size_t>(std::floor(overlap * static_cast<double>(L)));
  const std::size_t hop = std::max<std::size_t>(1, L - shared);
  const std::size_t nfreq = L / 2 + 1;

  std::vector<double> window(L);
  double window_power = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(L));
    window_power += window[i] * window[i];
  }

  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * L)));
  std::unique_ptr<fftw_complex, FftwFree> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nfreq)));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(L), in.get(), out.get(), FFTW_ESTIMATE);
  }

  std::vector<double> acc(nfreq, 0.0);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + L <= samples.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < L; ++i) mean += samples[start + i];
    mean /= static_cast<double>(L);
    for (std::size_t i = 0; i < L; ++i) in.get()[i] = (samples[start + i] - mean) * window[i];
    fftw_execute(plan);
    for (std::size_t k = 0; k < nfreq; ++k) {
      const double re = out.get()[k][0];
      const double im = out.get()[k][1];
      acc[k] += re * re + im * im;
    }
    ++segments;
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum spec;
  spec.freqs.resize(nfreq);
  spec.power.resize(nfreq);
  const double scale = 1.0 / (sample_rate_hz * window_power * static_cast<double>(segments));
  for (std::size_t k = 0; k < nfreq; ++k) {
    spec.freqs[k] = static_cast<double>(k) * sample_rate_hz / static_cast<double>(L);
    const bool edge = k == 0 || (L % 2 == 0 && k == L / 2);
    spec.power[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
  }
  return spec;
}

}  // namespace pendlim
