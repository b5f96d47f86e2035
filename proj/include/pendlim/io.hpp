#pragma once

#include "json.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pendlim/plant.hpp"
#include "pendlim/robustness.hpp"
#include "pendlim/sweep.hpp"
#include "pendlim/timesim.hpp"

namespace pendlim {

using Json = nlohmann::ordered_json;

/// Values read from a flat `key = value` parameter file. Actual-body keys
/// (human_mass, stick_mass, stick_length_actual) are converted to effective
/// values on read; effective keys (*_eff) are taken as they are.
struct ConfigValues {
  std::optional<double> cart_mass;
  std::optional<double> stick_mass;
  std::optional<double> stick_length;
  std::optional<double> fixation_point;
  std::optional<double> gravity;
  std::optional<double> delay;

  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<double> sensor_noise_std;
  std::optional<double> actuation_noise_std;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> controller_num;
  std::optional<std::vector<double>> controller_den;
  std::array<std::optional<double>, 4> initial_state;
};

/// Throws DomainError naming the key for unknown keys, malformed values,
/// duplicates, or a mix of actual and effective keys for the same quantity.
ConfigValues read_config(std::istream& is);

/// Effective-parameter keys plus simulation keys; read_config accepts it back.
void write_sim_config(std::ostream& os, const SimConfig& cfg);

struct Preset {
  PendulumParams params;
  double delay;
};

/// "case-study", "case-study-masses", "gym-bar".
Preset preset(const std::string& name);
std::vector<std::string> preset_names();

/// Decimal numbers rounded to 12 significant digits.
Json json_number(double v);

Json to_json(const FragilityResult& r);
Json to_json(const WaterbedReport& r);
Json to_json(const StabilityReport& r);
Json to_json(const InterpolationReport& r);
Json to_json(const PoleZeroSet& pz);

/// Comma separated decimal list, e.g. "1,0,-9.81".
std::vector<double> parse_number_list(const std::string& text, const std::string& parameter);

}  // namespace pendlim
