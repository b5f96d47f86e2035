#include "pendlim/io.hpp"

#include <cmath>
#include <cerrno>
#include <cstdlib>
#include <map>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "pendlim/errors.hpp"
#include "pendlim/format.hpp"

namespace pendlim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw DomainError(key, "expected a finite number, got '" + t + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE) {
    throw DomainError(key, "expected an unsigned 64-bit integer, got '" + t + "'");
  }
  return v;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text, const std::string& parameter) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, parameter));
  if (out.empty()) throw DomainError(parameter, "empty coefficient list");
  return out;
}

ConfigValues read_config(std::istream& is) {
  static const std::set<std::string> known = {
      "human_mass",      "stick_mass",     "stick_length_actual", "fixation_point",   "gravity",
      "delay",           "cart_mass_eff",  "stick_mass_eff",      "stick_length_eff", "dt",
      "duration",        "sensor_noise_std", "actuation_noise_std", "seed",           "controller_num",
      "controller_den",  "initial_x",      "initial_xdot",        "initial_theta",    "initial_thetadot"};

  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known.count(key)) throw DomainError(key, "unknown configuration key");
    if (!entries.emplace(key, value).second) throw DomainError(key, "duplicate configuration key");
  }

  ConfigValues cfg;
  const auto get = [&](const std::string& key) -> std::optional<double> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    return parse_double(it->second, key);
  };

  const bool any_actual = entries.count("human_mass") || entries.count("stick_mass") ||
                          entries.count("stick_length_actual");
  const bool any_effective = entries.count("cart_mass_eff") || entries.count("stick_mass_eff") ||
                             entries.count("stick_length_eff");
  if (any_actual && any_effective) {
    throw DomainError("stick_mass", "mixing actual-body keys with *_eff keys is ambiguous");
  }
  if (any_actual) {
    for (const char* key : {"human_mass", "stick_mass", "stick_length_actual"}) {
      if (!entries.count(key)) throw DomainError(key, "actual-body parameters must be given together");
    }
    RawParams raw;
    raw.human_mass = *get("human_mass");
    raw.stick_mass = *get("stick_mass");
    raw.stick_length = *get("stick_length_actual");
    const PendulumParams eff = effective_params(raw);
    cfg.cart_mass = eff.cart_mass;
    cfg.stick_mass = eff.stick_mass;
    cfg.stick_length = eff.stick_length;
  } else {
    cfg.cart_mass = get("cart_mass_eff");
    cfg.stick_mass = get("stick_mass_eff");
    cfg.stick_length = get("stick_length_eff");
  }
  cfg.fixation_point = get("fixation_point");
  cfg.gravity = get("gravity");
  cfg.delay = get("delay");
  cfg.dt = get("dt");
  cfg.duration = get("duration");
  cfg.sensor_noise_std = get("sensor_noise_std");
  cfg.actuation_noise_std = get("actuation_noise_std");
  if (auto it = entries.find("seed"); it != entries.end()) cfg.seed = parse_u64(it->second, "seed");
  if (auto it = entries.find("controller_num"); it != entries.end()) {
    cfg.controller_num = parse_number_list(it->second, "controller_num");
  }
  if (auto it = entries.find("controller_den"); it != entries.end()) {
    cfg.controller_den = parse_number_list(it->second, "controller_den");
  }
  cfg.initial_state = {get("initial_x"), get("initial_xdot"), get("initial_theta"), get("initial_thetadot")};
  return cfg;
}

void write_sim_config(std::ostream& os, const SimConfig& cfg) {
  os << "cart_mass_eff = " << format_number(cfg.params.cart_mass) << '\n'
     << "stick_mass_eff = " << format_number(cfg.params.stick_mass) << '\n'
     << "stick_length_eff = " << format_number(cfg.params.stick_length) << '\n'
     << "fixation_point = " << format_number(cfg.params.fixation_point) << '\n'
     << "gravity = " << format_number(cfg.params.gravity) << '\n'
     << "delay = " << format_number(cfg.delay) << '\n'
     << "dt = " << format_number(cfg.dt) << '\n'
     << "duration = " << format_number(cfg.duration) << '\n'
     << "sensor_noise_std = " << format_number(cfg.sensor_noise_std) << '\n'
     << "actuation_noise_std = " << format_number(cfg.actuation_noise_std) << '\n'
     << "seed = " << cfg.seed << '\n'
     << "controller_num = " << list_text(cfg.controller.num()) << '\n'
     << "controller_den = " << list_text(cfg.controller.den()) << '\n'
     << "initial_x = " << format_number(cfg.initial_state[0]) << '\n'
     << "initial_xdot = " << format_number(cfg.initial_state[1]) << '\n'
     << "initial_theta = " << format_number(cfg.initial_state[2]) << '\n'
     << "initial_thetadot = " << format_number(cfg.initial_state[3]) << '\n';
}

Preset preset(const std::string& name) {
  if (name == "case-study" || name == "case-study-masses") {
    return {PendulumParams{3.25, 0.1, 1.0, 1.0, kDefaultGravity}, 0.3};
  }
  if (name == "gym-bar") return {PendulumParams{75.0, 15.0, 1.0, 1.0, kDefaultGravity}, 0.3};
  throw DomainError("preset", "unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"case-study", "case-study-masses", "gym-bar"}; }

Json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round_sig12(v);
}

Json to_json(const FragilityResult& r) {
  Json j;
  j["F"] = json_number(r.F);
  j["p"] = json_number(r.p);
  j["q"] = r.q ? json_number(*r.q) : Json(nullptr);
  j["regime"] = to_string(r.regime);
  return j;
}

Json to_json(const WaterbedReport& r) {
  Json j;
  j["band"] = Json::array({json_number(r.band.lo), json_number(r.band.hi)});
  j["c1"] = json_number(r.c1);
  j["c2"] = json_number(r.c2);
  j["M1"] = json_number(r.M1);
  j["M2"] = json_number(r.M2);
  j["F"] = json_number(r.F);
  j["lhs"] = json_number(r.lhs);
  j["holds"] = r.holds;
  j["inconclusive_tight"] = r.inconclusive_tight;
  return j;
}

Json to_json(const StabilityReport& r) {
  Json j;
  j["stable"] = r.stable;
  j["encirclements"] = r.encirclements;
  j["open_loop_rhp_poles"] = r.open_loop_rhp_poles;
  j["samples"] = r.samples;
  return j;
}

Json to_json(const InterpolationReport& r) {
  Json j;
  j["t_at_p"] = Json::array({json_number(r.T_at_p.real()), json_number(r.T_at_p.imag())});
  j["t_deviation"] = json_number(r.T_deviation);
  j["s_check_skipped"] = r.S_check_skipped;
  if (!r.S_check_skipped) {
    j["s_at_q"] = Json::array({json_number(r.S_at_q.real()), json_number(r.S_at_q.imag())});
    j["s_deviation"] = json_number(r.S_deviation);
    j["t_at_q_abs"] = json_number(r.T_at_q_abs);
  }
  return j;
}

Json to_json(const PoleZeroSet& pz) {
  const auto list = [](const std::vector<Complex>& v) {
    Json a = Json::array();
    for (const Complex& c : v) a.push_back(Json::array({json_number(c.real()), json_number(c.imag())}));
    return a;
  };
  Json j;
  j["poles"] = list(pz.poles);
  j["zeros"] = list(pz.zeros);
  return j;
}

}  // namespace pendlim
