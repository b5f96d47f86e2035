#include "pendlim/cli.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "pendlim/errors.hpp"
#include "pendlim/format.hpp"
#include "pendlim/io.hpp"
#include "pendlim/plant.hpp"
#include "pendlim/robustness.hpp"
#include "pendlim/sweep.hpp"
#include "pendlim/timesim.hpp"

namespace pendlim::cli {

namespace {

constexpr double kNatsToDb = 20.0 / std::numbers::ln10;

// Plant, delay and controller flags shared by most commands.
struct PlantFlags {
  std::string preset_name;
  std::string config_path;
  std::optional<double> M, m, l, l0, g, tau;
  std::optional<double> human_mass, stick_mass_actual, stick_length_actual;
  std::optional<double> gain;
  std::string controller_num, controller_den;
  std::optional<ConfigValues> config;  // loaded on first use

  void add_to(CLI::App& app, bool with_controller) {
    app.add_option("--preset", preset_name, "Parameter preset: case-study, case-study-masses, gym-bar")
        ->check(CLI::IsMember(preset_names()));
    app.add_option("--config", config_path, "Key-value parameter file; flags override its values");
    add_value(app, "--M", M, "Effective cart mass M [kg]");
    add_value(app, "--m", m, "Effective stick mass m [kg]");
    add_value(app, "--l", l, "Effective stick length l [m]");
    add_value(app, "--l0", l0, "Fixation point l0 [m]");
    add_value(app, "--g", g, "Gravity [m/s^2]");
    add_value(app, "--tau", tau, "Feedback delay [s]");
    add_value(app, "--human-mass", human_mass, "Actual human mass M' [kg]; needs all three actual-body flags");
    add_value(app, "--stick-mass-actual", stick_mass_actual, "Actual stick mass m' [kg]");
    add_value(app, "--stick-length-actual", stick_length_actual, "Actual stick length l' [m]");
    if (with_controller) {
      add_value(app, "--gain", gain, "Static controller gain C(s) = k");
      app.add_option("--controller-num", controller_num, "Controller numerator, descending powers, comma separated");
      app.add_option("--controller-den", controller_den, "Controller denominator, descending powers, comma separated");
    }
  }

  static void add_value(CLI::App& app, const std::string& name, std::optional<double>& slot, const std::string& help) {
    app.add_option_function<double>(name, [&slot](const double& v) { slot = v; }, help);
  }

  const ConfigValues* file() {
    if (config_path.empty()) return nullptr;
    if (!config) {
      std::ifstream is(config_path);
      if (!is) throw DomainError("config", "cannot open '" + config_path + "'");
      config = read_config(is);
    }
    return &*config;
  }

  // preset < config file < flags; the case-study preset when nothing is given.
  PendulumParams params() {
    const Preset base = preset(preset_name.empty() ? "case-study" : preset_name);
    PendulumParams p = base.params;
    if (const ConfigValues* c = file()) {
      p.cart_mass = c->cart_mass.value_or(p.cart_mass);
      p.stick_mass = c->stick_mass.value_or(p.stick_mass);
      p.stick_length = c->stick_length.value_or(p.stick_length);
      p.fixation_point = c->fixation_point.value_or(p.fixation_point);
      p.gravity = c->gravity.value_or(p.gravity);
    }
    const bool any_actual = human_mass || stick_mass_actual || stick_length_actual;
    if (any_actual) {
      if (!human_mass) throw DomainError("human-mass", "actual-body flags must be given together");
      if (!stick_mass_actual) throw DomainError("stick-mass-actual", "actual-body flags must be given together");
      if (!stick_length_actual) throw DomainError("stick-length-actual", "actual-body flags must be given together");
      if (M || m || l) throw DomainError("stick-length-actual", "cannot combine actual-body flags with --M/--m/--l");
      RawParams raw{*human_mass, *stick_mass_actual, *stick_length_actual, l0.value_or(p.fixation_point),
                    g.value_or(p.gravity)};
      p = effective_params(raw);
    }
    if (M) p.cart_mass = *M;
    if (m) p.stick_mass = *m;
    if (l) p.stick_length = *l;
    if (l0) p.fixation_point = *l0;
    if (g) p.gravity = *g;
    p.validate();
    return p;
  }

  double delay() {
    double d = preset(preset_name.empty() ? "case-study" : preset_name).delay;
    if (const ConfigValues* c = file()) d = c->delay.value_or(d);
    if (tau) d = *tau;
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("tau", "delay must be finite and >= 0");
    return d;
  }

  // --gain, or --controller-num/--controller-den, or the config file; default C = 1.
  RationalTF controller() {
    const bool lists = !controller_num.empty() || !controller_den.empty();
    if (gain && lists) throw DomainError("gain", "give either --gain or --controller-num/--controller-den");
    if (gain) return RationalTF::constant(*gain);
    if (lists) {
      if (controller_num.empty()) throw DomainError("controller-num", "required with --controller-den");
      const auto num = parse_number_list(controller_num, "controller-num");
      const auto den = controller_den.empty() ? std::vector<double>{1.0}
                                              : parse_number_list(controller_den, "controller-den");
      return RationalTF(num, den);
    }
    if (const ConfigValues* c = file(); c && c->controller_num) {
      return RationalTF(*c->controller_num, c->controller_den.value_or(std::vector<double>{1.0}));
    }
    return RationalTF::constant(1.0);
  }
};

struct OutputFlags {
  std::string out_path;
  std::string format;  // empty until given; each command picks its default

  void add_to(CLI::App& app, const std::string& default_format, bool csv_only = false) {
    app.add_option("--out", out_path, "Write output to this file (atomically) instead of standard output");
    if (csv_only) return;
    app.add_option("--format", format, "Output format: csv or json (default " + default_format + ")")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  bool json(const char* default_format) const { return (format.empty() ? default_format : format) == std::string("json"); }

  void emit(std::ostream& out, const std::function<void(std::ostream&)>& writer) const {
    if (out_path.empty()) {
      writer(out);
    } else {
      write_file_atomic(out_path, writer);
    }
  }
};

Orientation parse_orientation(const std::string& s) { return s == "down" ? Orientation::Downward : Orientation::Upright; }

Json number_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

void dump(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

std::string csv_list(std::initializer_list<double> values) {
  std::string s;
  for (double v : values) {
    if (!s.empty()) s += ',';
    s += format_number(v);
  }
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delay-limited balancing of an inverted pendulum: fragility, robustness and simulation", "pendlim"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every command and exit");

  PlantFlags plant;
  OutputFlags output;

  // poleszeros
  std::string orientation = "up";
  auto* poleszeros = app.add_subcommand("poleszeros", "Plant poles and zeros");
  plant.add_to(*poleszeros, false);
  poleszeros->add_option("--orientation", orientation, "Pendulum orientation: up or down")
      ->check(CLI::IsMember({"up", "down"}));
  output.add_to(*poleszeros, "json");

  // fragility
  bool db = false;
  auto* fragility_cmd = app.add_subcommand("fragility", "Lower bound F on ln ||T||_inf (nats)");
  plant.add_to(*fragility_cmd, false);
  fragility_cmd->add_flag("--db", db, "Also report F in dB");
  output.add_to(*fragility_cmd, "json");

  // sweep
  std::string vary = "length";
  double from = 0.2, to = 2.0;
  std::size_t count = 100;
  bool couple = false, actual_axis = false;
  unsigned threads = 1;
  auto* sweep = app.add_subcommand("sweep", "Fragility along one parameter");
  plant.add_to(*sweep, false);
  sweep->add_option("--vary", vary, "Swept quantity: length, fixation, mass-ratio, delay")
      ->check(CLI::IsMember({"length", "stick-length", "fixation", "fixation-point", "mass-ratio", "delay"}));
  sweep->add_option("--from", from, "First abscissa")->capture_default_str();
  sweep->add_option("--to", to, "Last abscissa")->capture_default_str();
  sweep->add_option("--count", count, "Number of points")->capture_default_str();
  sweep->add_flag("--couple-l0", couple, "Keep l0 equal to l while sweeping length");
  sweep->add_flag("--actual-length", actual_axis, "Length abscissa is the actual stick length l'");
  sweep->add_option("--threads", threads, "Worker threads")->capture_default_str();
  sweep->add_flag("--db", db, "Report F in dB instead of nats");
  output.add_to(*sweep, "csv");

  // heatmap
  double l_from = 0.2, l_to = 2.0, l0_from = 0.2, l0_to = 2.0;
  std::size_t l_count = 200, l0_count = 200;
  bool matrix = false;
  auto* heatmap = app.add_subcommand("heatmap", "Fragility over the (l, l0) plane");
  plant.add_to(*heatmap, false);
  heatmap->add_option("--l-from", l_from, "First l [m]")->capture_default_str();
  heatmap->add_option("--l-to", l_to, "Last l [m]")->capture_default_str();
  heatmap->add_option("--l-count", l_count, "Number of l values")->capture_default_str();
  heatmap->add_option("--l0-from", l0_from, "First l0 [m]")->capture_default_str();
  heatmap->add_option("--l0-to", l0_to, "Last l0 [m]")->capture_default_str();
  heatmap->add_option("--l0-count", l0_count, "Number of l0 values")->capture_default_str();
  heatmap->add_flag("--matrix", matrix, "CSV as a matrix (rows l0, columns l) instead of long form");
  heatmap->add_option("--threads", threads, "Worker threads")->capture_default_str();
  output.add_to(*heatmap, "csv");

  // freqresp
  double w_min = 1e-2, w_max = 1e3;
  std::size_t points = 2000;
  std::string which = "T";
  auto* freqresp = app.add_subcommand("freqresp", "Closed-loop frequency response on a log grid");
  plant.add_to(*freqresp, true);
  freqresp->add_option("--orientation", orientation, "Pendulum orientation: up or down")
      ->check(CLI::IsMember({"up", "down"}));
  freqresp->add_option("--which", which, "Response: T, S or L")->check(CLI::IsMember({"T", "S", "L"}));
  freqresp->add_option("--w-min", w_min, "Lowest frequency [rad/s]")->capture_default_str();
  freqresp->add_option("--w-max", w_max, "Highest frequency [rad/s]")->capture_default_str();
  freqresp->add_option("--points", points, "Grid points")->capture_default_str();
  output.add_to(*freqresp, "csv");

  // bodeint
  double sigma0 = 0.0, omega0 = 0.0;
  int order = 512;
  auto* bodeint = app.add_subcommand("bodeint", "Poisson-weighted integral of ln|T(jw)|");
  plant.add_to(*bodeint, true);
  bodeint->add_option("--sigma0", sigma0, "Kernel point real part [1/s]; default p");
  bodeint->add_option("--omega0", omega0, "Kernel point imaginary part [rad/s]")->capture_default_str();
  bodeint->add_option("--order", order, "Gauss-Legendre order")->capture_default_str();
  output.add_to(*bodeint, "json", true);

  // waterbed
  double band_lo = 0.0, band_hi = 0.0;
  bool hz = false;
  auto* waterbed = app.add_subcommand("waterbed", "Two-band waterbed check on |T|");
  plant.add_to(*waterbed, true);
  waterbed->add_option("--band-lo", band_lo, "Band lower edge")->required();
  waterbed->add_option("--band-hi", band_hi, "Band upper edge")->required();
  waterbed->add_flag("--hz", hz, "Band edges are in Hz instead of rad/s");
  output.add_to(*waterbed, "json", true);

  // stability
  auto* stability = app.add_subcommand("stability", "Nyquist stability of the delayed loop");
  plant.add_to(*stability, true);
  stability->add_option("--orientation", orientation, "Pendulum orientation: up or down")
      ->check(CLI::IsMember({"up", "down"}));
  output.add_to(*stability, "json", true);

  // simulate
  std::uint64_t seed = 0;
  std::optional<double> dt, duration, sensor_noise, actuation_noise;
  std::array<std::optional<double>, 4> x0;
  std::string config_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "Linear closed-loop simulation with delay and noise");
  plant.add_to(*simulate_cmd, true);
  simulate_cmd->add_option("--seed", seed, "Noise seed")->required();
  PlantFlags::add_value(*simulate_cmd, "--dt", dt, "Step [s], at most tau/10; default min(1e-3, tau/10)");
  PlantFlags::add_value(*simulate_cmd, "--duration", duration, "Length [s]; default 10");
  PlantFlags::add_value(*simulate_cmd, "--sensor-noise", sensor_noise, "Sensor noise std [m]");
  PlantFlags::add_value(*simulate_cmd, "--actuation-noise", actuation_noise, "Actuation noise std [N]");
  PlantFlags::add_value(*simulate_cmd, "--x0", x0[0], "Initial cart position [m]");
  PlantFlags::add_value(*simulate_cmd, "--xdot0", x0[1], "Initial cart velocity [m/s]");
  PlantFlags::add_value(*simulate_cmd, "--theta0", x0[2], "Initial angle [rad]");
  PlantFlags::add_value(*simulate_cmd, "--thetadot0", x0[3], "Initial angular rate [rad/s]");
  simulate_cmd->add_option("--save-config", config_out, "Also write the resolved simulation config here");
  output.add_to(*simulate_cmd, "csv", true);

  // psd
  std::string input_path, column_name = "z";
  std::size_t segment = 4096;
  double overlap = 0.5;
  auto* psd_cmd = app.add_subcommand("psd", "Welch power spectral density of a trajectory column");
  psd_cmd->add_option("--input", input_path, "Trajectory CSV from simulate")->required();
  psd_cmd->add_option("--column", column_name, "Column: x, theta, z, y, u")
      ->check(CLI::IsMember({"x", "theta", "z", "y", "u"}));
  psd_cmd->add_option("--segment", segment, "Segment length [samples]")->capture_default_str();
  psd_cmd->add_option("--overlap", overlap, "Segment overlap fraction")->capture_default_str();
  output.add_to(*psd_cmd, "csv", true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help("", CLI::AppFormatMode::All) : subs.front()->help());
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (poleszeros->parsed()) {
      const PendulumParams p = plant.params();
      const PoleZeroSet pz = poles_zeros(p, parse_orientation(orientation));
      output.emit(out, [&](std::ostream& os) {
        if (output.json("json")) {
          dump(os, to_json(pz));
          return;
        }
        os << "kind,re,im\n";
        for (const Complex& c : pz.poles) os << "pole," << csv_list({c.real(), c.imag()}) << '\n';
        for (const Complex& c : pz.zeros) os << "zero," << csv_list({c.real(), c.imag()}) << '\n';
      });
    } else if (fragility_cmd->parsed()) {
      const FragilityResult r = fragility(plant.params(), plant.delay());
      output.emit(out, [&](std::ostream& os) {
        if (output.json("json")) {
          Json j = to_json(r);
          if (db) j["F_db"] = json_number(r.F * kNatsToDb);
          dump(os, j);
          return;
        }
        os << "F_nats,p_rad_s,q_rad_s,regime" << (db ? ",F_db" : "") << '\n'
           << format_number(r.F) << ',' << format_number(r.p) << ',' << (r.q ? format_number(*r.q) : "") << ','
           << to_string(r.regime);
        if (db) os << ',' << format_number(r.F * kNatsToDb);
        os << '\n';
      });
    } else if (sweep->parsed()) {
      SweepSpec spec;
      spec.vary = parse_sweep_variable(vary);
      spec.range = {from, to, count};
      spec.fixed = plant.params();
      spec.delay = plant.delay();
      spec.couple_l0_to_l = couple;
      spec.actual_length_axis = actual_axis;
      spec.threads = threads;
      FragilitySeries series = fragility_curve(spec);
      if (db) {
        for (double& f : series.F) f *= kNatsToDb;
      }
      for (double x : series.skipped) {
        err << "warning: " << to_string(spec.vary) << "=" << format_number(x) << " skipped (q = p)\n";
      }
      output.emit(out, [&](std::ostream& os) {
        if (output.json("csv")) {
          Json j;
          j["vary"] = to_string(spec.vary);
          j["unit"] = db ? "dB" : "nats";
          j["abscissa"] = number_array(series.abscissa);
          j["F"] = number_array(series.F);
          j["skipped"] = number_array(series.skipped);
          dump(os, j);
          return;
        }
        if (!db) {
          write_curve_csv(os, series);
          return;
        }
        os << "abscissa,F_db\n";
        for (std::size_t i = 0; i < series.F.size(); ++i) {
          os << format_number(series.abscissa[i]) << ',' << format_number(series.F[i]) << '\n';
        }
      });
    } else if (heatmap->parsed()) {
      const FragilitySurface surface =
          fragility_heatmap({l_from, l_to, l_count}, {l0_from, l0_to, l0_count}, plant.params(), plant.delay(), threads);
      output.emit(out, [&](std::ostream& os) {
        if (!output.json("csv")) {
          write_heatmap_csv(os, surface, matrix);
          return;
        }
        Json j;
        j["l_m"] = number_array(surface.l_axis);
        j["l0_m"] = number_array(surface.l0_axis);
        Json rows = Json::array();
        for (std::size_t r = 0; r < surface.l0_axis.size(); ++r) {
          Json row = Json::array();
          for (std::size_t c = 0; c < surface.l_axis.size(); ++c) row.push_back(json_number(surface.at(r, c)));
          rows.push_back(row);
        }
        j["F_nats"] = rows;
        dump(os, j);
      });
    } else if (freqresp->parsed()) {
      const DelayLoop loop{plant_tf(plant.params(), parse_orientation(orientation)), plant.controller(), plant.delay()};
      loop.validate();
      const std::vector<double> grid = log_grid(w_min, w_max, points);
      FrequencyResponse resp;
      if (which == "L") {
        resp.omegas = grid;
        for (double w : grid) resp.values.push_back(loop_gain(loop, Complex{0.0, w}));
      } else {
        LoopResponse lr = loop_response(loop, grid);
        resp = which == "T" ? std::move(lr.complementary) : std::move(lr.sensitivity);
      }
      output.emit(out, [&](std::ostream& os) {
        if (!output.json("csv")) {
          write_csv(os, resp);
          return;
        }
        Json j;
        j["response"] = which;
        j["omega_rad_s"] = number_array(resp.omegas);
        std::vector<double> re, im;
        for (const Complex& v : resp.values) {
          re.push_back(v.real());
          im.push_back(v.imag());
        }
        j["re"] = number_array(re);
        j["im"] = number_array(im);
        dump(os, j);
      });
    } else if (bodeint->parsed()) {
      const PendulumParams p = plant.params();
      const DelayLoop loop{plant_tf(p, Orientation::Upright), plant.controller(), plant.delay()};
      loop.validate();
      const double pole = rhp_pole_zero(p).p;
      const PoissonKernel kernel{bodeint->count("--sigma0") ? sigma0 : pole, omega0};
      kernel.validate();
      const double value = bode_integral(axis_evaluator(loop), kernel, QuadratureConfig{order});
      output.emit(out, [&](std::ostream& os) {
        Json j;
        j["sigma0"] = json_number(kernel.sigma0);
        j["omega0"] = json_number(kernel.omega0);
        j["order"] = order;
        j["integral_nats"] = json_number(value);
        dump(os, j);
      });
    } else if (waterbed->parsed()) {
      const PendulumParams p = plant.params();
      const double tau = plant.delay();
      const DelayLoop loop{plant_tf(p, Orientation::Upright), plant.controller(), tau};
      loop.validate();
      const double scale = hz ? 2.0 * std::numbers::pi : 1.0;
      const FragilityResult f = fragility(p, tau);
      const StabilityReport st = nyquist_analysis(loop);
      if (!st.stable) err << "warning: loop is not closed-loop stable; the waterbed bound need not hold\n";
      const WaterbedReport r = waterbed_check(axis_evaluator(loop), f.p, {band_lo * scale, band_hi * scale}, f.F);
      output.emit(out, [&](std::ostream& os) {
        Json j = to_json(r);
        j["closed_loop_stable"] = st.stable;
        dump(os, j);
      });
    } else if (stability->parsed()) {
      const PendulumParams p = plant.params();
      const DelayLoop loop{plant_tf(p, parse_orientation(orientation)), plant.controller(), plant.delay()};
      loop.validate();
      const StabilityReport st = nyquist_analysis(loop);
      output.emit(out, [&](std::ostream& os) { dump(os, to_json(st)); });
    } else if (simulate_cmd->parsed()) {
      SimConfig cfg;
      cfg.params = plant.params();
      cfg.delay = plant.delay();
      cfg.controller = plant.controller();
      cfg.seed = seed;
      const ConfigValues* file = plant.file();
      const auto pick = [&](const std::optional<double>& flag, std::optional<double> ConfigValues::*key, double dflt) {
        if (flag) return *flag;
        if (file && (file->*key)) return *(file->*key);
        return dflt;
      };
      cfg.dt = pick(dt, &ConfigValues::dt, cfg.delay > 0.0 ? std::min(1e-3, cfg.delay / 10.0) : 1e-3);
      cfg.duration = pick(duration, &ConfigValues::duration, 10.0);
      cfg.sensor_noise_std = pick(sensor_noise, &ConfigValues::sensor_noise_std, 0.0);
      cfg.actuation_noise_std = pick(actuation_noise, &ConfigValues::actuation_noise_std, 0.0);
      for (std::size_t i = 0; i < 4; ++i) {
        if (x0[i]) {
          cfg.initial_state[i] = *x0[i];
        } else if (file && file->initial_state[i]) {
          cfg.initial_state[i] = *file->initial_state[i];
        }
      }
      const Trajectory traj = simulate(cfg);
      if (traj.diverged) err << "warning: trajectory diverged at t=" << format_number(traj.t.back()) << " s\n";
      if (!config_out.empty()) write_file_atomic(config_out, [&](std::ostream& os) { write_sim_config(os, cfg); });
      output.emit(out, [&](std::ostream& os) { write_trajectory_csv(os, traj); });
    } else if (psd_cmd->parsed()) {
      std::ifstream is(input_path);
      if (!is) throw DomainError("input", "cannot open '" + input_path + "'");
      const Trajectory traj = read_trajectory_csv(is);
      const Spectrum spec = psd(traj, parse_trajectory_column(column_name), segment, overlap);
      output.emit(out, [&](std::ostream& os) { write_spectrum_csv(os, spec); });
    }
  } catch (const StabilityInconclusiveError& e) {
    err << "error: stability inconclusive: " << e.what() << '\n';
    return kInconclusive;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kSuccess;
}

}  // namespace pendlim::cli
