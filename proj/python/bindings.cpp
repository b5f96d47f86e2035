#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pendlim/errors.hpp"
#include "pendlim/plant.hpp"
#include "pendlim/robustness.hpp"
#include "pendlim/sweep.hpp"
#include "pendlim/timesim.hpp"

namespace py = pybind11;
using namespace pendlim;

namespace {

Orientation orientation(const std::string& s) {
  if (s == "up") return Orientation::Upright;
  if (s == "down") return Orientation::Downward;
  throw DomainError("orientation", "expected 'up' or 'down'");
}

DelayLoop make_loop(const PendulumParams& p, std::vector<double> num, std::vector<double> den, double tau,
                    const std::string& orient) {
  DelayLoop loop{plant_tf(p, orientation(orient)), RationalTF(std::move(num), std::move(den)), tau};
  loop.validate();
  return loop;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Delay-limited inverted pendulum balancing: fragility, robustness checks, simulation";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<StabilityInconclusiveError>(m, "StabilityInconclusiveError", PyExc_RuntimeError);

  py::class_<PendulumParams>(m, "PendulumParams")
      .def(py::init([](double M, double m_, double l, double l0, double g) {
             PendulumParams p{M, m_, l, l0, g};
             p.validate();
             return p;
           }),
           py::arg("M"), py::arg("m"), py::arg("l"), py::arg("l0"), py::arg("g") = kDefaultGravity)
      .def_readonly("M", &PendulumParams::cart_mass)
      .def_readonly("m", &PendulumParams::stick_mass)
      .def_readonly("l", &PendulumParams::stick_length)
      .def_readonly("l0", &PendulumParams::fixation_point)
      .def_readonly("g", &PendulumParams::gravity)
      .def("__repr__", [](const PendulumParams& p) {
        return "PendulumParams(M=" + std::to_string(p.cart_mass) + ", m=" + std::to_string(p.stick_mass) +
               ", l=" + std::to_string(p.stick_length) + ", l0=" + std::to_string(p.fixation_point) + ")";
      });

  m.def("effective_params",
        [](double human_mass, double stick_mass, double stick_length, double l0, double g) {
          return effective_params(RawParams{human_mass, stick_mass, stick_length, l0, g});
        },
        py::arg("human_mass"), py::arg("stick_mass"), py::arg("stick_length"), py::arg("l0"),
        py::arg("g") = kDefaultGravity);

  m.def("poles_zeros",
        [](const PendulumParams& p, const std::string& orient) {
          const PoleZeroSet pz = poles_zeros(p, orientation(orient));
          return py::make_tuple(pz.poles, pz.zeros);
        },
        py::arg("params"), py::arg("orientation") = "up");

  m.def("plant_tf",
        [](const PendulumParams& p, const std::string& orient) {
          const RationalTF tf = plant_tf(p, orientation(orient));
          return py::make_tuple(tf.num(), tf.den());
        },
        py::arg("params"), py::arg("orientation") = "up");

  m.def("fragility",
        [](const PendulumParams& p, double tau) {
          const FragilityResult r = fragility(p, tau);
          py::dict d;
          d["F"] = r.F;
          d["p"] = r.p;
          d["q"] = r.q ? py::cast(*r.q) : py::none();
          d["regime"] = to_string(r.regime);
          return d;
        },
        py::arg("params"), py::arg("tau"));

  m.def("singular_fixation_point", &singular_fixation_point, py::arg("params"));

  m.def("fragility_curve",
        [](const PendulumParams& p, double tau, const std::string& vary, double lo, double hi, std::size_t count,
           unsigned threads) {
          SweepSpec spec;
          spec.vary = parse_sweep_variable(vary);
          spec.range = {lo, hi, count};
          spec.fixed = p;
          spec.delay = tau;
          spec.threads = threads;
          const FragilitySeries s = fragility_curve(spec);
          return py::make_tuple(s.abscissa, s.F);
        },
        py::arg("params"), py::arg("tau"), py::arg("vary"), py::arg("lo"), py::arg("hi"), py::arg("count"),
        py::arg("threads") = 1);

  m.def("complementary_response",
        [](const PendulumParams& p, std::vector<double> num, std::vector<double> den, double tau,
           std::vector<double> omegas) {
          return complementary_response(make_loop(p, std::move(num), std::move(den), tau, "up"), omegas).values;
        },
        py::arg("params"), py::arg("num"), py::arg("den"), py::arg("tau"), py::arg("omegas"));

  m.def("nyquist_stable",
        [](const PendulumParams& p, std::vector<double> num, std::vector<double> den, double tau,
           const std::string& orient) {
          py::gil_scoped_release release;
          return nyquist_stable(make_loop(p, std::move(num), std::move(den), tau, orient));
        },
        py::arg("params"), py::arg("num"), py::arg("den"), py::arg("tau"), py::arg("orientation") = "up");

  m.def("bode_integral",
        [](const PendulumParams& p, std::vector<double> num, std::vector<double> den, double tau, double sigma0,
           double omega0) {
          const DelayLoop loop = make_loop(p, std::move(num), std::move(den), tau, "up");
          return bode_integral(axis_evaluator(loop), PoissonKernel{sigma0, omega0});
        },
        py::arg("params"), py::arg("num"), py::arg("den"), py::arg("tau"), py::arg("sigma0"),
        py::arg("omega0") = 0.0);

  m.def("simulate",
        [](const PendulumParams& p, std::vector<double> num, std::vector<double> den, double tau, double dt,
           double duration, double sensor_noise, double actuation_noise, std::uint64_t seed,
           std::array<double, 4> x0) {
          SimConfig cfg;
          cfg.params = p;
          cfg.controller = RationalTF(std::move(num), std::move(den));
          cfg.delay = tau;
          cfg.dt = dt;
          cfg.duration = duration;
          cfg.sensor_noise_std = sensor_noise;
          cfg.actuation_noise_std = actuation_noise;
          cfg.seed = seed;
          cfg.initial_state = x0;
          Trajectory t;
          {
            py::gil_scoped_release release;
            t = simulate(cfg);
          }
          py::dict d;
          d["t"] = t.t;
          d["x"] = t.x;
          d["theta"] = t.theta;
          d["z"] = t.z;
          d["y"] = t.y;
          d["u"] = t.u;
          d["diverged"] = t.diverged;
          return d;
        },
        py::arg("params"), py::arg("num"), py::arg("den"), py::arg("tau"), py::arg("dt"), py::arg("duration"),
        py::arg("sensor_noise") = 0.0, py::arg("actuation_noise") = 0.0, py::arg("seed") = 0,
        py::arg("x0") = std::array<double, 4>{0.0, 0.0, 0.0, 0.0});

  m.def("welch_psd",
        [](std::vector<double> samples, double fs, std::size_t segment, double overlap) {
          const Spectrum s = welch_psd(samples, fs, segment, overlap);
          return py::make_tuple(s.freqs, s.power);
        },
        py::arg("samples"), py::arg("fs"), py::arg("segment"), py::arg("overlap") = 0.5);
}
