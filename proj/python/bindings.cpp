// Python bindings for the kernel, the law library, the simulators and the
// verification suites. Library errors surface as osbm.OsbmError.

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "osbm/analytic.hpp"
#include "osbm/coupling.hpp"
#include "osbm/kernel.hpp"
#include "osbm/lawlib.hpp"
#include "osbm/simulate.hpp"
#include "osbm/verify.hpp"

namespace py = pybind11;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

osbm::SimConfig sim_config(double dt, double t_max, double x0, std::uint64_t seed, std::uint64_t stream) {
  osbm::SimConfig c;
  c.dt = dt;
  c.t_max = t_max;
  c.x0 = x0;
  c.rng = osbm::RngSpec{seed, stream};
  return c;
}

osbm::Engine engine_of(const std::string& name) {
  if (name == "timechange") return osbm::Engine::timechange;
  if (name == "euler") return osbm::Engine::euler;
  throw osbm::Error(osbm::ErrorCode::InvalidConfig, "unknown engine '" + name + "'");
}

py::dict path_dict(const osbm::PathRecord& path) {
  py::dict d;
  std::vector<double> t(path.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = path.dt * static_cast<double>(k);
  py::array_t<bool> sticky(path.sticky.size());
  auto flags = sticky.mutable_unchecked<1>();
  for (std::size_t k = 0; k < path.sticky.size(); ++k) flags(static_cast<py::ssize_t>(k)) = path.sticky[k] != 0;
  d["t"] = to_array(t);
  d["x"] = to_array(path.x);
  d["l"] = to_array(path.l);
  d["gamma"] = to_array(path.gamma);
  d["sticky"] = sticky;
  return d;
}

}  // namespace

PYBIND11_MODULE(_osbm, m) {
  m.doc() = "Oscillating sticky Brownian motion: transition kernel, joint laws, simulation and verification.";

  py::register_exception<osbm::Error>(m, "OsbmError", PyExc_ValueError);

  py::class_<osbm::OsbmParams>(m, "Params")
      .def(py::init([](double sigma_plus, double sigma_minus, double theta) {
             return osbm::make_params(sigma_plus, sigma_minus, theta);
           }),
           py::arg("sigma_plus"), py::arg("sigma_minus"), py::arg("theta"))
      .def_readonly("sigma_plus", &osbm::OsbmParams::sigma_plus)
      .def_readonly("sigma_minus", &osbm::OsbmParams::sigma_minus)
      .def_readonly("theta", &osbm::OsbmParams::theta)
      .def_readonly("r", &osbm::OsbmParams::r)
      .def("mirrored", [](const osbm::OsbmParams& p) { return osbm::mirrored(p); })
      .def(py::self == py::self)
      .def("__repr__", [](const osbm::OsbmParams& p) {
        return "Params(sigma_plus=" + std::to_string(p.sigma_plus) + ", sigma_minus=" +
               std::to_string(p.sigma_minus) + ", theta=" + std::to_string(p.theta) + ")";
      });

  m.def("first_passage_density", &osbm::h_eval, py::arg("s"), py::arg("z"));
  m.def("sticky_factor", &osbm::g_eval, py::arg("s"), py::arg("z"), py::arg("params"));
  m.def("killed_density", &osbm::p0_eval, py::arg("t"), py::arg("x"), py::arg("y"), py::arg("params"));

  m.def("transition_density", py::vectorize([](double t, double x, double y, osbm::OsbmParams p) { return osbm::transition_density(t, x, y, p); }), py::arg("t"), py::arg("x"), py::arg("y"),
        py::arg("params"));
  m.def("transition_atom", &osbm::transition_atom, py::arg("t"), py::arg("x"), py::arg("params"));
  m.def("transition_cdf", py::vectorize([](double t, double x, double y, osbm::OsbmParams p) { return osbm::transition_cdf(t, x, y, p); }), py::arg("t"), py::arg("x"), py::arg("y"),
        py::arg("params"));
  m.def("resolvent_density", py::vectorize([](double lam, double x, double y, osbm::OsbmParams p) { return osbm::resolvent_density(lam, x, y, p); }), py::arg("lam"), py::arg("x"), py::arg("y"),
        py::arg("params"));
  m.def("resolvent_atom", &osbm::resolvent_atom, py::arg("lam"), py::arg("x"), py::arg("params"));

  m.def(
      "trivariate_density",
      [](double t, double y, double l, double tau, const osbm::OsbmParams& p, double x) {
        return osbm::trivariate_density(osbm::TriQuery{t, x, y, l, tau}, p);
      },
      py::arg("t"), py::arg("y"), py::arg("l"), py::arg("tau"), py::arg("params"), py::arg("x") = 0.0);
  m.def(
      "joint_density",
      [](double t, double x, double y, double l, const osbm::OsbmParams& p) {
        return osbm::joint_position_localtime(t, x, y, l, p).density;
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("l"), py::arg("params"));
  m.def("localtime_density", &osbm::localtime_density, py::arg("t"), py::arg("l"), py::arg("params"));
  m.def("occupation_density", &osbm::occupation_density, py::arg("t"), py::arg("tau"), py::arg("params"),
        py::arg("abs_tol") = 1e-8);

  m.def(
      "simulate_path",
      [](const osbm::OsbmParams& p, double t_max, double dt, double x0, std::uint64_t seed, std::uint64_t stream,
         const std::string& engine) {
        const osbm::SimConfig c = sim_config(dt, t_max, x0, seed, stream);
        const osbm::PathRecord path =
            engine_of(engine) == osbm::Engine::euler ? osbm::simulate_osbm_euler(c, p) : osbm::simulate_osbm(c, p);
        return path_dict(path);
      },
      py::arg("params"), py::arg("t_max") = 1.0, py::arg("dt") = 1e-3, py::arg("x0") = 0.0, py::arg("seed") = 42,
      py::arg("stream") = 0, py::arg("engine") = "timechange");

  m.def(
      "simulate_terminal",
      [](const osbm::OsbmParams& p, std::size_t n, double t_max, double dt, double x0, std::uint64_t seed,
         const std::string& engine) {
        std::vector<osbm::TerminalSample> s;
        {
          py::gil_scoped_release release;
          s = osbm::simulate_terminal(sim_config(dt, t_max, x0, seed, 0), p, n, engine_of(engine), 0);
        }
        std::vector<double> x, l, gamma, sticky_time;
        for (const auto& v : s) {
          x.push_back(v.x);
          l.push_back(v.l);
          gamma.push_back(v.gamma);
          sticky_time.push_back(v.sticky_time);
        }
        py::dict d;
        d["x"] = to_array(x);
        d["l"] = to_array(l);
        d["gamma"] = to_array(gamma);
        d["sticky_time"] = to_array(sticky_time);
        return d;
      },
      py::arg("params"), py::arg("n"), py::arg("t_max") = 1.0, py::arg("dt") = 1e-3, py::arg("x0") = 0.0,
      py::arg("seed") = 42, py::arg("engine") = "timechange");

  m.def(
      "verify_json",
      [](const std::string& suite, std::size_t paths, std::size_t pairs, double dt, std::uint64_t seed) {
        osbm::VerifyConfig cfg;
        cfg.n_paths = paths;
        cfg.martingale_paths = 2 * paths;
        cfg.n_pairs = pairs;
        cfg.dt = dt;
        cfg.seed = seed;
        osbm::VerifyReport rep;
        {
          py::gil_scoped_release release;
          rep = osbm::run_suite(suite, cfg);
        }
        return osbm::report_json(rep);
      },
      py::arg("suite"), py::arg("paths") = 50'000, py::arg("pairs") = 20'000, py::arg("dt") = 1e-3,
      py::arg("seed") = 42);
}
