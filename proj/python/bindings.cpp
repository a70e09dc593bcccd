#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twoway/errors.hpp"
#include "twoway/experiment.hpp"
#include "twoway/fading.hpp"
#include "twoway/lower_bounds.hpp"
#include "twoway/montecarlo.hpp"
#include "twoway/protocol_dual.hpp"
#include "twoway/protocol_single.hpp"
#include "twoway/special_functions.hpp"

namespace py = pybind11;
using namespace twoway;

namespace {

py::dict stats_dict(const SimStats& s) {
  py::dict d;
  d["trials"] = s.trials;
  d["mse"] = s.mse;
  d["mse_stderr"] = s.mse_stderr;
  d["source_mse"] = s.source_mse;
  d["avg_energy"] = s.avg_energy;
  d["energy_stderr"] = s.energy_stderr;
  d["per_round_error_rate"] = s.per_round_error_rate;
  d["retransmission_rate"] = s.retransmission_rate;
  d["counts"] = s.counts;
  return d;
}

SimStats simulate_single(int B, const EnergySchedule& s, std::uint64_t trials, std::uint64_t seed, double alpha) {
  TrialConfig t;
  t.source.distribution = Distribution::UNIFORM;
  t.quantizer = build_quantizer(QuantizerKind::SCALAR_UNIFORM, B);
  t.schedule = s;
  if (alpha > 0.0) t.channel = ChannelSpec{ChannelKind::RICIAN, alpha, s.n0};
  else t.channel.n0 = s.n0;
  t.trials = trials;
  t.seed = seed;
  t.workers = 0;
  return run_single(t);
}

SimStats simulate_dual(const DualSchedule& s, Distribution d, std::uint64_t trials, std::uint64_t seed) {
  TrialConfig t;
  t.source.distribution = d;
  t.source.rho = s.rho;
  t.quantizer = build_quantizer(d == Distribution::UNIFORM ? QuantizerKind::UNIFORM_TAILS : QuantizerKind::GAUSSIAN_GRID,
                                s.B, s.rho);
  t.schedule = s;
  t.channel.n0 = s.n0;
  t.trials = trials;
  t.seed = seed;
  t.workers = 0;
  return run_dual(t);
}

std::string run_config(const std::string& text, const std::string& format) {
  std::istringstream in(text);
  std::vector<std::string> keys;
  ExperimentConfig cfg = parse_config(in, {}, &keys);
  apply_figure_preset(cfg, keys);
  std::ostringstream out;
  write_table(run_experiment(cfg), format == "jsonl" ? OutputFormat::JSONL : OutputFormat::CSV, out);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_twoway, m) {
  m.doc() = "Distortion bounds and Monte Carlo simulation of a two-way feedback protocol.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::enum_<Distribution>(m, "Distribution")
      .value("UNIFORM", Distribution::UNIFORM)
      .value("GAUSSIAN", Distribution::GAUSSIAN);

  m.def("marcum_q1", &marcum_q1, py::arg("a"), py::arg("b"));
  m.def("p2_pairwise", &p2_pairwise, py::arg("L"), py::arg("gamma"));
  m.def("rician_pm", [](std::uint64_t M, int L, double g, double a) { return rician_pm(M, L, g, a); },
        py::arg("M"), py::arg("L"), py::arg("gamma"), py::arg("alpha") = 0.0);
  m.def("uncorrectable_bound", &uncorrectable_bound, py::arg("lam"), py::arg("ec_over_n0"));

  m.def("goblick_bound", &goblick_bound, py::arg("e"), py::arg("n0") = 1.0);
  m.def(
      "single_split_bound",
      [](double e, Distribution d, double n0) {
        BoundQuery q;
        q.distribution = d;
        q.e1 = e;
        q.n0 = n0;
        return single_split_bound(q).value;
      },
      py::arg("e"), py::arg("distribution") = Distribution::UNIFORM, py::arg("n0") = 1.0);

  py::class_<EnergySchedule>(m, "EnergySchedule")
      .def(py::init<>())
      .def_readwrite("n_rounds", &EnergySchedule::n_rounds)
      .def_readwrite("ed", &EnergySchedule::ed)
      .def_readwrite("ec", &EnergySchedule::ec)
      .def_readwrite("lam", &EnergySchedule::lambda)
      .def_readwrite("n0", &EnergySchedule::n0)
      .def("__repr__", [](const EnergySchedule& s) {
        std::ostringstream o;
        o << "EnergySchedule(n_rounds=" << s.n_rounds << ", lam=" << s.lambda << ")";
        return o.str();
      });

  m.def("allocate_energies", &allocate_energies, py::arg("n_rounds"), py::arg("ed1"), py::arg("mu"),
        py::arg("lam"), py::arg("n0") = 1.0);
  m.def("total_error", &total_error, py::arg("B"), py::arg("schedule"));
  m.def("avg_energy", [](int B, const EnergySchedule& s) { return avg_energy(B, s); }, py::arg("B"),
        py::arg("schedule"));
  m.def(
      "distortion_upper",
      [](int B, const EnergySchedule& s, bool asymptotic) { return distortion_upper(B, s, asymptotic).distortion; },
      py::arg("B"), py::arg("schedule"), py::arg("asymptotic") = false);

  py::class_<DualSchedule>(m, "DualSchedule")
      .def(py::init(&DualSchedule::symmetric), py::arg("ed1"), py::arg("ed2"), py::arg("ec1"), py::arg("lam") = 0.25,
           py::arg("n0") = 1.0, py::arg("B") = 4, py::arg("rho") = 1.0, py::arg("theta") = 1.0)
      .def_readonly("ed11", &DualSchedule::ed11)
      .def_readonly("ed12", &DualSchedule::ed12)
      .def_readonly("ed2", &DualSchedule::ed2)
      .def_readonly("ec11", &DualSchedule::ec11)
      .def_readonly("ec12", &DualSchedule::ec12)
      .def_readonly("B", &DualSchedule::B)
      .def_readonly("rho", &DualSchedule::rho);
  m.def("dual_distortion_uniform", &dual_distortion_uniform, py::arg("schedule"), py::arg("asymptotic") = false);

  m.def(
      "rician_uncorrectable", [](double ec, double lam, double alpha) { return rician_uncorrectable(ec, lam, {alpha, 1.0}); },
      py::arg("ec"), py::arg("lam"), py::arg("alpha"));
  m.def(
      "rician_distortion_two",
      [](int B, const EnergySchedule& s, double alpha) { return rician_distortion_two(B, s, {alpha, s.n0}); },
      py::arg("B"), py::arg("schedule"), py::arg("alpha"));

  m.def(
      "simulate_single",
      [](int B, const EnergySchedule& s, std::uint64_t trials, std::uint64_t seed, double alpha) {
        SimStats st;
        {
          py::gil_scoped_release release;
          st = simulate_single(B, s, trials, seed, alpha);
        }
        return stats_dict(st);
      },
      py::arg("B"), py::arg("schedule"), py::arg("trials") = 10000, py::arg("seed") = 0, py::arg("alpha") = 0.0);
  m.def(
      "simulate_dual",
      [](const DualSchedule& s, Distribution d, std::uint64_t trials, std::uint64_t seed) {
        SimStats st;
        {
          py::gil_scoped_release release;
          st = simulate_dual(s, d, trials, seed);
        }
        return stats_dict(st);
      },
      py::arg("schedule"), py::arg("distribution") = Distribution::UNIFORM, py::arg("trials") = 10000,
      py::arg("seed") = 0);

  m.def(
      "run_config",
      [](const std::string& text, const std::string& format) {
        py::gil_scoped_release release;
        return run_config(text, format);
      },
      py::arg("text"), py::arg("format") = "csv",
      "Runs an experiment described by `key = value` lines and returns the result table.");

  m.attr("__version__") = TWOWAY_VERSION;
}
