#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bohm2p/checks.hpp"
#include "bohm2p/dynamics.hpp"
#include "bohm2p/ensemble.hpp"
#include "bohm2p/errors.hpp"
#include "bohm2p/scenario.hpp"
#include "bohm2p/statistics.hpp"
#include "bohm2p/wavefunction.hpp"

namespace py = pybind11;
using namespace bohm2p;

namespace {

// Coordinates are passed flat: (x1, y1, x2, y2) for 2D models, (x1, x2) for 1D.
ConfigPoint to_point(const WaveModel& model, const std::vector<double>& coords, double t) {
  const std::size_t d = model.dimension();
  if (coords.size() != 2 * d) {
    throw DimensionMismatch("expected " + std::to_string(2 * d) + " coordinates, got " +
                            std::to_string(coords.size()));
  }
  ConfigPoint p{Coords::zeros(d), Coords::zeros(d), t};
  for (std::size_t i = 0; i < d; ++i) {
    p.r1[i] = coords[i];
    p.r2[i] = coords[d + i];
  }
  return p;
}

std::vector<double> flatten(const Coords& a, const Coords& b) {
  std::vector<double> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Bounds to_bounds(const std::pair<std::optional<double>, std::optional<double>>& b) {
  Bounds out;
  if (b.first) out.lo = *b.first;
  if (b.second) out.hi = *b.second;
  return out;
}

Region to_region(const std::pair<std::optional<double>, std::optional<double>>& x) {
  Region r{to_bounds(x), {}};
  r.validate();
  return r;
}

py::array_t<double> points_array(const std::vector<ConfigPoint>& points, std::size_t d,
                                 bool with_time) {
  const std::size_t cols = 2 * d + (with_time ? 1 : 0);
  py::array_t<double> out({points.size(), cols});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t c = 0;
    if (with_time) view(i, c++) = points[i].t;
    for (double v : points[i].r1) view(i, c++) = v;
    for (double v : points[i].r2) view(i, c++) = v;
  }
  return out;
}

Composition parse_composition(const std::string& name) {
  if (name == "symmetrized") return Composition::Symmetrized;
  if (name == "product") return Composition::Product;
  throw InvalidArgument("composition must be 'symmetrized' or 'product', got '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_bohm2p, m) {
  m.doc() = "Two-particle Bohmian trajectories through a symmetric two-slit geometry";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<ConfigError> config_error(m, "ConfigError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<WaveModel>(m, "Model")
      .def_static(
          "plane_wave_pair",
          [](double kx, double ky, double hbar, double mass) {
            return WaveModel(PlaneWavePair{kx, ky}, {hbar, mass});
          },
          py::arg("kx") = 1.0, py::arg("ky") = 1.0, py::arg("hbar") = 1.0, py::arg("mass") = 1.0)
      .def_static(
          "oscillator_pair",
          [](double omega, double a, double hbar, double mass) {
            return WaveModel(OscillatorPair{omega, a}, {hbar, mass});
          },
          py::arg("omega") = 1.0, py::arg("a") = 1.0, py::arg("hbar") = 1.0,
          py::arg("mass") = 1.0)
      .def_static(
          "gaussian_slit",
          [](double sigma0, double a, double kx, double ky, const std::string& composition,
             double hbar, double mass) {
            return WaveModel(GaussianSlit{sigma0, a, kx, ky, parse_composition(composition)},
                             {hbar, mass});
          },
          py::arg("sigma0") = 1.0, py::arg("a") = 10.0, py::arg("kx") = 0.0,
          py::arg("ky") = 0.0, py::arg("composition") = "symmetrized", py::arg("hbar") = 1.0,
          py::arg("mass") = 1.0)
      .def_property_readonly("name", [](const WaveModel& w) { return std::string(w.name()); })
      .def_property_readonly("dimension", &WaveModel::dimension)
      .def_property_readonly("normalizable", &WaveModel::normalizable)
      .def("__repr__",
           [](const WaveModel& w) { return "<bohm2p.Model " + std::string(w.name()) + ">"; });

  m.def(
      "evaluate",
      [](const WaveModel& w, const std::vector<double>& coords, double t) {
        return evaluate(w, to_point(w, coords, t));
      },
      py::arg("model"), py::arg("coords"), py::arg("t"),
      "Unnormalized amplitude Psi at the flat coordinates (x1, [y1,] x2, [y2]).");

  m.def(
      "velocity",
      [](const WaveModel& w, const std::vector<double>& coords, double t) {
        const VelocityPair v = velocity(w, to_point(w, coords, t));
        return flatten(v.v1, v.v2);
      },
      py::arg("model"), py::arg("coords"), py::arg("t"),
      "Guidance velocities of both particles, flattened like the coordinates.");

  m.def(
      "velocity_sum_x",
      [](const WaveModel& w, const std::vector<double>& coords, double t) {
        return velocity_sum_x(w, to_point(w, coords, t));
      },
      py::arg("model"), py::arg("coords"), py::arg("t"),
      "Closed-form v1x + v2x for Gaussian-slit models.");

  m.def("normalization_constant", &normalization_constant, py::arg("model"), py::arg("t"));

  m.def(
      "integrate",
      [](const WaveModel& w, const std::vector<double>& coords, const std::vector<double>& times,
         double rel_tol, double abs_tol) {
        IntegratorSettings s;
        s.rel_tol = rel_tol;
        s.abs_tol = abs_tol;
        if (times.empty()) throw InvalidArgument("times must not be empty");
        const ConfigPoint start = to_point(w, coords, times.front());
        Trajectory traj;
        {
          py::gil_scoped_release release;
          traj = integrate(w, start, times, s);
        }
        return py::make_tuple(points_array(traj.points, w.dimension(), true),
                              std::string(to_string(traj.status)));
      },
      py::arg("model"), py::arg("coords"), py::arg("times"), py::arg("rel_tol") = 1e-9,
      py::arg("abs_tol") = 1e-11,
      "Integrates from coords at times[0]; returns (rows of t, coords..., status).");

  m.def(
      "sample_initial",
      [](const WaveModel& w, std::size_t n_samples, std::uint64_t seed, std::size_t burn_in,
         std::size_t thinning, unsigned threads) {
        SamplerSettings s;
        s.n_samples = n_samples;
        s.seed = seed;
        s.burn_in = burn_in;
        s.thinning = thinning;
        SampleSet set;
        {
          py::gil_scoped_release release;
          set = sample_initial(w, s, threads);
        }
        return py::make_tuple(points_array(set.points, w.dimension(), false),
                              set.acceptance_rate);
      },
      py::arg("model"), py::arg("n_samples"), py::arg("seed") = 0, py::arg("burn_in") = 5000,
      py::arg("thinning") = 20, py::arg("threads") = 0,
      "Metropolis samples from |Psi(0)|^2; returns (points, acceptance_rate).");

  m.def(
      "joint_probability",
      [](const WaveModel& w, std::pair<std::optional<double>, std::optional<double>> x1,
         std::pair<std::optional<double>, std::optional<double>> x2, double t) {
        return joint_probability(w, to_region(x1), to_region(x2), t);
      },
      py::arg("model"), py::arg("x1"), py::arg("x2"), py::arg("t"),
      "Probability that one particle has x in the first interval and the other in the "
      "second; None marks an open end.");

  m.def("ks_critical_value", &ks_critical_value, py::arg("n"), py::arg("alpha") = 0.01);

  m.def("builtin_scenarios", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const BuiltinScenario& b : builtin_scenarios()) {
      out.emplace_back(std::string(b.name), std::string(b.summary));
    }
    return out;
  });

  m.def(
      "_run_scenario",
      [](const std::string& source, bool is_text, std::optional<std::string> out_dir,
         std::optional<std::uint64_t> seed, unsigned threads, bool write_files) {
        const ScenarioConfig cfg = is_text ? parse_scenario_text(source) : load_scenario(source);
        RunOptions opts;
        if (out_dir) opts.out_dir = *out_dir;
        opts.seed = seed;
        opts.threads = threads;
        opts.write_files = write_files;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(cfg, opts);
        }
        return r.report.dump();
      },
      py::arg("source"), py::arg("is_text"), py::arg("out_dir"), py::arg("seed"),
      py::arg("threads"), py::arg("write_files"));

  m.def(
      "_run_checks",
      [](std::optional<std::vector<std::string>> suites, bool fast, std::uint64_t seed) {
        CheckOptions opts;
        opts.fast = fast;
        opts.seed = seed;
        opts.suites = suites ? *suites : all_check_suites();
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_checks(opts);
        }
        return r.report.dump();
      },
      py::arg("suites"), py::arg("fast"), py::arg("seed"));

  m.def("check_suites", &all_check_suites);
}
