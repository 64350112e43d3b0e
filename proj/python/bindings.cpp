// Copyright 2026 The lsw Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lsw/dynamics.hpp"
#include "lsw/error.hpp"
#include "lsw/experiments.hpp"
#include "lsw/kernel.hpp"
#include "lsw/measures.hpp"
#include "lsw/observables.hpp"
#include "lsw/orbits.hpp"
#include "lsw/pot.hpp"
#include "lsw/weights.hpp"

namespace py = pybind11;
using namespace lsw;

namespace {

using StateArray = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

StateArray to_array(const std::vector<State>& states) {
  StateArray out(static_cast<Eigen::Index>(states.size()), 3);
  for (std::size_t i = 0; i < states.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = states[i].transpose();
  return out;
}

std::vector<State> from_array(const StateArray& a) {
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) out.emplace_back(a.row(i).transpose());
  return out;
}

Trajectory trajectory_of(const StateArray& samples, double dt) {
  Trajectory t;
  t.dt = dt;
  t.samples = from_array(samples);
  return t;
}

IntegratorOptions options(double tol) {
  IntegratorOptions o;
  o.tol = Tolerance{tol, tol};
  return o;
}

CorrelationSystem make_system(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  CorrelationSystem s;
  s.A = A;
  s.b = b;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weighted estimates of chaotic time averages from reference measures.";

  static py::exception<Error> lsw_error(m, "LswError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // Same "<code>: <message>" form as the command-line tool.
      PyErr_SetString(lsw_error.ptr(), (std::string(error_code_name(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Params>(m, "Params")
      .def(py::init<>())
      .def(py::init([](double s, double r, double b) {
             Params p{s, r, b};
             p.validate();
             return p;
           }),
           py::arg("sigma"), py::arg("rho"), py::arg("beta"))
      .def_readwrite("sigma", &Params::sigma)
      .def_readwrite("rho", &Params::rho)
      .def_readwrite("beta", &Params::beta)
      .def("divergence", &Params::divergence)
      .def("__repr__", [](const Params& p) {
        std::ostringstream o;
        o << "Params(sigma=" << p.sigma << ", rho=" << p.rho << ", beta=" << p.beta << ")";
        return o.str();
      });

  // dynamics
  m.def("vector_field", &vector_field, py::arg("state"), py::arg("params") = Params{});
  m.def("jacobian", &jacobian, py::arg("state"), py::arg("params") = Params{});
  m.def(
      "integrate",
      [](const State& s0, const Params& p, double t_span, double dt_out, double tol) {
        return to_array(integrate(s0, p, t_span, dt_out, options(tol)).samples);
      },
      py::arg("state"), py::arg("params") = Params{}, py::arg("t_span"), py::arg("dt_out"), py::arg("tol") = 1e-10,
      "Samples at t = 0, dt_out, 2 dt_out, ... as an (n, 3) array.");
  m.def(
      "integrate_with_tangent",
      [](const State& s0, const Params& p, double t_span, double tol) {
        const TangentBundle b = integrate_with_tangent(s0, p, t_span, options(tol));
        return py::make_tuple(b.state, b.deviation);
      },
      py::arg("state"), py::arg("params") = Params{}, py::arg("t_span"), py::arg("tol") = 1e-10,
      "Final state and the 3x3 linearized flow map.");
  m.def(
      "lyapunov_benettin",
      [](const Params& p, double t_total, double t_renorm, std::uint64_t seed) {
        py::gil_scoped_release release;
        return lyapunov_benettin(p, t_total, t_renorm, seed);
      },
      py::arg("params") = Params{}, py::arg("t_total"), py::arg("t_renorm") = 1.0, py::arg("seed") = 1);
  m.def(
      "chaotic_samples",
      [](const Params& p, std::size_t count, double dt, std::uint64_t seed) {
        return to_array(chaotic_samples(p, count, dt, seed).samples);
      },
      py::arg("params") = Params{}, py::arg("count"), py::arg("dt") = 2.0, py::arg("seed") = 1);

  // orbits
  m.def("complete_library_sizes", &complete_library_sizes, py::arg("l_max"));
  m.def("primitive_necklace_count", &primitive_necklace_count, py::arg("n"));
  m.def("enumerate_primitive_words", &enumerate_primitive_words, py::arg("l_max"));
  m.def("canonical_rotation", &canonical_rotation, py::arg("word"));
  m.def("mirror_word", &mirror_word, py::arg("word"));

  py::class_<PeriodicOrbit>(m, "PeriodicOrbit")
      .def_readonly("id", &PeriodicOrbit::id)
      .def_readonly("symbol", &PeriodicOrbit::symbol)
      .def_readonly("period", &PeriodicOrbit::period)
      .def_readonly("floquet_exponent", &PeriodicOrbit::floquet_exponent)
      .def_readonly("multipliers", &PeriodicOrbit::multipliers)
      .def_property_readonly("start", [](const PeriodicOrbit& o) { return State(o.start()); })
      .def_property_readonly("nodes", [](const PeriodicOrbit& o) { return to_array(o.nodes); })
      .def(
          "sample",
          [](const PeriodicOrbit& o, const Params& p, double dt) { return to_array(sample_orbit(o, p, dt)); },
          py::arg("params") = Params{}, py::arg("dt") = 0.01)
      .def(
          "closure_residual", [](const PeriodicOrbit& o, const Params& p) { return closure_residual(o, p); },
          py::arg("params") = Params{})
      .def("__repr__", [](const PeriodicOrbit& o) {
        std::ostringstream s;
        s << "PeriodicOrbit(" << o.symbol << ", T=" << o.period << ", lambda=" << o.floquet_exponent << ")";
        return s.str();
      });

  py::class_<OrbitLibrary>(m, "OrbitLibrary")
      .def_readonly("orbits", &OrbitLibrary::orbits)
      .def_readonly("ordering", &OrbitLibrary::ordering)
      .def("__len__", &OrbitLibrary::size)
      .def("__getitem__", [](const OrbitLibrary& l, std::size_t i) {
        if (i >= l.size()) throw py::index_error();
        return l.orbits[i];
      })
      .def("save", [](const OrbitLibrary& l, const std::string& path) { save_library(l, path); }, py::arg("path"))
      .def_static("load", [](const std::string& path) { return load_library(path); }, py::arg("path"));

  m.def(
      "build_complete_library",
      [](int l_max, const Params& p, std::uint64_t seed) {
        SearchBudget budget;
        budget.seed = seed;
        py::gil_scoped_release release;
        return build_complete_library(l_max, p, budget);
      },
      py::arg("l_max"), py::arg("params") = Params{}, py::arg("seed") = 1);
  m.def(
      "permuted_library", [](const OrbitLibrary& l, int r, std::uint64_t seed) { return permuted_library(l, r, seed); },
      py::arg("library"), py::arg("r"), py::arg("seed") = 1);

  // measures
  py::enum_<MeasureKind>(m, "MeasureKind")
      .value("orbit", MeasureKind::kOrbit)
      .value("snippet", MeasureKind::kSnippet)
      .value("discrete", MeasureKind::kDiscrete);

  py::class_<ReferenceMeasure>(m, "ReferenceMeasure")
      .def_readonly("kind", &ReferenceMeasure::kind)
      .def_readonly("id", &ReferenceMeasure::id)
      .def_readonly("duration", &ReferenceMeasure::duration)
      .def_property_readonly("points", [](const ReferenceMeasure& r) { return to_array(r.points); })
      .def_readonly("weights", &ReferenceMeasure::weights)
      .def("__len__", &ReferenceMeasure::size)
      .def(
          "average", [](const ReferenceMeasure& r, const ObservableFn& a) { return measure_average(r, a); },
          py::arg("observable"));

  m.def(
      "orbit_measures",
      [](const OrbitLibrary& lib, const Params& p, double spacing) { return orbit_measures(lib, p, spacing); },
      py::arg("library"), py::arg("params") = Params{}, py::arg("max_spacing") = 0.01);
  m.def(
      "discrete_measure",
      [](const std::string& id, const StateArray& atoms, const std::vector<double>& masses) {
        return discrete_measure(id, from_array(atoms), masses);
      },
      py::arg("id"), py::arg("atoms"), py::arg("masses"));
  m.def(
      "snippet_measures",
      [](const Params& p, double total, int count, std::uint64_t seed, double spacing) {
        return snippet_measures(sample_snippets(p, total, count, seed, spacing));
      },
      py::arg("params") = Params{}, py::arg("total_duration"), py::arg("count"), py::arg("seed") = 1,
      py::arg("max_spacing") = 0.01);

  // observables
  m.def("basis_tags", [] {
    std::vector<std::string> tags;
    for (const Observable& o : basis()) tags.push_back(o.tag);
    return tags;
  });
  m.def(
      "evaluate",
      [](const std::string& tag, const StateArray& states) {
        const Observable& o = basis_observable(tag);
        Eigen::VectorXd out(states.rows());
        for (Eigen::Index i = 0; i < states.rows(); ++i) out[i] = o(states.row(i).transpose());
        return out;
      },
      py::arg("tag"), py::arg("states"));
  m.def(
      "measure_averages",
      [](const std::vector<ReferenceMeasure>& ms, const std::string& tag) {
        return measure_averages(ms, basis_observable(tag).fn);
      },
      py::arg("measures"), py::arg("tag"));
  m.def(
      "estimate_average",
      [](const Eigen::VectorXd& w, const std::vector<double>& per_measure) { return estimate_average(w, per_measure); },
      py::arg("weights"), py::arg("per_measure"));

  // kernel
  py::enum_<KernelMode>(m, "KernelMode")
      .value("gaussian", KernelMode::kGaussian)
      .value("atom_overlap", KernelMode::kAtomOverlap);

  py::class_<CorrelationSystem>(m, "CorrelationSystem")
      .def(py::init(&make_system), py::arg("A"), py::arg("b"))
      .def_readonly("A", &CorrelationSystem::A)
      .def_readonly("b", &CorrelationSystem::b)
      .def_readonly("theta", &CorrelationSystem::theta)
      .def_readonly("N", &CorrelationSystem::N)
      .def_readonly("ids", &CorrelationSystem::ids)
      .def("__len__", &CorrelationSystem::size)
      .def("save", [](const CorrelationSystem& s, const std::string& path) { save_system(s, path); }, py::arg("path"))
      .def_static("load", [](const std::string& path) { return load_system(path); }, py::arg("path"));

  m.def(
      "correlation_matrix",
      [](const std::vector<ReferenceMeasure>& ms, double theta, KernelMode mode) {
        return correlation_matrix(ms, KernelConfig{theta, mode});
      },
      py::arg("measures"), py::arg("theta") = 100.0, py::arg("mode") = KernelMode::kGaussian);
  m.def("check_correlation_matrix", &check_correlation_matrix, py::arg("A"));
  m.def(
      "build_system",
      [](const std::vector<ReferenceMeasure>& ms, const StateArray& samples, double theta, KernelMode mode,
         std::size_t N) {
        const Trajectory t = trajectory_of(samples, 1.0);
        const std::size_t n = N == 0 ? t.size() : N;
        py::gil_scoped_release release;
        return build_system(ms, t, KernelConfig{theta, mode}, n);
      },
      py::arg("measures"), py::arg("samples"), py::arg("theta") = 100.0, py::arg("mode") = KernelMode::kGaussian,
      py::arg("N") = 0);
  m.def(
      "theta_scan",
      [](const std::vector<ReferenceMeasure>& ms, const std::string& grid) {
        const ThetaScan s = theta_scan(ms, parse_theta_grid(grid));
        std::vector<double> th, d1, d0;
        for (const ThetaScanPoint& p : s.points) {
          th.push_back(p.theta);
          d1.push_back(p.distance_ones);
          d0.push_back(p.distance_identity);
        }
        py::dict out;
        out["theta"] = th;
        out["distance_ones"] = d1;
        out["distance_identity"] = d0;
        out["theta_star"] = s.theta_star;
        return out;
      },
      py::arg("measures"), py::arg("grid") = "1e-2:1e6:log25");

  // weights
  py::enum_<WeightMethod>(m, "WeightMethod")
      .value("lsw", WeightMethod::kLsw)
      .value("nnls", WeightMethod::kNnls)
      .value("constrained", WeightMethod::kConstrained)
      .value("markov", WeightMethod::kMarkov)
      .value("uniform", WeightMethod::kUniform)
      .value("pot", WeightMethod::kPot);

  py::class_<WeightVector>(m, "WeightVector")
      .def_readonly("w", &WeightVector::w)
      .def_readonly("method", &WeightVector::method)
      .def_readonly("kind", &WeightVector::kind)
      .def_readonly("support", &WeightVector::support)
      .def_readonly("converged", &WeightVector::converged)
      .def_readonly("iterations", &WeightVector::iterations)
      .def("total", &WeightVector::total)
      .def("__len__", &WeightVector::size)
      .def("save", [](const WeightVector& w, const std::string& path) { save_weights(w, path); }, py::arg("path"))
      .def_static("load", [](const std::string& path) { return load_weights(path); }, py::arg("path"));

  m.def("solve_tikhonov", &solve_tikhonov, py::arg("system"), py::arg("alpha") = 1e-10);
  m.def("solve_nnls_normalized", &solve_nnls_normalized, py::arg("system"));
  m.def(
      "solve_constrained",
      [](const CorrelationSystem& s, const Eigen::VectorXd& w0, long long max_iterations, double tol) {
        ConstrainedOptions opt;
        opt.max_iterations = max_iterations;
        opt.tol = tol;
        return solve_constrained(s, w0, opt).weights;
      },
      py::arg("system"), py::arg("w0"), py::arg("max_iterations") = 100000, py::arg("tol") = 1e-10);
  m.def(
      "nnls",
      [](const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
        const NnlsResult r = nnls(A, b);
        return py::make_tuple(r.x, r.dual);
      },
      py::arg("A"), py::arg("b"), "Solution and dual vector A^T (b - A x).");
  m.def("project_to_simplex", &project_to_simplex, py::arg("v"));
  m.def(
      "markov_weights",
      [](const std::vector<ReferenceMeasure>& ms, const StateArray& samples, std::size_t N) {
        const Trajectory t = trajectory_of(samples, 1.0);
        return markov_weights(ms, t, N == 0 ? t.size() : N);
      },
      py::arg("measures"), py::arg("samples"), py::arg("N") = 0);
  m.def("uniform_weights", &uniform_weights, py::arg("P"));
  m.def(
      "normalize_exact",
      [](Eigen::VectorXd w) {
        normalize_exact(w);
        return w;
      },
      py::arg("w"));

  // periodic orbit theory
  m.def(
      "pot_weights", [](const OrbitLibrary& lib, int n) { return pot_weights(CycleData::from_library(lib), n); },
      py::arg("library"), py::arg("n"));
  m.def(
      "pot_average",
      [](const OrbitLibrary& lib, int n, const std::vector<double>& a) {
        return pot_average(CycleData::from_library(lib), n, a);
      },
      py::arg("library"), py::arg("n"), py::arg("per_orbit"));
  m.def(
      "pot_escape_rate", [](const OrbitLibrary& lib, int n) { return newton_root(CycleData::from_library(lib), n).s0; },
      py::arg("library"), py::arg("n"), "Leading root s0 of the truncated spectral determinant.");
  m.def("complete_truncation", &complete_truncation, py::arg("library"), py::arg("P"));
  m.def(
      "lyapunov_estimate",
      [](const WeightVector& w, const OrbitLibrary& lib) {
        std::vector<double> lam;
        for (const PeriodicOrbit& o : lib.orbits) lam.push_back(o.floquet_exponent);
        return lyapunov_estimate(w, lam);
      },
      py::arg("weights"), py::arg("library"));

  // experiments
  m.def("relative_error", &relative_error, py::arg("e_true"), py::arg("e_hat"), py::arg("variance"));
  m.def("permutation", &permutation, py::arg("P"), py::arg("r"), py::arg("seed") = 1);
  m.def(
      "run_sweep",
      [](const std::string& config_text, const OrbitLibrary& lib) {
        ExperimentConfig cfg;
        std::istringstream in(config_text);
        cfg.load(in);
        SweepResult res;
        {
          py::gil_scoped_release release;
          res = run_sweep(cfg, lib);
        }
        py::list summary;
        for (const SummaryRow& r : res.summary) {
          py::dict d;
          d["method"] = std::string(method_name(r.method));
          d["kind"] = std::string(kind_name(r.kind));
          d["P"] = r.P;
          d["N"] = r.N;
          d["observable"] = r.observable;
          d["median"] = r.median;
          d["q25"] = r.q25;
          d["q75"] = r.q75;
          summary.append(d);
        }
        return summary;
      },
      py::arg("config"), py::arg("library"),
      "Runs a sweep from `key = value` config text; returns the summary rows.");
}
