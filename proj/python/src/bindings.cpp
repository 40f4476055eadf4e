#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wavest/diagnostics.hpp"
#include "wavest/errors.hpp"
#include "wavest/harness.hpp"
#include "wavest/presets.hpp"
#include "wavest/solver_semilinear.hpp"

namespace py = pybind11;
using namespace wavest;

namespace {

Nonlinearity parse_nonlinearity(const std::string& name, const WaveProblem& pb) {
  if (name == "default") return pb.g;
  if (name == "none") return Nonlinearity::none();
  if (name == "sine-gordon") return Nonlinearity::sine_gordon();
  throw ConfigError("unknown nonlinearity '" + name + "' (default, none, sine-gordon)");
}

EnergyVariant parse_variant(const std::string& s) {
  for (auto v : {EnergyVariant::LinearNodal, EnergyVariant::SemilinearNodal, EnergyVariant::Hamiltonian})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown energy variant '" + s + "'");
}

VelocitySource parse_source(const std::string& s) {
  for (auto v : {VelocitySource::Reconstruction, VelocitySource::RawTimeDerivative, VelocitySource::Flux})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown velocity source '" + s + "'");
}

py::dict report_dict(const ErrorReport& r) {
  py::dict d;
  for (const auto& n : norm_names()) d[py::str(n)] = norm_value(r, n);
  d["h_t"] = r.h_t;
  d["h_x"] = r.h_x;
  d["p_t"] = r.p_t;
  d["p_x"] = r.p_x;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wavest, m) {
  m.doc() = "Space-time finite element solvers for the 1D wave equation";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<DataError> data_error(m, "DataError", PyExc_RuntimeError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_RuntimeError);
  static py::exception<ConvergenceError> convergence_error(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const DataError& e) {
      py::set_error(data_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    } catch (const ConvergenceError& e) {
      py::set_error(convergence_error, e.what());
    }
  });

  py::class_<WaveProblem>(m, "Problem")
      .def_readonly("name", &WaveProblem::name)
      .def_property_readonly("final_time", [](const WaveProblem& p) { return p.time.final_time(); })
      .def_property_readonly("n_t", [](const WaveProblem& p) { return p.time.slabs(); })
      .def_property_readonly("n_x", [](const WaveProblem& p) { return p.space.elements(); })
      .def_property_readonly("p_t", [](const WaveProblem& p) { return p.time.degree(); })
      .def_property_readonly("p_x", [](const WaveProblem& p) { return p.space.degree(); })
      .def_property_readonly("times", [](const WaveProblem& p) { return p.time.nodes(); })
      .def_property_readonly("coordinates", [](const WaveProblem& p) { return p.space.coordinates(); })
      .def_property_readonly("has_exact", [](const WaveProblem& p) { return p.exact.has_value(); })
      .def("__repr__", [](const WaveProblem& p) {
        return "<Problem " + p.name + " N_t=" + std::to_string(p.time.slabs()) +
               " N_x=" + std::to_string(p.space.elements()) + ">";
      });

  m.def("preset", [](const std::string& name, int n_t, int n_x, int p_t, int p_x) {
        return make_preset(parse_preset(name), n_t, n_x, p_t, p_x);
      }, py::arg("name"), py::arg("n_t"), py::arg("n_x"), py::arg("p_t") = 1, py::arg("p_x") = 1);
  m.def("presets", [] {
    std::vector<std::string> out;
    for (PresetId p : builtin_presets()) out.push_back(to_string(p));
    return out;
  });
  m.def("methods", [] {
    std::vector<std::string> out;
    for (MethodId x : all_methods()) out.push_back(to_string(x));
    return out;
  });

  py::class_<SolutionBundle>(m, "Solution")
      .def_property_readonly("method", [](const SolutionBundle& s) { return to_string(s.method); })
      .def_property_readonly("displacement", [](const SolutionBundle& s) { return s.U.coefficients(); },
                             "Nodal values (spatial DOF, temporal DOF); temporal DOFs are the Gauss-Lobatto nodes of each slab.")
      .def_property_readonly("node_velocity", [](const SolutionBundle& s) { return s.node_velocity; })
      .def_property_readonly("iterations", [](const SolutionBundle& s) { return s.iterations; })
      .def_property_readonly("blowup_slab", [](const SolutionBundle& s) -> py::object {
        if (s.blowup_slab) return py::int_(*s.blowup_slab);
        return py::none();
      })
      .def("at", [](const SolutionBundle& s, double t) { return s.U.at(t); }, py::arg("t"))
      .def("velocity_at", [](const SolutionBundle& s, double t) { return velocity_of(s).at(t); }, py::arg("t"));

  m.def("solve", [](const WaveProblem& pb, const std::string& method, const std::string& nonlinearity,
                    double tolerance, int max_iterations) {
        FixedPointConfig fp;
        fp.tolerance = tolerance;
        fp.max_iterations = max_iterations;
        const Nonlinearity g = parse_nonlinearity(nonlinearity, pb);
        const MethodId id = parse_method(method);
        py::gil_scoped_release release;
        return solve_semilinear(pb, g, id, fp);
      }, py::arg("problem"), py::arg("method") = "stabilized", py::arg("nonlinearity") = "default",
      py::arg("tolerance") = 1e-12, py::arg("max_iterations") = 100);

  m.def("energy", [](const SolutionBundle& s, const WaveProblem& pb, const std::string& variant,
                     const std::string& source, const std::string& nonlinearity) {
        const EnergyTrace tr = energy_trace(s, pb, parse_variant(variant), parse_source(source),
                                            parse_nonlinearity(nonlinearity, pb));
        py::dict d;
        d["times"] = tr.times;
        d["values"] = tr.values;
        d["max_relative_drift"] = tr.max_relative_drift();
        d["growth"] = tr.growth();
        d["potential_inexact"] = tr.potential_inexact;
        return d;
      }, py::arg("solution"), py::arg("problem"), py::arg("variant") = "linear-nodal",
      py::arg("source") = "reconstruction", py::arg("nonlinearity") = "default");

  m.def("error_norms", [](const SolutionBundle& s, const WaveProblem& pb) {
        if (!pb.exact) throw DataError("problem has no exact solution");
        return report_dict(error_norms(s, *pb.exact));
      }, py::arg("solution"), py::arg("problem"));

  m.def("eoc", &eoc, py::arg("h"), py::arg("errors"));

  m.def("sweep", [](const std::string& preset, const std::vector<std::string>& methods,
                    const std::vector<double>& ratios, int n_x, int degree) {
        std::vector<MethodId> ids;
        for (const auto& x : methods) ids.push_back(parse_method(x));
        const SweepReport r = instability_sweep(parse_preset(preset), ids, ratios, n_x, degree);
        py::list out;
        for (const auto& e : r.entries) {
          py::dict d;
          d["method"] = to_string(e.method);
          d["ratio"] = e.ratio;
          d["n_t"] = e.N_t;
          d["n_x"] = e.N_x;
          d["blew_up"] = e.blew_up;
          d["growth"] = e.growth;
          out.append(d);
        }
        return out;
      }, py::arg("preset") = "fig1", py::arg("methods") = std::vector<std::string>{"stabilized", "unstabilized"},
      py::arg("ratios") = std::vector<double>{0.1, 0.5, 1.0, 2.0, 4.0}, py::arg("n_x") = 384, py::arg("degree") = 1);

  m.def("table1", [](int degree) {
        const Table1Report r = table1_matrix(degree);
        py::list out;
        for (const auto& row : r.rows) {
          py::dict d;
          d["method"] = to_string(row.method);
          d["stability"] = to_string(row.stability);
          d["energy"] = to_string(row.energy);
          d["symplecticity"] = to_string(row.symplecticity);
          d["energy_drift"] = row.energy_drift;
          d["symplectic_residual"] = row.symplectic_residual;
          out.append(d);
        }
        return out;
      }, py::arg("degree") = 1);

  m.def("validate_config", [](const std::string& text) { return parse_config(text).hash(); }, py::arg("text"));

  m.def("run_config", [](const std::string& text, bool quick, py::object out) {
        RunOptions o;
        o.quick = quick;
        if (out.is_none()) {
          o.write_files = false;
        } else {
          o.output_dir = py::str(out).cast<std::string>();
        }
        const ExperimentConfig cfg = parse_config(text);
        std::string json;
        {
          py::gil_scoped_release release;
          json = report_json(run(cfg, o));
        }
        return json;
      }, py::arg("text"), py::arg("quick") = false, py::arg("out") = py::none(),
      "Runs a JSON config given as text and returns report.json as text.");
}
