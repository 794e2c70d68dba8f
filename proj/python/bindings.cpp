#include "esd/errors.hpp"
#include "esd/sweep.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace esd;

namespace {

py::dict kernels_dict(const KernelValues& k) {
  py::dict d;
  d["alpha"] = k.alpha;
  d["f"] = k.f;
  d["alpha_tilde"] = k.alpha_tilde;
  d["F"] = k.F_int;
  d["gamma_k"] = k.gamma_k;
  return d;
}

py::dict coefficients_dict(const CoefficientSet& c) {
  py::dict d;
  d["eps0"] = c.eps0;
  d["eps_plus"] = c.eps_plus;
  d["eps_minus"] = c.eps_minus;
  d["nu0"] = c.nu0;
  d["nu_plus"] = c.nu_plus;
  d["nu_minus"] = c.nu_minus;
  d["gamma_rate"] = c.gamma_rate;
  return d;
}

py::dict run_dict(const EngineRun& run) {
  py::dict d;
  d["gt"] = run.gt;
  d["concurrence"] = run.concurrence;
  d["errors"] = run.errors;
  d["route"] = run.route;
  return d;
}

// Settings use the config-file keys, e.g. {"state": "Psi", "beta_sq": "0.1:0.9:0.1", "omega0": 10}.
ScenarioConfig config_from(const py::dict& settings) {
  ScenarioConfig config;
  auto text = [](const py::handle& v) -> std::string {
    if (py::isinstance<py::str>(v)) return v.cast<std::string>();
    if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "true" : "false";
    if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
      std::string joined;
      for (const auto& item : v) joined += (joined.empty() ? "" : ",") + py::str(item).cast<std::string>();
      return joined;
    }
    return py::str(v).cast<std::string>();
  };
  if (settings.contains("omega0")) apply_setting(config, "omega0", text(settings["omega0"]));
  for (const auto& [key, value] : settings) {
    const auto k = key.cast<std::string>();
    if (k != "omega0") apply_setting(config, k, text(value));
  }
  return config;
}

py::dict scenario_dict(const FigureScenario& s) {
  py::dict d;
  d["id"] = std::string(to_string(s.id));
  d["state"] = std::string(to_string(s.state));
  d["engine"] = std::string(to_string(s.engine));
  d["omega0"] = s.params.omega0;
  d["omega"] = s.params.omega;
  d["delta"] = s.params.detuning();
  d["g"] = s.params.g;
  d["beta_sq"] = s.beta_sq;
  d["gt_max"] = s.gt_max;
  d["gt_step"] = s.gt_step;
  d["caption"] = s.caption;
  d["notes"] = s.notes;
  d["alternate_omega0"] = s.text_omega0 > 0.0 ? py::object(py::float_(s.text_omega0)) : py::object(py::none());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Concurrence dynamics of two atoms in separate vacuum cavities.";

  auto base = py::register_exception<Error>(m, "EsdError", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init([](double omega0, double omega, double g) {
             SystemParams p{omega0, omega, g};
             p.validate();
             return p;
           }),
           py::arg("omega0") = 1.0, py::arg("omega") = 1.0, py::arg("g") = 1.0)
      .def_static("from_detuning", &SystemParams::from_detuning, py::arg("omega0"), py::arg("delta"),
                  py::arg("g") = 1.0)
      .def_readwrite("omega0", &SystemParams::omega0)
      .def_readwrite("omega", &SystemParams::omega)
      .def_readwrite("g", &SystemParams::g)
      .def_property_readonly("delta", &SystemParams::detuning)
      .def("__repr__", [](const SystemParams& p) {
        return "SystemParams(omega0=" + py::repr(py::float_(p.omega0)).cast<std::string>() +
               ", omega=" + py::repr(py::float_(p.omega)).cast<std::string>() +
               ", g=" + py::repr(py::float_(p.g)).cast<std::string>() + ")";
      });

  m.def("evaluate_kernels", [](double t, const SystemParams& p) { return kernels_dict(evaluate_kernels(t, p)); },
        py::arg("t"), py::arg("params"));
  m.def("coefficient_set", [](double t, const SystemParams& p) { return coefficients_dict(coefficient_set(t, p)); },
        py::arg("t"), py::arg("params"));

  m.def("initial_state",
        [](const std::string& state, double beta_sq, double phase) {
          return Eigen::Matrix4cd(
              initial_state(InitialStateSpec::from_beta_sq(parse_state_kind(state), beta_sq, phase)).rho);
        },
        py::arg("state"), py::arg("beta_sq"), py::arg("phase") = 0.0, "4x4 density matrix over |11>,|10>,|01>,|00>");
  m.def("concurrence_x", [](const Eigen::Matrix4cd& rho) { return concurrence_x(JointState{rho}); }, py::arg("rho"));
  m.def("concurrence_general", [](const Eigen::Matrix4cd& rho) { return concurrence_general(rho); }, py::arg("rho"));

  m.def("transfer_matrices",
        [](const SystemParams& p, const std::vector<double>& t) {
          std::vector<Eigen::Matrix4cd> out;
          for (const auto& tm : build_transfer_matrix(p, t)) out.emplace_back(tm);
          return out;
        },
        py::arg("params"), py::arg("t"), "Single-qubit transfer matrices on (rho11, rho10, rho01, rho00)");

  m.def("run_engine",
        [](const std::string& engine, const std::string& state, double beta_sq, const std::vector<double>& gt,
           const SystemParams& p, int n_cut, double phase) {
          EngineOptions options;
          options.n_cut = n_cut;
          const auto spec = InitialStateSpec::from_beta_sq(parse_state_kind(state), beta_sq, phase);
          py::gil_scoped_release release;
          auto run = run_engine(parse_engine(engine), spec, p, gt, options);
          py::gil_scoped_acquire acquire;
          return run_dict(run);
        },
        py::arg("engine"), py::arg("state"), py::arg("beta_sq"), py::arg("gt"), py::arg("params"),
        py::arg("n_cut") = 40, py::arg("phase") = 0.0);

  m.def("jc_concurrence",
        [](const std::string& state, double beta_sq, const std::vector<double>& t, const SystemParams& p) {
          return jc_reference(InitialStateSpec::from_beta_sq(parse_state_kind(state), beta_sq), p, t).values;
        },
        py::arg("state"), py::arg("beta_sq"), py::arg("t"), py::arg("params"));

  m.def("run_scenario",
        [](const py::dict& settings) {
          const ScenarioConfig config = config_from(settings);
          ScenarioResult result;
          {
            py::gil_scoped_release release;
            result = run_scenario(config);
          }
          py::dict columns;
          std::vector<double> beta_sq, gt, concurrence, trace_res, positivity_res;
          std::vector<std::string> errors;
          for (const auto& r : result.records) {
            beta_sq.push_back(r.beta_sq);
            gt.push_back(r.gt);
            concurrence.push_back(r.concurrence);
            trace_res.push_back(r.trace_residual);
            positivity_res.push_back(r.positivity_residual);
            errors.push_back(r.error);
          }
          columns["engine"] = std::string(to_string(config.engine));
          columns["state"] = std::string(to_string(config.state));
          columns["beta_sq"] = beta_sq;
          columns["gt"] = gt;
          columns["concurrence"] = concurrence;
          columns["trace_residual"] = trace_res;
          columns["positivity_residual"] = positivity_res;
          columns["errors"] = errors;

          py::list series;
          for (const auto& s : result.summary.series) {
            py::dict d;
            d["beta_sq"] = s.beta_sq;
            d["min"] = s.min_concurrence;
            d["max"] = s.max_concurrence;
            d["first_zero"] = s.first_zero ? py::object(py::float_(*s.first_zero)) : py::object(py::none());
            d["revival_count"] = s.revival_count;
            d["revival_peaks"] = s.revival_peaks;
            series.append(d);
          }
          py::dict summary;
          summary["series"] = series;
          summary["max_trace_residual"] = result.summary.max_trace_residual;
          summary["max_positivity_residual"] = result.summary.max_positivity_residual;
          summary["error_count"] = result.summary.error_count;
          summary["routes"] = result.summary.routes;
          summary["max_engine_difference"] = result.summary.max_engine_difference
                                                 ? py::object(py::float_(*result.summary.max_engine_difference))
                                                 : py::object(py::none());
          columns["summary"] = summary;
          return columns;
        },
        py::arg("settings"), "Runs a sweep; settings use the config-file keys.");

  m.def("figure_scenario",
        [](const std::string& id, bool use_text_values) {
          return scenario_dict(figure_scenario(parse_figure_id(id), use_text_values));
        },
        py::arg("id"), py::arg("use_text_values") = false);
  m.def("figure_ids", [] {
    std::vector<std::string> ids;
    for (FigureId id : kAllFigures) ids.emplace_back(to_string(id));
    return ids;
  });

  m.def("cross_validation", [] {
    py::list out;
    for (const auto& c : run_cross_validation()) {
      py::dict d;
      d["name"] = c.name;
      d["measured"] = c.measured;
      d["tolerance"] = c.tolerance;
      d["passed"] = c.passed;
      out.append(d);
    }
    return out;
  });
}
