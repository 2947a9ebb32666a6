#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "eschlab/errors.hpp"
#include "eschlab/esfem.hpp"
#include "eschlab/lab.hpp"
#include "eschlab/model.hpp"
#include "eschlab/sharp.hpp"

namespace py = pybind11;
using namespace eschlab;

PYBIND11_MODULE(_eschlab, m) {
  m.doc() = "Phase-field and sharp-interface solvers on evolving domains";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InvalidParamsError>(m, "InvalidParamsError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<SingularSystemError>(m, "SingularSystemError", PyExc_RuntimeError);
  py::register_exception<StepUnderflowError>(m, "StepUnderflowError", PyExc_RuntimeError);
  py::register_exception<MeshTanglingError>(m, "MeshTanglingError", PyExc_RuntimeError);

  py::enum_<PotentialKind>(m, "PotentialKind")
      .value("Quartic", PotentialKind::Quartic)
      .value("Logarithmic", PotentialKind::Logarithmic);
  py::enum_<MobilityKind>(m, "MobilityKind")
      .value("Constant", MobilityKind::Constant)
      .value("Degenerate", MobilityKind::Degenerate);
  py::enum_<IntervalKind>(m, "IntervalKind")
      .value("StretchThenStop", IntervalKind::StretchThenStop)
      .value("CompressThenStop", IntervalKind::CompressThenStop)
      .value("FixedUnit", IntervalKind::FixedUnit)
      .value("CotangentGrowth", IntervalKind::CotangentGrowth)
      .value("Stationary", IntervalKind::Stationary);
  py::enum_<Comparison>(m, "Comparison")
      .value("None_", Comparison::None)
      .value("SharpInterval", Comparison::SharpInterval)
      .value("SharpCaps", Comparison::SharpCaps);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("potential", &ModelParams::potential)
      .def_readwrite("mobility", &ModelParams::mobility)
      .def_readwrite("u_a", &ModelParams::u_a)
      .def_readwrite("u_b", &ModelParams::u_b)
      .def_readwrite("epsilon", &ModelParams::epsilon)
      .def_readwrite("mbar", &ModelParams::mbar)
      .def_readwrite("theta", &ModelParams::theta)
      .def_readwrite("theta_c", &ModelParams::theta_c)
      .def_readwrite("k1", &ModelParams::k1)
      .def_readwrite("k2", &ModelParams::k2)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("beta", &ModelParams::beta);

  m.def("quartic_params", &quartic_params, py::arg("u_a") = -1.0, py::arg("u_b") = 1.0,
        py::arg("epsilon") = 0.1, py::arg("mbar") = 1.0);
  m.def("logarithmic_params", &logarithmic_params, py::arg("theta") = 0.5, py::arg("theta_c") = 1.0,
        py::arg("alpha") = -1.0, py::arg("beta") = 1.0, py::arg("epsilon") = 0.1, py::arg("mbar") = 1.0);
  m.def("potential_value", &potential_value);
  m.def("potential_derivative", &potential_derivative);
  m.def("mobility", &mobility);

  py::class_<ProfileSolution>(m, "ProfileSolution")
      .def_readonly("z", &ProfileSolution::z_nodes)
      .def_readonly("u", &ProfileSolution::u_values)
      .def_readonly("du", &ProfileSolution::du_values)
      .def_readonly("s_constant", &ProfileSolution::s_constant)
      .def_readonly("residual", &ProfileSolution::residual);
  m.def("solve_profile", &solve_profile, py::arg("params"), py::arg("truncation") = kDefaultProfileTruncation,
        py::arg("n") = kDefaultProfileNodes);
  m.def("surface_tension_constant", [](const ModelParams& p) { return solve_profile(p).s_constant; },
        py::arg("params"));

  py::class_<SharpCapState>(m, "SharpCapState")
      .def(py::init([](double th1, double th2, double t) { return SharpCapState{th1, th2, t}; }),
           py::arg("theta1"), py::arg("theta2"), py::arg("t") = 0.0)
      .def_readwrite("theta1", &SharpCapState::theta1)
      .def_readwrite("theta2", &SharpCapState::theta2)
      .def_readwrite("t", &SharpCapState::t);
  py::class_<SphereModelParams>(m, "SphereModelParams")
      .def(py::init([](double vbar, double mbar) {
             SphereModelParams p;
             p.vbar = vbar;
             p.mbar = mbar;
             return p;
           }),
           py::arg("vbar") = 0.0, py::arg("mbar") = 1.0)
      .def_readwrite("vbar", &SphereModelParams::vbar)
      .def_readwrite("mbar", &SphereModelParams::mbar)
      .def_readwrite("s_const", &SphereModelParams::s_const)
      .def_readwrite("u_a", &SphereModelParams::u_a)
      .def_readwrite("u_b", &SphereModelParams::u_b);
  py::class_<SharpEvent>(m, "SharpEvent")
      .def_readonly("time", &SharpEvent::time)
      .def_readonly("kind", &SharpEvent::kind);
  py::class_<CapTrajectory>(m, "CapTrajectory")
      .def_readonly("states", &CapTrajectory::states)
      .def_readonly("event", &CapTrajectory::event);
  m.def("cap_rhs", [](const SharpCapState& s, const SphereModelParams& p) {
    const auto r = cap_rhs(s, p);
    return py::make_tuple(r.dtheta1, r.dtheta2);
  });
  m.def("integrate_caps", &integrate_caps, py::arg("initial"), py::arg("params"), py::arg("t_end"),
        py::arg("dt") = kDefaultSharpDt);
  m.def("sharp_energy", py::overload_cast<const SharpCapState&, const SphereModelParams&>(&sharp_energy));

  py::class_<ExperimentPreset>(m, "ExperimentPreset")
      .def_readonly("name", &ExperimentPreset::name)
      .def_readwrite("params", &ExperimentPreset::params)
      .def_readwrite("mbar_list", &ExperimentPreset::mbar_list)
      .def_readwrite("t_end", &ExperimentPreset::t_end)
      .def_readwrite("output_times", &ExperimentPreset::output_times)
      .def_readwrite("epsilon_list", &ExperimentPreset::epsilon_list)
      .def_readwrite("dt", &ExperimentPreset::dt)
      .def_readwrite("n_cells", &ExperimentPreset::n_cells)
      .def_readwrite("out_dir", &ExperimentPreset::out_dir)
      .def_readonly("comparison", &ExperimentPreset::comparison)
      .def("__eq__", [](const ExperimentPreset& a, const ExperimentPreset& b) { return a == b; });
  m.def("preset_names", &preset_names);
  m.def("builtin_preset", [](const std::string& name) { return builtin_preset(name); });
  m.def("parse_config", [](const std::string& text) { return parse_config(text); });
  m.def("render_config", &render_config);

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("t", &TraceRow::t)
      .def_readonly("energy", &TraceRow::energy)
      .def_readonly("mass", &TraceRow::mass)
      .def_readonly("interfaces", &TraceRow::interfaces);
  py::class_<Snapshot>(m, "Snapshot")
      .def_readonly("t", &Snapshot::t)
      .def_readonly("coord", &Snapshot::coord)
      .def_readonly("u", &Snapshot::u)
      .def_readonly("w", &Snapshot::w);
  py::class_<PhaseFieldRun>(m, "PhaseFieldRun")
      .def_readonly("epsilon", &PhaseFieldRun::epsilon)
      .def_readonly("mbar", &PhaseFieldRun::mbar)
      .def_readonly("mass_drift", &PhaseFieldRun::mass_drift)
      .def_readonly("error", &PhaseFieldRun::error)
      .def_property_readonly("ok", &PhaseFieldRun::ok)
      .def_property_readonly("n_cells", [](const PhaseFieldRun& r) { return r.resolution.n_cells; })
      .def_property_readonly("dt", [](const PhaseFieldRun& r) { return r.resolution.dt; })
      .def_property_readonly("trace", [](const PhaseFieldRun& r) { return r.result.trace; })
      .def_property_readonly("snapshots", [](const PhaseFieldRun& r) { return r.result.snapshots; })
      .def_property_readonly("final_coord", [](const PhaseFieldRun& r) { return r.result.final_state.mesh.positions; })
      .def_property_readonly("final_u", [](const PhaseFieldRun& r) { return r.result.final_state.u; });
  py::class_<SummaryRow>(m, "SummaryRow")
      .def_readonly("epsilon", &SummaryRow::epsilon)
      .def_readonly("mbar", &SummaryRow::mbar)
      .def_readonly("final_time", &SummaryRow::final_time)
      .def_readonly("interfaces", &SummaryRow::interfaces)
      .def_readonly("interface_error", &SummaryRow::interface_error)
      .def_readonly("max_energy_gap", &SummaryRow::max_energy_gap)
      .def_readonly("mass_drift", &SummaryRow::mass_drift)
      .def_readonly("status", &SummaryRow::status);
  py::class_<PresetOutcome>(m, "PresetOutcome")
      .def_readonly("exit_code", &PresetOutcome::exit_code)
      .def_readonly("diagnostic", &PresetOutcome::diagnostic)
      .def_readonly("runs", &PresetOutcome::runs)
      .def_readonly("summary", &PresetOutcome::summary)
      .def_property_readonly("sharp_event", [](const PresetOutcome& o) { return o.sharp.event(); })
      .def("sharp_interfaces_at", [](const PresetOutcome& o, double t) { return o.sharp.interfaces_at(t); })
      .def("sharp_energy_at", [](const PresetOutcome& o, double t) { return o.sharp.energy_at(t); });

  m.def(
      "run_preset",
      [](const ExperimentPreset& p, bool write_files, bool gnuplot) {
        py::gil_scoped_release release;
        return run_preset(p, {.write_files = write_files, .gnuplot = gnuplot, .parallel = true});
      },
      py::arg("preset"), py::arg("write_files") = true, py::arg("gnuplot") = false);
}
