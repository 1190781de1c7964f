#include "safeforce/analysis.hpp"
#include "safeforce/io.hpp"
#include "safeforce/scenario.hpp"
#include "safeforce/simulator.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace safeforce;

namespace {

// A preset name or a JSON document.
ScenarioConfig resolve(const std::string& scenario, std::optional<double> dt) {
    nlohmann::json j = scenario.find('{') == std::string::npos ? preset_json(scenario) : parse_scenario_text(scenario);
    if (dt) {
        j["dt"] = *dt;
        j["dt_auto"] = false;
    }
    return parse_scenario(j);
}

py::dict audit_dict(const AuditReport& r) {
    py::dict d;
    d["barrier"] = to_string(r.barrier);
    d["diagram"] = to_string(r.diagram);
    d["potential"] = to_string(r.potential);
    d["alignment"] = to_string(r.alignment);
    d["joints"] = to_string(r.joints);
    d["pass"] = r.pass();
    d["min_B"] = r.min_B;
    d["max_dVF"] = r.max_dVF;
    d["max_dA"] = r.max_dA;
    d["first_safe_step"] = r.ever_safe ? py::object(py::int_(r.first_safe_step)) : py::object(py::none());
    d["terminal_force_error"] = r.terminal_force_error;
    d["terminal_A"] = r.terminal_A;
    d["alignment_bound"] = r.alignment_bound;
    return d;
}

py::dict simulate(const std::string& scenario, std::optional<double> dt) {
    const ScenarioConfig cfg = resolve(scenario, dt);
    Trajectory tr;
    AuditReport audit;
    {
        py::gil_scoped_release nogil;
        const Simulator sim(cfg);
        tr = sim.run();
        audit = audit_trajectory(tr, sim.shaping());
    }
    const auto N = static_cast<Eigen::Index>(tr.samples.size());
    const auto n = static_cast<Eigen::Index>(tr.meta.n);
    Eigen::MatrixXd q(N, n), u(N, n);
    Eigen::VectorXd t(N), F(N), X(N), Y(N), Z(N), A(N), B(N), VF(N);
    for (Eigen::Index k = 0; k < N; ++k) {
        const Sample& s = tr.samples[static_cast<std::size_t>(k)];
        q.row(k) = s.q.transpose();
        u.row(k) = s.u.transpose();
        t[k] = s.t;
        F[k] = s.F;
        X[k] = s.X;
        Y[k] = s.Y;
        Z[k] = s.Z;
        A[k] = s.A;
        B[k] = s.B;
        VF[k] = s.VF;
    }
    py::dict d;
    d["name"] = tr.meta.name;
    d["dt"] = tr.meta.dt;
    d["F_d"] = tr.meta.F_d;
    d["Z_d"] = tr.meta.Z_d;
    d["t"] = t;
    d["q"] = q;
    d["u"] = u;
    d["F"] = F;
    d["X"] = X;
    d["Y"] = Y;
    d["Z"] = Z;
    d["A"] = A;
    d["B"] = B;
    d["V_F"] = VF;
    d["audit"] = audit_dict(audit);
    std::ostringstream csv;
    write_csv(csv, tr);
    d["csv"] = csv.str();
    return d;
}

py::dict control_at(const Eigen::VectorXd& q, const std::string& scenario) {
    const ScenarioConfig cfg = resolve(scenario, std::nullopt);
    const Simulator sim(cfg);
    const ControlEval ev = sim.evaluate(q, 0.0);
    const auto rep = classify_equilibrium(q, cfg.model, cfg.settings(), cfg.force);
    py::dict d;
    d["feasible"] = ev.sol.status == SolveStatus::Feasible;
    d["u"] = ev.sol.mu;
    d["A"] = ev.bs.A;
    d["B"] = ev.bs.B;
    d["Z"] = ev.bs.Z;
    d["kappa_F"] = ev.kappa_F;
    d["lambda"] = ev.sol.lambda;
    d["margin"] = ev.sol.margin;
    d["kkt_residual"] = ev.sol.kkt_residual;
    d["active_set"] = ev.sol.active_set;
    d["equilibrium"] = to_string(rep.cls);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Safe normal-force control of an aerial manipulator: simulation and analysis";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);

    m.def("presets", &preset_names);
    m.def("preset_json", [](const std::string& name) { return preset_json(name).dump(2); }, py::arg("name"));
    m.def("simulate", &simulate, py::arg("scenario"), py::arg("dt") = py::none(),
          "Run a preset (by name) or a scenario JSON string and audit the trajectory.");
    m.def("control", &control_at, py::arg("q"), py::arg("scenario"),
          "Controller output and diagnostics at configuration q.");
    m.def(
        "forward_kinematics",
        [](const Eigen::VectorXd& q, const std::string& scenario) {
            const ScenarioConfig cfg = resolve(scenario, std::nullopt);
            const EndEffectorState ee = forward_kinematics(q, cfg.model);
            return py::make_tuple(Eigen::Vector3d(ee.X, ee.Y, ee.Z), ee.z_hat);
        },
        py::arg("q"), py::arg("scenario"), "End-effector position and tool z axis in the plane frame.");
}
