#include "safeforce/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace safeforce {

bool ReferenceProfile::time_varying() const {
    for (std::size_t i = 1; i < waypoints.size(); ++i)
        if (waypoints[i][1] != waypoints[0][1] || waypoints[i][2] != waypoints[0][2]) return true;
    return false;
}

Eigen::Vector2d ReferenceProfile::at(double t) const {
    if (waypoints.empty()) return Eigen::Vector2d::Zero();
    if (t <= waypoints.front()[0]) return {waypoints.front()[1], waypoints.front()[2]};
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const auto& a = waypoints[i - 1];
        const auto& b = waypoints[i];
        if (t <= b[0]) {
            const double s = b[0] > a[0] ? (t - a[0]) / (b[0] - a[0]) : 1.0;
            return {a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])};
        }
    }
    return {waypoints.back()[1], waypoints.back()[2]};
}

void ScenarioConfig::validate() const {
    model.check(q0);
    limits.validate(model.arm_dof());
    validate_force_model(force);
    if (!(dt > 0)) throw ContractViolation("dt must be positive");
    if (!(duration >= dt)) throw ContractViolation("duration must be at least dt");
    if (!(Z_d_star < 0)) throw ContractViolation("Z_d_star must be negative");
    if (!(F_d < 0)) throw ContractViolation("F_d must be negative");
    for (std::size_t i = 1; i < reference.waypoints.size(); ++i)
        if (reference.waypoints[i][0] < reference.waypoints[i - 1][0])
            throw ContractViolation("reference waypoints must be ordered in time");
    for (const auto& d : disturbances)
        if (static_cast<std::size_t>(d.dq.size()) != model.dof())
            throw ContractViolation("disturbance size does not match the model");
    check_controller_setup(model, settings());
}

double ScenarioConfig::effective_dt() const {
    if (!dt_auto) return dt;
    return std::min(dt, 25.0 / max_stiffness(force));
}

ControllerSettings ScenarioConfig::settings() const {
    ControllerSettings s;
    s.shaping = make_shaping(shaping, F_d, Z_d_star);
    s.limits = limits;
    s.E_diag = E_diag;
    return s;
}

Simulator::Simulator(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    settings_ = cfg_.settings();
    Z_d_ = insertion_for_force(cfg_.F_d, cfg_.force);
}

ControlEval Simulator::evaluate(const Configuration& q, double t) const {
    ControllerSettings s = settings_;
    const Eigen::Vector2d ref = cfg_.reference.at(t);
    s.X_ref = ref.x();
    s.Y_ref = ref.y();
    const EndEffectorState ee = forward_kinematics(q, cfg_.model);
    return control(q, reaction_force(ee.Z, cfg_.force), cfg_.model, s);
}

Configuration Simulator::step(const Configuration& q, double t, double dt, bool* held) const {
    return rk4(q, t, dt, evaluate(q, t).sol, held);
}

Configuration Simulator::rk4(const Configuration& q, double t, double dt, const QPSolution& first,
                             bool* held) const {
    if (!(dt > 0)) throw ContractViolation("dt must be positive");
    bool ok = first.status == SolveStatus::Feasible;
    auto u = [&](const Configuration& x, double tt) -> VectorXd {
        const ControlEval ev = evaluate(x, tt);
        if (ev.sol.status != SolveStatus::Feasible) ok = false;
        return ev.sol.mu;
    };
    const VectorXd& k1 = first.mu;
    const VectorXd k2 = u(q + 0.5 * dt * k1, t + 0.5 * dt);
    const VectorXd k3 = u(q + 0.5 * dt * k2, t + 0.5 * dt);
    const VectorXd k4 = u(q + dt * k3, t + dt);
    if (held) *held = !ok;
    if (!ok) return q;
    return q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Sample Simulator::make_sample(double t, const Configuration& q, const ControlEval& ev) const {
    Sample s;
    s.t = t;
    s.q = q;
    s.u = ev.sol.mu;
    s.X = ev.chain.ee.X;
    s.Y = ev.chain.ee.Y;
    s.Z = ev.chain.ee.Z;
    s.F = reaction_force(s.Z, cfg_.force);
    s.r_O = ev.tc.r_O;
    s.A = ev.bs.A;
    s.B = ev.bs.B;
    s.kappa_F = ev.kappa_F;
    s.VF = potential_VF(s.Z - Z_d_, Z_d_, cfg_.force, settings_.shaping);
    s.VF_dot = ev.kappa_F * ev.grads.Z.dot(ev.sol.mu);
    s.lambda = ev.sol.lambda;
    const Eigen::Vector2d ref = cfg_.reference.at(t);
    s.X_ref = ref.x();
    s.Y_ref = ref.y();
    s.feasible = ev.sol.status == SolveStatus::Feasible;
    std::ostringstream os;
    for (std::size_t i = 0; i < ev.sol.active_set.size(); ++i) {
        if (i) os << ';';
        if (ev.sol.active_set[i] < 0)
            os << "cbf";
        else
            os << ev.sol.active_set[i];
    }
    s.active = os.str();
    return s;
}

Trajectory Simulator::run(const SolveObserver& observer) const {
    const double dt = cfg_.effective_dt();
    const auto steps = static_cast<std::size_t>(std::llround(cfg_.duration / dt));
    Trajectory tr;
    tr.meta.name = cfg_.name;
    tr.meta.n = cfg_.model.dof();
    tr.meta.dt = dt;
    tr.meta.F_d = cfg_.F_d;
    tr.meta.Z_d = Z_d_;
    tr.meta.Z_d_star = cfg_.Z_d_star;
    tr.meta.z_unbounded = cfg_.limits.z_unbounded();
    tr.meta.time_varying_reference = cfg_.reference.time_varying();
    tr.meta.qm_lower = cfg_.limits.qm_lower;
    tr.meta.qm_upper = cfg_.limits.qm_upper;
    tr.samples.reserve(steps + 1);

    std::vector<Disturbance> pending = cfg_.disturbances;
    std::stable_sort(pending.begin(), pending.end(),
                     [](const Disturbance& a, const Disturbance& b) { return a.time < b.time; });
    std::size_t next_dist = 0;

    Configuration q = cfg_.q0;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        const ControlEval ev = evaluate(q, t);
        if (observer) observer(t, ev);
        tr.samples.push_back(make_sample(t, q, ev));
        if (k == steps) break;
        bool held = false;
        q = rk4(q, t, dt, ev.sol, &held);
        if (held) ++tr.meta.held_steps;
        const double t_next = static_cast<double>(k + 1) * dt;
        bool jumped = false;
        while (next_dist < pending.size() && pending[next_dist].time < t_next) {
            q += pending[next_dist].dq;
            ++next_dist;
            jumped = true;
        }
        if (jumped) tr.meta.disturbance_steps.push_back(k + 1);
    }
    return tr;
}

Trajectory run_scenario(const ScenarioConfig& cfg) { return Simulator(cfg).run(); }

}  // namespace safeforce
