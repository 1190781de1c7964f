#include "safeforce/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace safeforce {

double kappa_A_inverse(double value, const ScalarShaping& s) {
    if (value < 0) throw RangeError("kappa_A inverse needs a nonnegative value");
    if (value == 0) return 0.0;
    double hi = 1.0;
    while (s.kappa_A(hi) < value) {
        hi *= 2;
        if (hi > 1e12) throw RangeError("value exceeds the range of kappa_A");
    }
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (s.kappa_A(mid) < value ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

const char* to_string(EquilibriumClass c) {
    switch (c) {
        case EquilibriumClass::NearSuccess: return "near-success";
        case EquilibriumClass::Spurious: return "spurious";
        case EquilibriumClass::NotEquilibrium: return "not-equilibrium";
        case EquilibriumClass::Unclassified: return "unclassified";
        case EquilibriumClass::NotApplicable: return "not-applicable";
    }
    return "?";
}

const char* to_string(Check c) {
    switch (c) {
        case Check::Pass: return "pass";
        case Check::Fail: return "FAIL";
        case Check::NotApplicable: return "not applicable";
    }
    return "?";
}

namespace {

Condition cond(std::string name, double residual, double tol) {
    return {std::move(name), residual <= tol, residual};
}

double joint_limit_violation(const Configuration& q, const LimitConfig& lim) {
    double v = 0.0;
    for (Eigen::Index j = 0; j < lim.qm_lower.size(); ++j) {
        v = std::max(v, lim.qm_lower[j] - q[kArm + j]);
        v = std::max(v, q[kArm + j] - lim.qm_upper[j]);
    }
    return v;
}

bool all_ok(const std::vector<Condition>& cs) {
    return std::all_of(cs.begin(), cs.end(), [](const Condition& c) { return c.ok; });
}

}  // namespace

EquilibriumReport classify_equilibrium(const Configuration& q, const RobotModel& model,
                                       const ControllerSettings& cfg, const ForceModel& force,
                                       const EquilibriumTolerances& tol) {
    EquilibriumReport rep;
    const EndEffectorState ee = forward_kinematics(q, model);
    const ControlEval ev = control(q, reaction_force(ee.Z, force), model, cfg);
    if (ev.sol.status != SolveStatus::Feasible) return rep;

    const ScalarShaping& s = cfg.shaping;
    const LimitConfig& lim = cfg.limits;
    const double Z_d = insertion_for_force(s.F_d, force);
    const double Z = ee.Z;
    rep.u_norm = ev.sol.mu.norm();

    double A_max = -1.0;
    if (Z_d - s.Z_d_star > 0) {
        try {
            A_max = kappa_A_inverse(Z_d - s.Z_d_star, s);
        } catch (const RangeError&) {
            A_max = kUnbounded;
        }
    }
    const double jv = joint_limit_violation(q, lim);

    rep.near_success = {
        cond("(a) Z = Z_d", std::abs(Z - Z_d), tol.cond),
        cond("(b) A <= kappa_A^-1(Z_d - Z_d*)", A_max < 0 ? kUnbounded : std::max(0.0, ev.bs.A - A_max),
             tol.cond),
        cond("(c) joints within limits", jv, tol.cond),
    };
    rep.in_near_success = all_ok(rep.near_success);

    double sign_res = 0.0;
    for (std::size_t j = 0; j < model.arm_dof(); ++j) {
        const auto i = static_cast<Eigen::Index>(kArm + j);
        const double sj = ev.grads.r_O[i];
        const bool at_lower = std::abs(q[i] - lim.qm_lower[i - kArm]) <= tol.cond;
        const bool at_upper = std::abs(q[i] - lim.qm_upper[i - kArm]) <= tol.cond;
        double r;
        if (at_lower)
            r = std::max(0.0, -sj);
        else if (at_upper)
            r = std::max(0.0, sj);
        else
            r = std::abs(sj);
        sign_res = std::max(sign_res, r);
    }
    Condition above{"(a) Z > Z_d", Z - Z_d > tol.cond, std::max(0.0, Z_d - Z)};
    rep.spurious = {
        above,
        cond("(b) r_X = r_Y = 0", std::max(std::abs(ev.tc.r_X), std::abs(ev.tc.r_Y)), tol.cond),
        cond("(c) a_y' z = 0", std::abs(model.a_y().dot(ee.z_hat)), tol.cond),
        cond("(d) B = 0", std::abs(ev.bs.B), tol.cond),
        cond("(e) joint sign condition", sign_res, tol.cond),
        cond("(f) joints within limits", jv, tol.cond),
    };
    rep.in_spurious = all_ok(rep.spurious);

    const bool zero = rep.u_norm <= tol.eq;
    if (!zero)
        rep.cls = EquilibriumClass::NotEquilibrium;
    else if (rep.in_near_success)
        rep.cls = EquilibriumClass::NearSuccess;
    else if (rep.in_spurious)
        rep.cls = EquilibriumClass::Spurious;
    else
        rep.cls = EquilibriumClass::Unclassified;
    rep.consistent = zero == (rep.in_near_success || rep.in_spurious);
    return rep;
}

SkktReport verify_skkt(const ControlEval& ev, const ControllerSettings& cfg, double tol,
                       double tol_eq) {
    SkktReport rep;
    rep.applicable = ev.sol.status == SolveStatus::Feasible && ev.sol.mu.norm() <= tol_eq;
    if (!rep.applicable) return rep;

    const double kF = ev.kappa_F;
    const VectorXd dkA = ev.bs.dkappa_A * ev.bs.grad_A;
    const double kB = cfg.shaping.kappa_B(ev.bs.B);
    auto& c = rep.conditions;
    c.push_back(cond("stationarity x", std::abs(kF * dkA[kX]), tol));
    c.push_back(cond("stationarity y", std::abs(kF * dkA[kY]), tol));
    c.push_back(cond("stationarity psi", std::abs(kF * dkA[kPsi]), tol));
    const Eigen::Index m = dkA.size() - kArm;
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index i = kArm + j;
        std::ostringstream name;
        name << "stationarity q_m" << j + 1;
        c.push_back(cond(name.str(),
                         std::abs(kF * dkA[i] - (ev.sol.lambda_lower[i] - ev.sol.lambda_upper[i])),
                         tol));
    }
    c.push_back(cond("complementarity kappa_B(B) kappa_F", std::abs(kB * kF), tol));
    double comp = 0.0, dual = std::max(0.0, -kF);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index i = kArm + j;
        comp = std::max(comp, std::abs(ev.bounds.lower[i] * ev.sol.lambda_lower[i]));
        comp = std::max(comp, std::abs(ev.bounds.upper[i] * ev.sol.lambda_upper[i]));
        dual = std::max({dual, -ev.sol.lambda_lower[i], -ev.sol.lambda_upper[i]});
    }
    c.push_back(cond("complementarity joint bounds", comp, tol));
    c.push_back(cond("primal kappa_B(B) >= 0", std::max(0.0, -kB), tol));
    double jv = 0.0;
    for (Eigen::Index j = 0; j < m; ++j)
        jv = std::max({jv, ev.bounds.lower[kArm + j], -ev.bounds.upper[kArm + j]});
    c.push_back(cond("primal joint bounds admit zero", jv, tol));
    c.push_back(cond("dual feasibility", dual, tol));
    c.push_back(cond("lambda = kappa_F", std::abs(ev.sol.lambda - kF), tol));
    rep.pass = all_ok(c);
    return rep;
}

bool AuditReport::pass() const {
    for (Check c : {barrier, diagram, potential, alignment, joints})
        if (c == Check::Fail) return false;
    return true;
}

AuditReport audit_trajectory(const Trajectory& tr, const ScalarShaping& s,
                             const AuditTolerances& tol) {
    const auto& S = tr.samples;
    const TrajectoryMeta& m = tr.meta;
    if (S.empty()) throw TrajectoryError("trajectory has no samples");
    const auto arm = m.qm_lower.size();
    if (m.qm_upper.size() != arm || m.n != static_cast<std::size_t>(4 + arm))
        throw TrajectoryError("trajectory metadata is inconsistent");
    for (std::size_t k = 0; k < S.size(); ++k) {
        if (static_cast<std::size_t>(S[k].q.size()) != m.n || static_cast<std::size_t>(S[k].u.size()) != m.n)
            throw TrajectoryError("sample has the wrong dimension");
        if (k > 0 && std::abs((S[k].t - S[k - 1].t) - m.dt) > 1e-6 * std::max(1.0, m.dt) + 1e-9)
            throw TrajectoryError("time grid is not uniform");
        if (!S[k].q.allFinite() || !S[k].u.allFinite() || !std::isfinite(S[k].B) ||
            !std::isfinite(S[k].A) || !std::isfinite(S[k].VF))
            throw TrajectoryError("sample contains non-finite values");
    }

    AuditReport r;
    auto interior = [&](const Sample& x) {
        for (Eigen::Index j = 0; j < arm; ++j) {
            const double v = x.q[kArm + j];
            if (!(v > m.qm_lower[j] && v < m.qm_upper[j])) return false;
        }
        return true;
    };
    auto is_jump = [&](std::size_t k) {
        return std::find(m.disturbance_steps.begin(), m.disturbance_steps.end(), k) !=
               m.disturbance_steps.end();
    };
    auto in_P = [&](const Sample& x) { return x.B > 0 && interior(x); };

    const bool barrier_applies = !m.time_varying_reference;
    const bool align_applies = m.z_unbounded && !m.time_varying_reference;
    if (!m.z_unbounded)
        r.alignment_note = "z rate is bounded";
    else if (m.time_varying_reference)
        r.alignment_note = "reference moves";

    bool armed_B = false, armed_J = false, any_B = false, any_J = false, any_V = false, any_A = false;
    r.min_B = kUnbounded;
    for (std::size_t k = 0; k < S.size(); ++k) {
        const Sample& x = S[k];
        if (is_jump(k)) armed_B = armed_J = false;
        if (!armed_B && in_P(x)) {
            armed_B = true;
            if (!r.ever_safe) {
                r.ever_safe = true;
                r.first_safe_step = k;
            }
        }
        if (!armed_J && interior(x)) armed_J = true;

        if (barrier_applies && armed_B) {
            any_B = true;
            r.min_B = std::min(r.min_B, x.B);
            if (x.B < -tol.barrier) r.barrier_fail.push_back(k);
            if (x.Z < m.Z_d_star + s.kappa_A(std::max(0.0, x.A)) - tol.barrier) r.diagram_fail.push_back(k);
        }
        if (armed_J) {
            any_J = true;
            if (!interior(x)) r.joints_fail.push_back(k);
        }
        if (k + 1 < S.size() && !is_jump(k + 1) && in_P(x)) {
            any_V = true;
            const double dV = S[k + 1].VF - x.VF;
            r.max_dVF = std::max(r.max_dVF, dV);
            if (dV > tol.monotone) r.potential_fail.push_back(k + 1);
            if (align_applies) {
                any_A = true;
                const double dA = S[k + 1].A - x.A;
                r.max_dA = std::max(r.max_dA, dA);
                if (dA > tol.monotone) r.alignment_fail.push_back(k + 1);
            }
        }
    }
    auto verdict = [](bool any, const std::vector<std::size_t>& fails) {
        if (!any) return Check::NotApplicable;
        return fails.empty() ? Check::Pass : Check::Fail;
    };
    r.barrier = verdict(any_B, r.barrier_fail);
    r.diagram = verdict(any_B, r.diagram_fail);
    r.potential = verdict(any_V, r.potential_fail);
    r.alignment = verdict(any_A, r.alignment_fail);
    r.joints = verdict(any_J, r.joints_fail);
    if (!any_B) r.min_B = S.back().B;

    r.terminal_force_error = std::abs(S.back().F - m.F_d);
    r.terminal_A = S.back().A;
    try {
        r.alignment_bound = m.Z_d - m.Z_d_star > 0 ? kappa_A_inverse(m.Z_d - m.Z_d_star, s) : 0.0;
    } catch (const RangeError&) {
        r.alignment_bound = kUnbounded;
    }
    r.terminal_alignment_ok = r.terminal_A <= r.alignment_bound + tol.alignment;
    return r;
}

}  // namespace safeforce
