#include "safeforce/controller.hpp"

#include <cmath>

namespace safeforce {

VectorXd baseline_regularization(std::size_t n) {
    if (n < 5) throw ContractViolation("configuration needs at least five entries");
    // Angular weights are per (deg/s)^2; converted to (rad/s)^2.
    const double per_rad = std::pow(rad2deg(1.0), 2);
    VectorXd e = VectorXd::Constant(static_cast<Eigen::Index>(n), 3e-6 * per_rad);
    e[kX] = 0.04;
    e[kY] = 0.04;
    e[kZ] = 0.0;
    e[kPsi] = 4e-5 * per_rad;
    return e;
}

BoxQP QPProblem::as_box_qp() const {
    BoxQP qp;
    qp.H = H;
    qp.f = f;
    qp.c = cbf_row;
    qp.d = cbf_rhs;
    qp.lower = bounds.lower;
    qp.upper = bounds.upper;
    return qp;
}

QPProblem assemble(const VectorXd& grad_rZ, const BarrierState& bs, double kappa_F,
                   const Bounds& bounds, const VectorXd& E_diag, const ScalarShaping& s) {
    const Eigen::Index n = grad_rZ.size();
    if (bs.grad_B.size() != n || E_diag.size() != n || bounds.lower.size() != n ||
        bounds.upper.size() != n)
        throw ContractViolation("QP assembly dimension mismatch");
    if (E_diag[kZ] != 0.0) throw ContractViolation("regularization on z must be zero");
    if ((E_diag.array() < 0).any()) throw ContractViolation("regularization must be nonnegative");
    QPProblem p;
    p.H = 2.0 * (grad_rZ * grad_rZ.transpose());
    p.H.diagonal() += 2.0 * E_diag;
    p.f = 2.0 * kappa_F * grad_rZ;
    p.cbf_row = bs.grad_B;
    p.cbf_rhs = -s.kappa_B(bs.B);
    p.bounds = bounds;
    p.E_diag = E_diag;
    p.kappa_F = kappa_F;
    return p;
}

double objective_W(const QPProblem& p, const VectorXd& mu) {
    return 0.5 * mu.dot(p.H * mu) + p.f.dot(mu) + p.kappa_F * p.kappa_F;
}

QPSolution solve(const QPProblem& p, const VectorXd* warm_start) {
    const BoxQP qp = p.as_box_qp();
    const BoxQPResult r = solve_box_qp(qp, warm_start);
    QPSolution s;
    s.margin = box_support(p.cbf_row, p.bounds) - p.cbf_rhs;
    s.iterations = r.iterations;
    if (r.status == QpStatus::IterationLimit)
        throw ContractViolation("active-set iteration limit reached");
    if (r.status == QpStatus::Infeasible) {
        s.status = SolveStatus::Infeasible;
        s.mu = VectorXd::Zero(p.f.size());
        return s;
    }
    s.status = SolveStatus::Feasible;
    s.mu = r.x;
    s.kkt_residual = kkt_residual(qp, r.x, r.lambda, r.lambda_lower, r.lambda_upper);
    s.lambda = 0.5 * r.lambda;
    s.lambda_lower = 0.5 * r.lambda_lower;
    s.lambda_upper = 0.5 * r.lambda_upper;
    if (r.row_active) s.active_set.push_back(-1);
    for (std::size_t i = 0; i < r.state.size(); ++i)
        if (r.state[i] != BoundState::Free) s.active_set.push_back(static_cast<int>(i));
    s.objective = objective_W(p, s.mu);
    return s;
}

void check_controller_setup(const RobotModel& model, const ControllerSettings& cfg) {
    if (!model.yaw_axis_transversal())
        throw ContractViolation("yaw axis is parallel to the plane normal");
    cfg.limits.validate(model.arm_dof());
    if (static_cast<std::size_t>(cfg.E_diag.size()) != model.dof())
        throw ContractViolation("regularization size does not match the model");
}

ControlEval control(const Configuration& q, double F_measured, const RobotModel& model,
                    const ControllerSettings& cfg) {
    check_controller_setup(model, cfg);
    ControlEval ev;
    ev.chain = chain_state(q, model);
    ev.grads = grad_task(model, ev.chain);
    ev.tc = task_coordinates(ev.chain.ee, cfg.shaping.Z_d_star, cfg.X_ref, cfg.Y_ref);
    ev.bs = barrier(ev.chain.ee, ev.grads, ev.tc, cfg.shaping);
    ev.kappa_F = dVF_drZ(ev.chain.ee.Z, F_measured, cfg.shaping);
    ev.bounds = velocity_bounds(q, cfg.limits);
    ev.problem = assemble(ev.grads.Z, ev.bs, ev.kappa_F, ev.bounds, cfg.E_diag, cfg.shaping);
    ev.sol = solve(ev.problem);
    return ev;
}

}  // namespace safeforce
