#pragma once

#include "safeforce/kinematics.hpp"
#include "safeforce/limits.hpp"
#include "safeforce/qp_solver.hpp"
#include "safeforce/shaping.hpp"
#include "safeforce/task_functions.hpp"

#include <vector>

namespace safeforce {

// Diagonal of E; entry 3 (z) must be zero.
VectorXd baseline_regularization(std::size_t n);

struct ControllerSettings {
    ScalarShaping shaping;
    LimitConfig limits;
    VectorXd E_diag;
    double X_ref = 0.0, Y_ref = 0.0;
};

struct QPProblem {
    MatrixXd H;  // 2 (g g' + E)
    VectorXd f;  // 2 kappa_F g
    VectorXd cbf_row;
    double cbf_rhs = 0.0;
    Bounds bounds;
    VectorXd E_diag;
    double kappa_F = 0.0;

    BoxQP as_box_qp() const;
};

enum class SolveStatus { Feasible, Infeasible };

struct QPSolution {
    SolveStatus status = SolveStatus::Infeasible;
    VectorXd mu;
    // Multipliers scaled to the W/2 stationarity form, so lambda = grad_rZ'mu + kappa_F.
    double lambda = 0.0;
    VectorXd lambda_lower, lambda_upper;
    double kkt_residual = 0.0;
    std::vector<int> active_set;  // -1 for the CBF row, else bound index
    double margin = 0.0;          // feasibility certificate
    double objective = 0.0;       // W(q, mu)
    int iterations = 0;
};

QPProblem assemble(const VectorXd& grad_rZ, const BarrierState& bs, double kappa_F,
                   const Bounds& bounds, const VectorXd& E_diag, const ScalarShaping& s);

QPSolution solve(const QPProblem& p, const VectorXd* warm_start = nullptr);

// W(q, mu) = (grad_rZ' mu + kappa_F)^2 + mu' E mu
double objective_W(const QPProblem& p, const VectorXd& mu);

struct ControlEval {
    ChainState chain;
    TaskGradients grads;
    TaskCoordinates tc;  // r_Z measured from Z_d_star; Z_d is unknown to the controller
    BarrierState bs;
    double kappa_F = 0.0;
    Bounds bounds;
    QPProblem problem;
    QPSolution sol;
};

// FK -> gradients -> kappa_F(Z, F - F_d) -> bounds -> assemble -> solve.
ControlEval control(const Configuration& q, double F_measured, const RobotModel& model,
                    const ControllerSettings& cfg);

void check_controller_setup(const RobotModel& model, const ControllerSettings& cfg);

}  // namespace safeforce
