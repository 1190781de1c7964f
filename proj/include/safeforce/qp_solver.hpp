#pragma once

#include "safeforce/geometry.hpp"

#include <limits>
#include <vector>

namespace safeforce {

// minimize 1/2 x'Hx + f'x  subject to  c'x >= d,  lower <= x <= upper.
// An empty c drops the general row. Bounds may be infinite.
struct BoxQP {
    MatrixXd H;
    VectorXd f;
    VectorXd c;
    double d = -std::numeric_limits<double>::infinity();
    VectorXd lower, upper;
};

enum class QpStatus { Optimal, Infeasible, IterationLimit };

enum class BoundState : signed char { Free = 0, AtLower = -1, AtUpper = 1, Fixed = 2 };

// Duals follow H x + f - lambda c - lambda_lower + lambda_upper = 0.
struct BoxQPResult {
    QpStatus status = QpStatus::Infeasible;
    VectorXd x;
    double lambda = 0.0;
    VectorXd lambda_lower, lambda_upper;
    std::vector<BoundState> state;
    bool row_active = false;
    int iterations = 0;
    double objective = 0.0;
};

struct ActiveSetOptions {
    int max_iterations = 0;  // 0 -> 50 + 10 n
    double step_tol = 1e-13;
    double dual_tol = 1e-12;
    double pivot_floor = 1e-14;  // smallest accepted squared Cholesky pivot
};

// Dense primal active-set method. Throws ContractViolation when H is not positive definite.
BoxQPResult solve_box_qp(const BoxQP& qp, const VectorXd* warm_start = nullptr,
                         const ActiveSetOptions& opt = {});

double kkt_residual(const BoxQP& qp, const VectorXd& x, double lambda, const VectorXd& lambda_lower,
                    const VectorXd& lambda_upper);

}  // namespace safeforce
