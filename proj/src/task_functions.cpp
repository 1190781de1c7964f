#include "safeforce/task_functions.hpp"

#include <algorithm>
#include <cmath>

namespace safeforce {

TaskCoordinates task_coordinates(const EndEffectorState& ee, double Z_d, double X_ref,
                                 double Y_ref) {
    TaskCoordinates tc;
    tc.r_X = ee.X - X_ref;
    tc.r_Y = ee.Y - Y_ref;
    tc.r_O = std::clamp(1.0 + ee.z_hat.z(), 0.0, 2.0);
    tc.r_Z = ee.Z - Z_d;
    return tc;
}

double dVF_drZ(double Z, double F_measured, const ScalarShaping& s) {
    return s.kappa_F(Z, F_measured - s.F_d);
}

double alignment(const TaskCoordinates& tc, const ScalarShaping& s) {
    return s.V_A_XY(tc.r_X, tc.r_Y) + s.kappa_A_O(tc.r_O);
}

BarrierState barrier(const EndEffectorState& ee, const TaskGradients& g, const TaskCoordinates& tc,
                     const ScalarShaping& s) {
    BarrierState b;
    b.Z = ee.Z;
    b.A = alignment(tc, s);
    b.B = ee.Z - s.Z_d_star - s.kappa_A(b.A);
    b.dkappa_A = s.kappa_A.derivative(b.A);

    const Eigen::Vector2d gv = s.grad_V_A_XY(tc.r_X, tc.r_Y);
    const double dO = s.kappa_A_O.derivative(tc.r_O);
    b.grad_A = gv.x() * g.X + gv.y() * g.Y + dO * g.r_O;
    b.grad_Z = g.Z;
    b.grad_B = g.Z - b.dkappa_A * b.grad_A;
    return b;
}

double orientation_error_deg(double r_O) {
    return rad2deg(std::acos(std::clamp(1.0 - r_O, -1.0, 1.0)));
}

}  // namespace safeforce
