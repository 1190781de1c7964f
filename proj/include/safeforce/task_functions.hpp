#pragma once

#include "safeforce/kinematics.hpp"
#include "safeforce/shaping.hpp"

namespace safeforce {

struct TaskCoordinates {
    double r_X = 0, r_Y = 0, r_O = 0, r_Z = 0;
};

// X_ref, Y_ref shift the alignment target (zero for a fixed contact point).
TaskCoordinates task_coordinates(const EndEffectorState& ee, double Z_d, double X_ref = 0.0,
                                 double Y_ref = 0.0);

// dV_F/dr_Z = kappa_F(Z, F - F_d). Uses only the measured force.
double dVF_drZ(double Z, double F_measured, const ScalarShaping& s);

double alignment(const TaskCoordinates& tc, const ScalarShaping& s);

struct BarrierState {
    double A = 0, B = 0, Z = 0;
    double dkappa_A = 0;  // kappa_A'(A)
    VectorXd grad_A, grad_B, grad_Z;
};

BarrierState barrier(const EndEffectorState& ee, const TaskGradients& g, const TaskCoordinates& tc,
                     const ScalarShaping& s);

// Orientation error in degrees, acos(1 - r_O).
double orientation_error_deg(double r_O);

}  // namespace safeforce
