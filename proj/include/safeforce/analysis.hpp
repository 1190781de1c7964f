#pragma once

#include "safeforce/controller.hpp"
#include "safeforce/environment.hpp"
#include "safeforce/simulator.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace safeforce {

// Bisection inverse of kappa_A; throws RangeError above its supremum.
double kappa_A_inverse(double value, const ScalarShaping& s);

struct Condition {
    std::string name;
    bool ok = false;
    double residual = 0.0;
};

enum class EquilibriumClass { NearSuccess, Spurious, NotEquilibrium, Unclassified, NotApplicable };

const char* to_string(EquilibriumClass c);

struct EquilibriumTolerances {
    double eq = 1e-8;    // on ||u_H||
    double cond = 1e-6;  // on each set condition
};

struct EquilibriumReport {
    EquilibriumClass cls = EquilibriumClass::NotApplicable;
    std::vector<Condition> near_success;  // S(i) (a)-(c)
    std::vector<Condition> spurious;      // S(ii) (a)-(f)
    bool in_near_success = false;
    bool in_spurious = false;
    double u_norm = 0.0;
    // Membership in S(i) or S(ii) agrees with ||u_H|| <= tol.
    bool consistent = true;
};

EquilibriumReport classify_equilibrium(const Configuration& q, const RobotModel& model,
                                       const ControllerSettings& cfg, const ForceModel& force,
                                       const EquilibriumTolerances& tol = {});

struct SkktReport {
    bool applicable = false;
    std::vector<Condition> conditions;
    bool pass = false;
};

// KKT-like conditions that hold when u_H(q) = 0.
SkktReport verify_skkt(const ControlEval& ev, const ControllerSettings& cfg, double tol = 1e-6,
                       double tol_eq = 1e-8);

class TrajectoryError : public std::runtime_error {
public:
    explicit TrajectoryError(const std::string& what) : std::runtime_error(what) {}
};

enum class Check { Pass, Fail, NotApplicable };
const char* to_string(Check c);

struct AuditTolerances {
    double barrier = 1e-9;
    double monotone = 1e-7;
    double alignment = 1e-6;
};

struct AuditReport {
    Check barrier = Check::NotApplicable;   // B >= -tol once inside P
    Check diagram = Check::NotApplicable;   // Z >= Z_d* + kappa_A(A) - tol
    Check potential = Check::NotApplicable; // V_F non-increasing while inside P
    Check alignment = Check::NotApplicable; // A non-increasing while inside P
    Check joints = Check::NotApplicable;    // strictly inside joint limits
    std::vector<std::size_t> barrier_fail, diagram_fail, potential_fail, alignment_fail, joints_fail;
    std::string alignment_note;
    std::size_t first_safe_step = 0;
    bool ever_safe = false;
    double min_B = 0.0, max_dVF = 0.0, max_dA = 0.0;
    double terminal_force_error = 0.0, terminal_A = 0.0, alignment_bound = 0.0;
    bool terminal_alignment_ok = false;

    bool pass() const;
};

AuditReport audit_trajectory(const Trajectory& tr, const ScalarShaping& s,
                             const AuditTolerances& tol = {});

}  // namespace safeforce
