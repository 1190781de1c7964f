#pragma once

#include "safeforce/kinematics.hpp"
#include "safeforce/shaping.hpp"

#include <limits>

namespace safeforce {

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct LimitConfig {
    Eigen::Vector4d uD_lower, uD_upper;  // x, y, z, psi rates; +-kUnbounded allowed
    VectorXd um_lower, um_upper;         // joint rates
    VectorXd qm_lower, qm_upper;         // joint positions
    double K_L = 0.5;

    void validate(std::size_t arm_dof) const;
    bool z_unbounded() const { return uD_lower[2] == -kUnbounded && uD_upper[2] == kUnbounded; }
};

// Symmetric experiment limits, converted to SI and radians.
LimitConfig baseline_limits();

struct Bounds {
    VectorXd lower, upper;
};

Bounds velocity_bounds(const Configuration& q, const LimitConfig& cfg);

// Box maximizer of grad_B^T mu; ties (zero gradient) take the upper bound.
VectorXd b_star(const VectorXd& grad_B, const Bounds& bounds);

// g' b* with 0 * inf = 0; +inf when an unbounded entry meets a nonzero g.
double box_support(const VectorXd& g, const Bounds& bounds);

// grad_B^T b* + kappa_B(B); +inf when an unbounded entry meets a nonzero gradient.
double feasibility_margin(const VectorXd& grad_B, double B, const Bounds& bounds,
                          const ScalarShaping& s);

// Strictly inside the joint limits.
bool joints_interior(const Configuration& q, const LimitConfig& cfg);

}  // namespace safeforce
