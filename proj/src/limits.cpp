#include "safeforce/limits.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace safeforce {

void LimitConfig::validate(std::size_t arm_dof) const {
    const auto m = static_cast<Eigen::Index>(arm_dof);
    if (um_lower.size() != m || um_upper.size() != m || qm_lower.size() != m || qm_upper.size() != m)
        throw ContractViolation("limit vectors do not match the number of arm joints");
    for (int i = 0; i < 4; ++i)
        if (!(uD_lower[i] < 0 && uD_upper[i] > 0))
            throw ContractViolation("vehicle rate limits must satisfy lower < 0 < upper");
    for (Eigen::Index j = 0; j < m; ++j) {
        if (!(um_lower[j] < 0 && um_upper[j] > 0))
            throw ContractViolation("joint rate limits must satisfy lower < 0 < upper");
        if (!(qm_lower[j] < qm_upper[j]))
            throw ContractViolation("joint position limits must satisfy lower < upper");
    }
    if (!(K_L > 0)) throw ContractViolation("K_L must be positive");
}

LimitConfig baseline_limits() {
    LimitConfig c;
    c.uD_upper << 0.1, 0.15, kUnbounded, deg2rad(5.7);
    c.uD_lower = -c.uD_upper;
    c.um_upper = Eigen::Vector2d(deg2rad(20), deg2rad(20));
    c.um_lower = -c.um_upper;
    c.qm_upper = Eigen::Vector2d(deg2rad(70), deg2rad(105));
    c.qm_lower = -c.qm_upper;
    c.K_L = 0.5;
    return c;
}

Bounds velocity_bounds(const Configuration& q, const LimitConfig& cfg) {
    const Eigen::Index m = cfg.qm_lower.size();
    if (q.size() != 4 + m) throw ContractViolation("configuration does not match limit config");
    Bounds b;
    b.lower.resize(4 + m);
    b.upper.resize(4 + m);
    b.lower.head<4>() = cfg.uD_lower;
    b.upper.head<4>() = cfg.uD_upper;
    for (Eigen::Index j = 0; j < m; ++j) {
        const double qj = q[kArm + j];
        double lo = std::max(cfg.um_lower[j], cfg.K_L * (cfg.qm_lower[j] - qj));
        double hi = std::min(cfg.um_upper[j], cfg.K_L * (cfg.qm_upper[j] - qj));
        // Far outside the limits the two rules cross; keep the box nonempty.
        lo = std::min(lo, cfg.um_upper[j]);
        hi = std::max(hi, cfg.um_lower[j]);
        b.lower[kArm + j] = lo;
        b.upper[kArm + j] = hi;
    }
    return b;
}

VectorXd b_star(const VectorXd& grad_B, const Bounds& bounds) {
    VectorXd b(grad_B.size());
    for (Eigen::Index i = 0; i < grad_B.size(); ++i)
        b[i] = grad_B[i] < 0 ? bounds.lower[i] : bounds.upper[i];
    return b;
}

double box_support(const VectorXd& g, const Bounds& bounds) {
    const VectorXd bs = b_star(g, bounds);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < bs.size(); ++i) {
        if (g[i] == 0.0) continue;
        if (std::isinf(bs[i])) return kUnbounded;
        sum += g[i] * bs[i];
    }
    return sum;
}

double feasibility_margin(const VectorXd& grad_B, double B, const Bounds& bounds,
                          const ScalarShaping& s) {
    return box_support(grad_B, bounds) + s.kappa_B(B);
}

bool joints_interior(const Configuration& q, const LimitConfig& cfg) {
    for (Eigen::Index j = 0; j < cfg.qm_lower.size(); ++j) {
        const double v = q[kArm + j];
        if (!(v > cfg.qm_lower[j] && v < cfg.qm_upper[j])) return false;
    }
    return true;
}

}  // namespace safeforce
