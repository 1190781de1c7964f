#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace safeforce {

// [s]^h = s |s|^(h-1), zero at zero.
double signed_pow(double s, double h);

struct ScalarFn {
    std::function<double(double)> f;
    std::function<double(double)> df;  // empty -> central difference, step 1e-7

    double operator()(double s) const { return f(s); }
    double derivative(double s) const;
};

enum class KappaAFamily {
    Rational,  // c s / (sqrt(s) + d)^2
    Root,      // c s / (sqrt(s) + d)
    Linear     // c s
};

enum class BarrierGainMode { KappaLike, Negated };

// Coefficients of the built-in function families.
struct ShapingParams {
    double kF_a = 0.12, kF_b = 0.02, kF_h = 0.5;  // kappa_F = (a|s1| + b) [s2]^h
    KappaAFamily kA_family = KappaAFamily::Rational;
    double kA_c = 2.08, kA_d = 0.29;
    double kAO_c = 4.0;   // kappa_A^O(r) = c r
    double VXY_c = 6.5;   // V_A^XY = c (rX^2 + rY^2)
    double kB_c = 0.3;    // kappa_B(s) = c s, or -c s when negated
    BarrierGainMode kB_mode = BarrierGainMode::KappaLike;
};

ShapingParams baseline_params();
ShapingParams rational_alt_params();  // kappa_A(s) = s / (sqrt(s) + 0.2)

struct ScalarShaping {
    std::function<double(double, double)> kappa_F;
    ScalarFn kappa_A, kappa_A_O, kappa_B;
    std::function<double(double, double)> V_A_XY;
    std::function<Eigen::Vector2d(double, double)> grad_V_A_XY;
    double Z_d_star = -0.001;
    double F_d = -1.0;
};

ScalarShaping make_shaping(const ShapingParams& p, double F_d, double Z_d_star);

// Sampled checks of the zero-at-zero and monotonicity requirements. Empty when all hold.
std::vector<std::string> validate_shaping(const ScalarShaping& s, unsigned seed = 7);

}  // namespace safeforce
