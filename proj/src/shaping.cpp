#include "safeforce/shaping.hpp"

#include "safeforce/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace safeforce {

double signed_pow(double s, double h) {
    if (s == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(s), h), s);
}

double ScalarFn::derivative(double s) const {
    if (df) return df(s);
    const double h = 1e-7;
    return (f(s + h) - f(s - h)) / (2 * h);
}

ShapingParams baseline_params() { return ShapingParams{}; }

ShapingParams rational_alt_params() {
    ShapingParams p;
    p.kA_family = KappaAFamily::Root;
    p.kA_c = 1.0;
    p.kA_d = 0.2;
    return p;
}

namespace {

double nonneg_arg(double s) {
    if (s >= 0) return s;
    if (s > -1e-12) return 0.0;
    throw ContractViolation("kappa_A evaluated at a negative argument");
}

}  // namespace

ScalarShaping make_shaping(const ShapingParams& p, double F_d, double Z_d_star) {
    if (!(F_d < 0)) throw ContractViolation("F_d must be negative");
    if (!(Z_d_star < 0)) throw ContractViolation("Z_d_star must be negative");
    ScalarShaping s;
    s.F_d = F_d;
    s.Z_d_star = Z_d_star;

    const double a = p.kF_a, b = p.kF_b, h = p.kF_h;
    s.kappa_F = [a, b, h](double s1, double s2) { return (a * std::abs(s1) + b) * signed_pow(s2, h); };

    const double c = p.kA_c, d = p.kA_d;
    switch (p.kA_family) {
        case KappaAFamily::Rational:
            s.kappa_A.f = [c, d](double x) {
                x = nonneg_arg(x);
                const double r = std::sqrt(x) + d;
                return c * x / (r * r);
            };
            s.kappa_A.df = [c, d](double x) {
                x = nonneg_arg(x);
                const double r = std::sqrt(x) + d;
                return c * d / (r * r * r);
            };
            break;
        case KappaAFamily::Root:
            s.kappa_A.f = [c, d](double x) {
                x = nonneg_arg(x);
                return c * x / (std::sqrt(x) + d);
            };
            s.kappa_A.df = [c, d](double x) {
                x = nonneg_arg(x);
                const double r = std::sqrt(x);
                return c * (0.5 * r + d) / ((r + d) * (r + d));
            };
            break;
        case KappaAFamily::Linear:
            s.kappa_A.f = [c](double x) { return c * nonneg_arg(x); };
            s.kappa_A.df = [c](double) { return c; };
            break;
    }

    const double o = p.kAO_c;
    s.kappa_A_O.f = [o](double r) { return o * r; };
    s.kappa_A_O.df = [o](double) { return o; };

    const double v = p.VXY_c;
    s.V_A_XY = [v](double x, double y) { return v * (x * x + y * y); };
    s.grad_V_A_XY = [v](double x, double y) { return Eigen::Vector2d(2 * v * x, 2 * v * y); };

    const double kb = p.kB_mode == BarrierGainMode::Negated ? -p.kB_c : p.kB_c;
    s.kappa_B.f = [kb](double x) { return kb * x; };
    s.kappa_B.df = [kb](double) { return kb; };
    return s;
}

std::vector<std::string> validate_shaping(const ScalarShaping& s, unsigned seed) {
    std::vector<std::string> issues;
    std::mt19937_64 rng(seed);
    auto fail = [&](const std::string& what, double at) {
        std::ostringstream os;
        os << what << " (at " << at << ")";
        issues.push_back(os.str());
    };

    auto check_increasing = [&](const ScalarFn& fn, const char* name, double lo, double hi,
                                bool strict) {
        if (fn(0.0) != 0.0) fail(std::string(name) + " is not zero at zero", 0.0);
        std::uniform_real_distribution<double> U(lo, hi);
        std::vector<double> xs;
        for (int i = 0; i <= 200; ++i) xs.push_back(lo + (hi - lo) * i / 200.0);
        for (int i = 0; i < 800; ++i) xs.push_back(U(rng));
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (xs[i] == xs[i - 1]) continue;
            const double a = fn(xs[i - 1]), b = fn(xs[i]);
            if (strict ? !(b > a) : !(b >= a)) {
                fail(std::string(name) + (strict ? " is not strictly increasing" : " is decreasing"),
                     xs[i]);
                return;
            }
        }
    };

    check_increasing(s.kappa_A, "kappa_A", 0.0, 10.0, true);
    check_increasing(s.kappa_A_O, "kappa_A_O", 0.0, 2.0, true);
    check_increasing(s.kappa_B, "kappa_B", -1.0, 1.0, false);

    if (s.V_A_XY(0, 0) != 0.0) fail("V_A_XY is not zero at the origin", 0.0);
    std::uniform_real_distribution<double> P(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const double x = P(rng), y = P(rng);
        if (x == 0 && y == 0) continue;
        if (!(s.V_A_XY(x, y) > 0)) {
            fail("V_A_XY is not positive away from the origin", x);
            break;
        }
        if (!(s.grad_V_A_XY(x, y).norm() > 0)) {
            fail("V_A_XY gradient vanishes away from the origin", x);
            break;
        }
    }

    for (double s1 : {-0.05, 0.0, 0.1, 0.5, 1.0, 3.0}) {
        if (s.kappa_F(s1, 0.0) != 0.0) fail("kappa_F(s1, 0) is nonzero", s1);
        double prev = s.kappa_F(s1, -20.0);
        for (int i = 1; i <= 400; ++i) {
            const double cur = s.kappa_F(s1, -20.0 + 40.0 * i / 400.0);
            if (cur < prev) {
                fail("kappa_F is decreasing in s2", s1);
                break;
            }
            prev = cur;
        }
    }
    return issues;
}

}  // namespace safeforce
