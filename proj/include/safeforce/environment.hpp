#pragma once

#include "safeforce/shaping.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace safeforce {

struct Spring {
    double k = 300.0;  // N/m
};

// F = F_sat tanh(k Z / F_sat) in contact; F_sat < 0.
struct SaturatingSpring {
    double k = 300.0;
    double F_sat = -10.0;
};

// Piecewise-linear F(Z) through (0, 0) and the given (Z < 0, F < 0) points,
// extended past the deepest point with the last slope.
struct ForceTable {
    std::vector<std::pair<double, double>> points;
};

using ForceModel = std::variant<Spring, SaturatingSpring, ForceTable>;

class RangeError : public std::domain_error {
public:
    explicit RangeError(const std::string& what) : std::domain_error(what) {}
};

void validate_force_model(const ForceModel& m);

double reaction_force(double Z, const ForceModel& m);

// Unique Z_d < 0 with F(Z_d) = F_d.
double insertion_for_force(double F_d, const ForceModel& m);

// Largest contact slope dF/dZ, used to size the integration step.
double max_stiffness(const ForceModel& m);

// V_F(r_Z) = integral from 0 to r_Z of kappa_F(xi + Z_d, F(xi + Z_d) - F_d) dxi.
double potential_VF(double r_Z, double Z_d, const ForceModel& m, const ScalarShaping& s);

std::string describe(const ForceModel& m);

}  // namespace safeforce
