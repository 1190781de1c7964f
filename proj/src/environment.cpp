#include "safeforce/environment.hpp"

#include "safeforce/geometry.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace safeforce {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::pair<double, double>> sorted_table(const ForceTable& t) {
    std::vector<std::pair<double, double>> pts = t.points;
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
    return pts;  // from shallow to deep
}

}  // namespace

void validate_force_model(const ForceModel& m) {
    std::visit(overloaded{
                   [](const Spring& s) {
                       if (!(s.k > 0)) throw ContractViolation("spring stiffness must be positive");
                   },
                   [](const SaturatingSpring& s) {
                       if (!(s.k > 0)) throw ContractViolation("spring stiffness must be positive");
                       if (!(s.F_sat < 0)) throw ContractViolation("F_sat must be negative");
                   },
                   [](const ForceTable& t) {
                       if (t.points.empty()) throw ContractViolation("force table is empty");
                       double z_prev = 0.0, f_prev = 0.0;
                       for (auto& [z, f] : sorted_table(t)) {
                           if (!(z < z_prev && f < f_prev))
                               throw ContractViolation(
                                   "force table must have Z < 0 and F strictly increasing in Z");
                           z_prev = z;
                           f_prev = f;
                       }
                   },
               },
               m);
}

double reaction_force(double Z, const ForceModel& m) {
    if (Z >= 0) return 0.0;
    return std::visit(overloaded{
                          [Z](const Spring& s) { return s.k * Z; },
                          [Z](const SaturatingSpring& s) { return s.F_sat * std::tanh(s.k * Z / s.F_sat); },
                          [Z](const ForceTable& t) {
                              const auto pts = sorted_table(t);
                              double z0 = 0.0, f0 = 0.0;
                              for (std::size_t i = 0; i < pts.size(); ++i) {
                                  const auto [z1, f1] = pts[i];
                                  if (Z >= z1 || i + 1 == pts.size())
                                      return f0 + (f1 - f0) * (Z - z0) / (z1 - z0);
                                  z0 = z1;
                                  f0 = f1;
                              }
                              return 0.0;
                          },
                      },
                      m);
}

double insertion_for_force(double F_d, const ForceModel& m) {
    if (!(F_d < 0)) throw RangeError("desired force must be negative");
    if (const auto* s = std::get_if<Spring>(&m)) return F_d / s->k;
    if (const auto* s = std::get_if<SaturatingSpring>(&m)) {
        if (!(F_d > s->F_sat)) {
            std::ostringstream os;
            os << "force " << F_d << " N is beyond the saturation level " << s->F_sat << " N";
            throw RangeError(os.str());
        }
    }
    double lo = -1e-3;
    while (reaction_force(lo, m) > F_d) {
        lo *= 2;
        if (lo < -1e6) throw RangeError("desired force is not reachable");
    }
    double hi = 0.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (reaction_force(mid, m) > F_d ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double max_stiffness(const ForceModel& m) {
    return std::visit(overloaded{
                          [](const Spring& s) { return s.k; },
                          [](const SaturatingSpring& s) { return s.k; },
                          [](const ForceTable& t) {
                              double z0 = 0.0, f0 = 0.0, k = 0.0;
                              for (auto& [z, f] : sorted_table(t)) {
                                  k = std::max(k, (f - f0) / (z - z0));
                                  z0 = z;
                                  f0 = f;
                              }
                              return k;
                          },
                      },
                      m);
}

double potential_VF(double r_Z, double Z_d, const ForceModel& m, const ScalarShaping& s) {
    if (r_Z == 0.0) return 0.0;
    auto g = [&](double xi) {
        const double Z = xi + Z_d;
        return s.kappa_F(Z, reaction_force(Z, m) - s.F_d);
    };
    // tanh-sinh copes with the [s]^h endpoint singularity at r_Z = 0.
    thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
    auto integrate = [&](double a, double b) { return ts.integrate(g, a, b, 1e-12); };
    // Split where contact begins (Z = 0), where the integrand has a kink.
    const double xc = -Z_d;
    if (r_Z > 0 && r_Z > xc) return integrate(0.0, xc) + integrate(xc, r_Z);
    return r_Z > 0 ? integrate(0.0, r_Z) : -integrate(r_Z, 0.0);
}

std::string describe(const ForceModel& m) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Spring& s) { os << "spring k=" << s.k; },
                   [&](const SaturatingSpring& s) { os << "saturating-spring k=" << s.k << " F_sat=" << s.F_sat; },
                   [&](const ForceTable& t) { os << "table points=" << t.points.size(); },
               },
               m);
    return os.str();
}

}  // namespace safeforce
