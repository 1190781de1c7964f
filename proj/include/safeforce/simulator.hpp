#pragma once

#include "safeforce/controller.hpp"
#include "safeforce/environment.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace safeforce {

// Piecewise-linear (t, X_ref, Y_ref) waypoints, held constant outside their span.
struct ReferenceProfile {
    std::vector<std::array<double, 3>> waypoints;

    bool time_varying() const;
    Eigen::Vector2d at(double t) const;
};

struct Disturbance {
    double time = 0.0;
    VectorXd dq;
};

struct ScenarioConfig {
    std::string name = "custom";
    RobotModel model;
    ShapingParams shaping;
    LimitConfig limits;
    VectorXd E_diag;
    ForceModel force = Spring{};
    Configuration q0;
    double F_d = -3.0;
    double Z_d_star = -0.025;
    double dt = 1.0 / 60.0;
    bool dt_auto = true;  // shrink dt to 25 / k for stiff contact
    double duration = 20.0;
    ReferenceProfile reference;
    std::vector<Disturbance> disturbances;

    void validate() const;
    double effective_dt() const;
    ControllerSettings settings() const;
};

struct Sample {
    double t = 0;
    VectorXd q, u;
    double F = 0, X = 0, Y = 0, Z = 0, r_O = 0, A = 0, B = 0;
    double kappa_F = 0, VF = 0, VF_dot = 0, lambda = 0;
    double X_ref = 0, Y_ref = 0;
    bool feasible = true;
    std::string active;  // e.g. "cbf;4;5"
};

struct TrajectoryMeta {
    std::string name;
    std::size_t n = 0;
    double dt = 0, F_d = 0, Z_d = 0, Z_d_star = 0;
    bool z_unbounded = true;
    bool time_varying_reference = false;
    VectorXd qm_lower, qm_upper;
    std::vector<std::size_t> disturbance_steps;  // sample index right after each jump
    std::size_t held_steps = 0;                  // steps frozen by an infeasible solve
};

struct Trajectory {
    TrajectoryMeta meta;
    std::vector<Sample> samples;
};

using SolveObserver = std::function<void(double t, const ControlEval&)>;

class Simulator {
public:
    explicit Simulator(ScenarioConfig cfg);

    const ScenarioConfig& config() const { return cfg_; }
    const ScalarShaping& shaping() const { return settings_.shaping; }
    double Z_d() const { return Z_d_; }

    ControlEval evaluate(const Configuration& q, double t) const;

    // One RK4 step, control re-solved at every stage. Any infeasible stage holds q.
    Configuration step(const Configuration& q, double t, double dt, bool* held = nullptr) const;

    Trajectory run(const SolveObserver& observer = {}) const;

private:
    Configuration rk4(const Configuration& q, double t, double dt, const QPSolution& first,
                      bool* held = nullptr) const;
    Sample make_sample(double t, const Configuration& q, const ControlEval& ev) const;

    ScenarioConfig cfg_;
    ControllerSettings settings_;
    double Z_d_;
};

Trajectory run_scenario(const ScenarioConfig& cfg);

}  // namespace safeforce
