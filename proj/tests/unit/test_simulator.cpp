#include "oracles.hpp"

#include "safeforce/scenario.hpp"

#include <gtest/gtest.h>

using namespace safeforce;

namespace {

ScenarioConfig base(const VectorXd& q0, double duration) {
    ScenarioConfig c;
    c.model = RobotModel::planar_2dof(oracle::vertical_wall());
    c.limits = baseline_limits();
    c.E_diag = baseline_regularization(6);
    c.force = Spring{300};
    c.q0 = q0;
    c.F_d = -3;
    c.Z_d_star = -0.025;
    c.dt = 1.0 / 60;
    c.duration = duration;
    return c;
}

VectorXd aligned_at(const RobotModel& m, double Z) {
    VectorXd q(6);
    q << 0, 0, 0, 0, 0.5, -0.5;
    return oracle::place(q, m, 0, 0, Z);
}

// Aligned and far from the wall: the control is pure z with dZ/dt = -(a Z + b) sqrt(-F_d).
double free_flight(double Z0, double t) {
    const double a = 0.12, b = 0.02, c = std::sqrt(3.0);
    return (Z0 + b / a) * std::exp(-a * c * t) - b / a;
}

double integrate_Z(const Simulator& sim, VectorXd q, double T, int steps) {
    const double dt = T / steps;
    for (int k = 0; k < steps; ++k) q = sim.step(q, k * dt, dt);
    return forward_kinematics(q, sim.config().model).Z;
}

}  // namespace

TEST(Simulator, FreeFlightMatchesClosedForm) {
    ScenarioConfig c = base(VectorXd::Zero(6), 1.0);
    c.q0 = aligned_at(c.model, 1.0);
    const Simulator sim(c);
    const auto ev = sim.evaluate(c.q0, 0);
    EXPECT_NEAR(ev.sol.mu[kZ], -(0.12 + 0.02) * std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(ev.sol.mu.norm(), std::abs(ev.sol.mu[kZ]), 1e-12);
    EXPECT_NEAR(integrate_Z(sim, c.q0, 1.0, 60), free_flight(1.0, 1.0), 1e-9);
}

TEST(Simulator, RungeKuttaIsFourthOrder) {
    ScenarioConfig c = base(VectorXd::Zero(6), 1.0);
    c.q0 = aligned_at(c.model, 1.0);
    const Simulator sim(c);
    const double exact = free_flight(1.0, 1.0);
    const double e1 = std::abs(integrate_Z(sim, c.q0, 1.0, 2) - exact);
    const double e2 = std::abs(integrate_Z(sim, c.q0, 1.0, 4) - exact);
    const double e3 = std::abs(integrate_Z(sim, c.q0, 1.0, 8) - exact);
    EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
    EXPECT_NEAR(std::log2(e2 / e3), 4.0, 0.3);
}

TEST(Simulator, SolvedTaskIsAFixedPoint) {
    const auto st = oracle::baseline_setup(-3, -0.025, 300);
    const VectorXd q0 = oracle::near_success_point(st, 0.6, 0.0);
    const Trajectory tr = run_scenario(base(q0, 2.0));
    ASSERT_EQ(tr.samples.size(), 121u);
    // The square-root force gain is not Lipschitz at r_Z = 0, so rounding noise grows into a
    // discrete chatter of size about (dt kappa sqrt(k))^2; only z moves.
    const double chatter = std::pow((1.0 / 60) * (0.12 * 0.01 + 0.02) * std::sqrt(300.0), 2);
    for (const auto& s : tr.samples) {
        VectorXd d = s.q - q0;
        EXPECT_LE(std::abs(d[kZ]), chatter);
        d[kZ] = 0;
        EXPECT_LE(d.cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(s.F, -3.0, 300 * chatter);
    }
}

TEST(Simulator, RunsAreDeterministic) {
    const ScenarioConfig c = preset("exp1-above");
    ScenarioConfig shortc = c;
    shortc.duration = 1.0;
    const Trajectory a = run_scenario(shortc), b = run_scenario(shortc);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        EXPECT_EQ(a.samples[k].q, b.samples[k].q);
        EXPECT_EQ(a.samples[k].u, b.samples[k].u);
        EXPECT_EQ(a.samples[k].active, b.samples[k].active);
    }
}

TEST(Simulator, MetadataAndSampleGrid) {
    ScenarioConfig c = preset("exp1-above");
    c.duration = 0.5;
    const Trajectory tr = run_scenario(c);
    EXPECT_EQ(tr.meta.name, "exp1-above");
    EXPECT_EQ(tr.meta.n, 6u);
    EXPECT_EQ(tr.meta.dt, c.effective_dt());
    EXPECT_NEAR(tr.meta.Z_d, -0.01, 1e-15);
    EXPECT_TRUE(tr.meta.z_unbounded);
    EXPECT_FALSE(tr.meta.time_varying_reference);
    EXPECT_EQ(tr.samples.size(), static_cast<std::size_t>(std::llround(0.5 / c.effective_dt())) + 1);
    for (std::size_t k = 0; k < tr.samples.size(); ++k) EXPECT_NEAR(tr.samples[k].t, k * tr.meta.dt, 1e-12);
}

TEST(Simulator, StiffContactShrinksStep) {
    ScenarioConfig c = preset("exp5-hard");
    EXPECT_NEAR(c.effective_dt(), 25.0 / 1e5, 1e-18);
    c.dt_auto = false;
    EXPECT_EQ(c.effective_dt(), c.dt);
}

TEST(Simulator, DisturbancesJumpTheState) {
    ScenarioConfig c = preset("exp1-above");
    c.duration = 1.0;
    Disturbance d;
    d.time = 0.5;
    d.dq = VectorXd::Zero(6);
    d.dq[kX] = 0.05;
    c.disturbances.push_back(d);
    const Trajectory tr = run_scenario(c);
    ASSERT_EQ(tr.meta.disturbance_steps.size(), 1u);
    const std::size_t k = tr.meta.disturbance_steps[0];
    EXPECT_NEAR(tr.samples[k].t, 0.5, tr.meta.dt + 1e-12);
    const double jump = tr.samples[k].q[kX] - tr.samples[k - 1].q[kX];
    EXPECT_NEAR(jump, 0.05, 0.01);

    ScenarioConfig clean = c;
    clean.disturbances.clear();
    const Trajectory ref = run_scenario(clean);
    EXPECT_EQ(ref.samples[k - 1].q, tr.samples[k - 1].q);
}

TEST(Simulator, ReferenceProfileInterpolates) {
    ReferenceProfile p{{{{0, 0, 0}}, {{10, 0, 0}}, {{18, 0.1, 0.05}}}};
    EXPECT_TRUE(p.time_varying());
    EXPECT_EQ(p.at(-1), Eigen::Vector2d(0, 0));
    EXPECT_EQ(p.at(5), Eigen::Vector2d(0, 0));
    EXPECT_NEAR(p.at(14).x(), 0.05, 1e-15);
    EXPECT_NEAR(p.at(14).y(), 0.025, 1e-15);
    EXPECT_EQ(p.at(100), Eigen::Vector2d(0.1, 0.05));
    EXPECT_FALSE(ReferenceProfile{}.time_varying());
    EXPECT_FALSE((ReferenceProfile{{{{0, 0.1, 0}}, {{5, 0.1, 0}}}}.time_varying()));
}

TEST(Simulator, ValidationRejectsBadConfigs) {
    ScenarioConfig c = preset("exp1-above");
    c.dt = 0;
    EXPECT_THROW(Simulator{c}, ContractViolation);
    c = preset("exp1-above");
    c.F_d = 1;
    EXPECT_THROW(Simulator{c}, ContractViolation);
    c = preset("exp1-above");
    c.q0 = VectorXd::Zero(5);
    EXPECT_THROW(Simulator{c}, ContractViolation);
    c = preset("exp1-above");
    c.reference.waypoints = {{{1, 0, 0}}, {{0, 0, 0}}};
    EXPECT_THROW(Simulator{c}, ContractViolation);
}
