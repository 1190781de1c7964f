#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace safeforce;

TEST(Controller, ExperimentRegularization) {
    const VectorXd e = baseline_regularization(6);
    const double per_rad = std::pow(180.0 / kPi, 2);
    EXPECT_EQ(e[kX], 0.04);
    EXPECT_EQ(e[kY], 0.04);
    EXPECT_EQ(e[kZ], 0.0);
    EXPECT_NEAR(e[kPsi], 4e-5 * per_rad, 1e-15);
    EXPECT_NEAR(e[4], 3e-6 * per_rad, 1e-15);
    EXPECT_NEAR(e[5], 3e-6 * per_rad, 1e-15);
    EXPECT_THROW(baseline_regularization(4), ContractViolation);
}

TEST(Controller, AssembledProblemStructure) {
    const auto st = oracle::baseline_setup();
    std::mt19937_64 rng(61);
    for (int i = 0; i < 100; ++i) {
        const VectorXd q = oracle::random_q(rng, st.cfg.limits);
        const auto ev = oracle::evaluate(q, st);
        const VectorXd& g = ev.grads.Z;
        MatrixXd H = 2 * g * g.transpose();
        H.diagonal() += 2 * st.cfg.E_diag;
        EXPECT_LE((ev.problem.H - H).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_LE((ev.problem.f - 2 * ev.kappa_F * g).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_EQ(ev.problem.cbf_row, ev.bs.grad_B);
        EXPECT_EQ(ev.problem.cbf_rhs, -st.cfg.shaping.kappa_B(ev.bs.B));
        const double F = oracle::measured_force(q, st);
        EXPECT_EQ(ev.kappa_F, st.cfg.shaping.kappa_F(ev.bs.Z, F - st.cfg.shaping.F_d));
    }
}

TEST(Controller, ObjectiveExpansion) {
    const auto st = oracle::baseline_setup();
    std::mt19937_64 rng(67);
    for (int i = 0; i < 100; ++i) {
        const auto ev = oracle::evaluate(oracle::random_q(rng, st.cfg.limits), st);
        VectorXd mu(6);
        for (int k = 0; k < 6; ++k) mu[k] = oracle::uniform(rng, -1, 1);
        const double lin = ev.grads.Z.dot(mu) + ev.kappa_F;
        const double W = lin * lin + mu.dot(st.cfg.E_diag.asDiagonal() * mu);
        EXPECT_NEAR(objective_W(ev.problem, mu), W, 1e-12 * std::max(1.0, W));
    }
}

TEST(Controller, SolutionsAreFeasibleAndStationary) {
    const auto st = oracle::baseline_setup();
    std::mt19937_64 rng(71);
    for (int i = 0; i < 300; ++i) {
        const auto ev = oracle::evaluate(oracle::random_q(rng, st.cfg.limits), st);
        ASSERT_EQ(ev.sol.status, SolveStatus::Feasible);
        EXPECT_EQ(ev.sol.margin, kUnbounded);
        EXPECT_LE(ev.sol.kkt_residual, 1e-8);
        EXPECT_GE(ev.bs.grad_B.dot(ev.sol.mu), ev.problem.cbf_rhs - 1e-10);
        EXPECT_TRUE((ev.sol.mu.array() >= ev.bounds.lower.array() - 1e-15).all());
        EXPECT_TRUE((ev.sol.mu.array() <= ev.bounds.upper.array() + 1e-15).all());
        // z is unbounded and unregularized, so its stationarity row fixes the row multiplier.
        EXPECT_NEAR(ev.sol.lambda, ev.grads.Z.dot(ev.sol.mu) + ev.kappa_F, 1e-9);
        EXPECT_GE(ev.sol.lambda, -1e-12);
    }
}

TEST(Controller, MatchesOracleSolution) {
    const auto st = oracle::baseline_setup();
    std::mt19937_64 rng(73);
    for (int i = 0; i < 40; ++i) {
        const auto ev = oracle::evaluate(oracle::random_q(rng, st.cfg.limits), st);
        BoxQP qp = ev.problem.as_box_qp();
        // finite stand-in for the unbounded z rate, far outside the optimum
        qp.lower[kZ] = -50;
        qp.upper[kZ] = 50;
        const VectorXd ref = oracle::fista(qp, 200000);
        EXPECT_LE(objective_W(ev.problem, ev.sol.mu), objective_W(ev.problem, ref) + 1e-9);
    }
}

TEST(Controller, ZeroInputAtSolvedTask) {
    const auto st = oracle::baseline_setup();
    for (double j : {0.3, 0.8, 1.1}) {
        const VectorXd q = oracle::near_success_point(st, j, 0.0);
        const auto ev = oracle::evaluate(q, st);
        EXPECT_NEAR(oracle::measured_force(q, st), st.cfg.shaping.F_d, 1e-12);
        EXPECT_NEAR(ev.kappa_F, 0.0, 1e-6);
        EXPECT_LE(ev.sol.mu.norm(), 1e-8);
    }
}

TEST(Controller, ApproachesTheSurfaceFromAbove) {
    const auto st = oracle::baseline_setup();
    std::mt19937_64 rng(79);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        VectorXd q = oracle::random_q(rng, st.cfg.limits);
        q = oracle::place(q, st.model, oracle::uniform(rng, -0.1, 0.1), oracle::uniform(rng, -0.1, 0.1),
                          oracle::uniform(rng, 0.5, 3.0));
        const auto ev = oracle::evaluate(q, st);
        if (ev.bs.B <= 0 || ev.bs.Z <= 0) continue;
        ++checked;
        EXPECT_GT(ev.kappa_F, 0.0);
        EXPECT_LE(ev.grads.Z.dot(ev.sol.mu), 0.0) << "end effector should not recede";
    }
    EXPECT_GT(checked, 50);
}

TEST(Controller, PushesBackWhenOverPressed) {
    const auto st = oracle::baseline_setup();
    VectorXd q = oracle::near_success_point(st, 0.5, 0.0);
    q[kZ] -= 0.005;
    const auto ev = oracle::evaluate(q, st);
    EXPECT_LT(ev.kappa_F, 0.0);
    EXPECT_GT(ev.grads.Z.dot(ev.sol.mu), 0.0);
}

TEST(Controller, ActiveSetLabels) {
    const auto st = oracle::baseline_setup();
    VectorXd q = oracle::near_success_point(st, 0.5, 0.0);
    q[4] = st.cfg.limits.qm_upper[0];
    const auto ev = oracle::evaluate(q, st);
    for (int idx : ev.sol.active_set) EXPECT_TRUE(idx == -1 || (idx >= 0 && idx < 6));
}

TEST(Controller, RejectsBadSetups) {
    auto st = oracle::baseline_setup();
    VectorXd q = VectorXd::Zero(6);
    st.cfg.E_diag[kZ] = 1e-3;
    EXPECT_THROW(oracle::evaluate(q, st), ContractViolation);
    st = oracle::baseline_setup();
    st.cfg.E_diag.resize(5);
    EXPECT_THROW(oracle::evaluate(q, st), ContractViolation);
    st = oracle::baseline_setup();
    st.model = RobotModel();
    EXPECT_THROW(oracle::evaluate(q, st), ContractViolation);
}
