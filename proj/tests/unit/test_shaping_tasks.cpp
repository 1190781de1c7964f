#include "oracles.hpp"

#include "safeforce/task_functions.hpp"

#include <gtest/gtest.h>

using namespace safeforce;

namespace {
ScalarShaping baseline(double F_d = -3.0, double Z_d_star = -0.025) {
    return make_shaping(baseline_params(), F_d, Z_d_star);
}
}  // namespace

TEST(Shaping, ForceGainValues) {
    const ScalarShaping s = baseline();
    EXPECT_NEAR(s.kappa_F(0.5, 0.0 - -3.0), 0.08 * std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(s.kappa_F(0.5, 3.0), 0.1385641, 5e-8);
    EXPECT_NEAR(s.kappa_F(0.0, 2.0), 0.0282843, 5e-8);
    EXPECT_EQ(s.kappa_F(0.7, 0.0), 0.0);
    EXPECT_NEAR(s.kappa_F(-0.5, -4.0), -0.08 * 2.0, 1e-15);
}

TEST(Shaping, ForceGainThroughMeasurement) {
    const ScalarShaping s = baseline();
    EXPECT_NEAR(dVF_drZ(0.5, 0.0, s), 0.1385641, 5e-8);
    EXPECT_NEAR(dVF_drZ(0.0, -1.0, s), 0.0282843, 5e-8);
    for (double Z : {-0.2, 0.0, 0.4}) EXPECT_EQ(dVF_drZ(Z, -3.0, s), 0.0);
}

TEST(Shaping, AlignmentValues) {
    const ScalarShaping s = baseline();
    TaskCoordinates tc;
    EXPECT_EQ(alignment(tc, s), 0.0);
    tc.r_X = 0.1;
    tc.r_O = 0.05;
    EXPECT_NEAR(alignment(tc, s), 0.265, 1e-15);
    tc = {};
    tc.r_O = 2.0;
    EXPECT_EQ(alignment(tc, s), 8.0);
}

TEST(Shaping, AlternateRationalAlignmentLimit) {
    const ScalarShaping s = make_shaping(rational_alt_params(), -1.0, -0.3);
    const double A = kappa_A_inverse(-0.1 - -0.3, s);
    EXPECT_NEAR(s.kappa_A(A), 0.2, 1e-12);
    EXPECT_NEAR(A, 0.1, 0.01);
}

TEST(Shaping, FamiliesSatisfyShapeRequirements) {
    for (auto fam : {KappaAFamily::Rational, KappaAFamily::Root, KappaAFamily::Linear}) {
        ShapingParams p = baseline_params();
        p.kA_family = fam;
        const ScalarShaping s = make_shaping(p, -2.0, -0.01);
        EXPECT_TRUE(validate_shaping(s).empty());
        EXPECT_EQ(s.kappa_A(0.0), 0.0);
        double prev = 0.0;
        for (int i = 1; i <= 1000; ++i) {
            const double a = 0.01 * i, v = s.kappa_A(a);
            EXPECT_GT(v, prev);
            prev = v;
            const double fd = (s.kappa_A(a + 1e-6) - s.kappa_A(a - 1e-6)) / 2e-6;
            EXPECT_NEAR(s.kappa_A.derivative(a), fd, 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(Shaping, NegatedBarrierGainIsFlagged) {
    ShapingParams p = baseline_params();
    p.kB_mode = BarrierGainMode::Negated;
    const ScalarShaping s = make_shaping(p, -3.0, -0.025);
    EXPECT_EQ(s.kappa_B(1.0), -0.3);
    EXPECT_FALSE(validate_shaping(s).empty());
    EXPECT_EQ(baseline().kappa_B(1.0), 0.3);
}

TEST(Shaping, RejectsNonNegativeTargets) {
    EXPECT_THROW(make_shaping(baseline_params(), 0.0, -0.01), ContractViolation);
    EXPECT_THROW(make_shaping(baseline_params(), -1.0, 0.0), ContractViolation);
}

TEST(Shaping, PotentialLyapunovLike) {
    const ScalarShaping s = baseline();
    for (double x : {-0.3, -0.01, 0.02, 0.5}) {
        for (double y : {-0.2, 0.0, 0.1}) {
            const double v = s.V_A_XY(x, y);
            EXPECT_GT(v, 0.0);
            EXPECT_GT(s.grad_V_A_XY(x, y).norm(), 0.0);
        }
    }
    EXPECT_EQ(s.V_A_XY(0, 0), 0.0);
    EXPECT_EQ(s.grad_V_A_XY(0, 0).norm(), 0.0);
}

TEST(TaskCoordinates, Definitions) {
    EndEffectorState ee;
    ee.X = 0.3;
    ee.Y = -0.2;
    ee.Z = 0.05;
    ee.z_hat = -Vec3::UnitZ();
    auto tc = task_coordinates(ee, -0.03);
    EXPECT_EQ(tc.r_X, 0.3);
    EXPECT_EQ(tc.r_Y, -0.2);
    EXPECT_NEAR(tc.r_Z, 0.08, 1e-16);
    EXPECT_EQ(tc.r_O, 0.0);
    ee.z_hat = Vec3::UnitZ();
    EXPECT_EQ(task_coordinates(ee, -0.03).r_O, 2.0);
    EXPECT_NEAR(task_coordinates(ee, -0.03, 0.1, -0.1).r_X, 0.2, 1e-16);
}

TEST(Barrier, Identities) {
    const auto st = oracle::baseline_setup();
    std::mt19937_64 rng(23);
    for (int i = 0; i < 300; ++i) {
        const VectorXd q = oracle::random_q(rng, st.cfg.limits);
        const auto ev = oracle::evaluate(q, st);
        EXPECT_EQ(ev.bs.grad_B[kZ], 1.0);
        const VectorXd expect = ev.bs.grad_Z - ev.bs.dkappa_A * ev.bs.grad_A;
        EXPECT_LE((ev.bs.grad_B - expect).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_NEAR(ev.bs.B, ev.bs.Z - st.cfg.shaping.Z_d_star - st.cfg.shaping.kappa_A(ev.bs.A), 1e-15);
    }
    TaskCoordinates tc;
    EXPECT_EQ(alignment(tc, st.cfg.shaping), 0.0);
}

TEST(Barrier, ZeroAlignmentGivesStandoff) {
    const auto st = oracle::baseline_setup();
    VectorXd q(6);
    q << 0, 0, 0.3, 0, 0.2, -0.2;
    q = oracle::place(q, st.model, 0, 0, 0.3);
    const auto ev = oracle::evaluate(q, st);
    EXPECT_NEAR(ev.bs.A, 0.0, 1e-12);
    EXPECT_NEAR(ev.bs.B, 0.3 - st.cfg.shaping.Z_d_star, 1e-9);
}

TEST(Barrier, GradientsMatchCentralDifferences) {
    const auto st = oracle::baseline_setup();
    std::mt19937_64 rng(29);
    for (int i = 0; i < 200; ++i) {
        const VectorXd q = oracle::random_q(rng, st.cfg.limits);
        const auto ev = oracle::evaluate(q, st);
        for (Eigen::Index k = 0; k < q.size(); ++k) {
            VectorXd a = q, b = q;
            a[k] += 1e-6;
            b[k] -= 1e-6;
            const auto ea = oracle::evaluate(a, st), eb = oracle::evaluate(b, st);
            const double dA = (ea.bs.A - eb.bs.A) / 2e-6, dB = (ea.bs.B - eb.bs.B) / 2e-6;
            EXPECT_NEAR(ev.bs.grad_A[k], dA, 1e-6 * std::max(1.0, std::abs(dA)));
            EXPECT_NEAR(ev.bs.grad_B[k], dB, 1e-6 * std::max(1.0, std::abs(dB)));
        }
    }
}

TEST(TaskCoordinates, OrientationErrorDegrees) {
    EXPECT_EQ(orientation_error_deg(0.0), 0.0);
    EXPECT_NEAR(orientation_error_deg(1.0), 90.0, 1e-12);
    EXPECT_NEAR(orientation_error_deg(2.0), 180.0, 1e-12);
}
