#include "sysrisk/dcc.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sysrisk;

namespace {

DccParams params_2x2(double c, double d, double rho, CopulaSpec copula = {CopulaFamily::gaussian, 0.0}) {
    DccParams p;
    p.c = Eigen::VectorXd::Constant(1, c);
    p.d = Eigen::VectorXd::Constant(1, d);
    p.qbar.resize(2, 2);
    p.qbar << 1.0, rho, rho, 1.0;
    p.copula = copula;
    return p;
}

}  // namespace

TEST(Dcc, FilterMatchesHandRecursion) {
    const DccParams p = params_2x2(0.1, 0.8, 0.3);
    Eigen::MatrixXd e(3, 2);
    e << 1.0, 2.0, -0.5, 0.4, 1.5, -1.0;
    const CorrelationPath path = dcc_filter(p, e);
    ASSERT_EQ(path.R.size(), 3u);

    // Q_0 = Qbar; Q_t = 0.1 Qbar + 0.1 e_{t-1} e_{t-1}' + 0.8 Q_{t-1}.
    Eigen::Matrix2d Q = p.qbar;
    EXPECT_TRUE(path.Q[0].isApprox(Q, 1e-15));
    for (int t = 1; t < 3; ++t) {
        const Eigen::Vector2d v = e.row(t - 1).transpose();
        Q = 0.1 * p.qbar + 0.1 * v * v.transpose() + 0.8 * Q;
        EXPECT_NEAR((path.Q[t] - Q).cwiseAbs().maxCoeff(), 0.0, 1e-15);
        EXPECT_NEAR(path.R[t](0, 1), Q(0, 1) / std::sqrt(Q(0, 0) * Q(1, 1)), 1e-15);
        EXPECT_EQ(path.R[t](0, 0), 1.0);
    }
    // Hand values for t = 1: Q = [.1+.1+.8, .03+.2+.24; ., .1+.4+.8].
    EXPECT_NEAR(path.Q[1](0, 1), 0.47, 1e-15);
    EXPECT_NEAR(path.Q[1](1, 1), 1.3, 1e-15);
}

TEST(Dcc, StaticModelLoglikIsSumOfDensities) {
    const CopulaSpec t{CopulaFamily::student, 6.0};
    const DccParams p = params_2x2(0.0, 0.0, -0.4, t);
    const SimulatedDcc sim = simulate_dcc(params_2x2(0.05, 0.9, 0.5, t), 200, 4);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < sim.U.rows(); ++i) expected += copula_log_density(t, sim.U.row(i).transpose(), p.qbar);
    EXPECT_NEAR(dcc_copula_loglik(p, sim.U), expected, 1e-9);
}

TEST(Dcc, ConditionalCovariance) {
    Eigen::Matrix2d R;
    R << 1.0, 0.5, 0.5, 1.0;
    const Eigen::Matrix2d H = conditional_covariance(R, Eigen::Vector2d(4.0, 9.0));
    EXPECT_DOUBLE_EQ(H(0, 0), 4.0);
    EXPECT_DOUBLE_EQ(H(0, 1), 3.0);
    EXPECT_DOUBLE_EQ(H(1, 1), 9.0);
}

TEST(Dcc, SampleCorrelationOfLinearPair) {
    Eigen::MatrixXd X(4, 2);
    X << 1, -2, 2, -4, 3, -6, 5, -10;
    const Eigen::MatrixXd R = sample_correlation(X);
    EXPECT_NEAR(R(0, 1), -1.0, 1e-15);
    EXPECT_EQ(R(0, 0), 1.0);
}

TEST(Dcc, StudentScoresHaveUnitVarianceScale) {
    const CopulaSpec t{CopulaFamily::student, 5.0};
    Eigen::MatrixXd U(1, 1);
    U << 0.8;
    EXPECT_NEAR(recursion_scores(t, U)(0, 0), copula_scores(t, U)(0, 0) * std::sqrt(3.0 / 5.0), 1e-15);
    EXPECT_EQ(recursion_scores({CopulaFamily::gaussian, 0.0}, U), copula_scores({CopulaFamily::gaussian, 0.0}, U));
}

TEST(Dcc, InvalidParametersThrow) {
    EXPECT_THROW(validate(params_2x2(-0.1, 0.5, 0.0)), std::invalid_argument);
    EXPECT_THROW(validate(params_2x2(0.3, 0.7, 0.0)), std::invalid_argument);
    EXPECT_THROW(validate(params_2x2(0.1, 0.5, 1.5)), std::invalid_argument);
    DccParams asym = params_2x2(0.1, 0.5, 0.2);
    asym.qbar(0, 1) = 0.3;
    EXPECT_THROW(validate(asym), std::invalid_argument);
    EXPECT_THROW(dcc_filter(params_2x2(0.1, 0.5, 0.2), Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
}

TEST(Dcc, SimulationIsDeterministicAndUniform) {
    const DccParams p = params_2x2(0.05, 0.9, 0.5, {CopulaFamily::student, 8.0});
    const SimulatedDcc a = simulate_dcc(p, 5000, 17), b = simulate_dcc(p, 5000, 17);
    EXPECT_EQ(a.U, b.U);
    EXPECT_GT(a.U.minCoeff(), 0.0);
    EXPECT_LT(a.U.maxCoeff(), 1.0);
    EXPECT_NEAR(a.U.col(0).mean(), 0.5, 0.02);
}

TEST(Dcc, FitRecoversParameters) {
    const DccParams truth = params_2x2(0.05, 0.9, 0.4);
    const SimulatedDcc sim = simulate_dcc(truth, 3000, 8);
    const DccFit f = fit_dcc(sim.U, CopulaFamily::gaussian);
    ASSERT_TRUE(f.se_available);
    EXPECT_LT(std::abs(f.params.c[0] - 0.05), 4.0 * f.se[0]);
    EXPECT_LT(std::abs(f.params.d[0] - 0.9), 4.0 * f.se[1]);
    EXPECT_NEAR(f.loglik, dcc_copula_loglik(f.params, sim.U), 1e-8);
    EXPECT_EQ(dcc_parameter_names(1, 1, CopulaFamily::student), (std::vector<std::string>{"c1", "d1", "shape"}));
}

TEST(Dcc, GarchResidualSourceNeedsResiduals) {
    DccFitOptions o;
    o.source = ScoreSource::garch_residuals;
    EXPECT_THROW(fit_dcc(Eigen::MatrixXd::Constant(50, 2, 0.5), CopulaFamily::gaussian, o), std::invalid_argument);
}
