#include "sysrisk/covar.hpp"
#include "sysrisk/summary.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sysrisk;

namespace {

const DistSpec kNormal{Family::normal, 1.0, 0.0};
const CopulaSpec kGauss{CopulaFamily::gaussian, 0.0};

}  // namespace

TEST(Covar, ConditionalVarValues) {
    EXPECT_NEAR(conditional_var({0.0, 1.0, kNormal}, 0.05), -1.6448536, 1e-7);
    EXPECT_NEAR(conditional_var({0.01, 4.0, kNormal}, 0.05), -3.2797072, 1e-7);
    const DistSpec skew{Family::skew_student_t, 0.85, 10.0};
    const double v = conditional_var({0.002, 2.25, skew}, 0.05);
    EXPECT_NEAR(dist_cdf(skew, (v - 0.002) / 1.5), 0.05, 1e-12);
}

TEST(Covar, IndependenceGivesUnconditionalQuantile) {
    const MarginalState m{0.01, 0.5, DistSpec{Family::skew_student_t, 0.9, 6.0}};
    const RiskLevels lv{0.05, 0.01};
    const CovarSolution s = solve_covar(kGauss, 0.0, m, lv);
    EXPECT_NEAR(s.u, lv.beta, 1e-12);
    EXPECT_NEAR(s.covar, conditional_var(m, lv.beta), 1e-10);
    EXPECT_LT(s.residual, 1e-10);
}

TEST(Covar, NearComonotoneApproachesProductLevel) {
    const RiskLevels lv{0.05, 0.05};
    const CovarSolution s = solve_covar(kGauss, 0.999999, {0.0, 1.0, kNormal}, lv);
    EXPECT_NEAR(s.u, lv.alpha * lv.beta, 2e-4);
}

TEST(Covar, ScaleHomogeneity) {
    for (const CopulaSpec& c : {kGauss, CopulaSpec{CopulaFamily::student, 5.0}}) {
        const double a = covar_at(c, 0.4, {0.0, 1.0, kNormal}, {});
        const double b = covar_at(c, 0.4, {0.0, 4.0, kNormal}, {});
        EXPECT_NEAR(b, 2.0 * a, 1e-12);
    }
}

TEST(Covar, MonotoneInCorrelationAndBounded) {
    const RiskLevels lv{0.05, 0.05};
    for (const CopulaSpec& c : {kGauss, CopulaSpec{CopulaFamily::student, 4.0}}) {
        double previous = std::numeric_limits<double>::infinity();
        for (double rho = 0.0; rho <= 0.99 + 1e-12; rho += 0.01) {
            const CovarSolution s = solve_covar(c, rho, {0.0, 1.0, kNormal}, lv);
            EXPECT_LE(s.covar, previous + 1e-12) << rho;
            EXPECT_GE(s.u, lv.alpha * lv.beta - 1e-15);
            EXPECT_LE(s.u, lv.beta + 1e-12);
            EXPECT_LT(s.residual, 1e-10);
            previous = s.covar;
        }
    }
}

TEST(Covar, SolvesDefiningEquation) {
    const CopulaSpec t{CopulaFamily::student, 7.0};
    const RiskLevels lv{0.05, 0.01};
    const CovarSolution s = solve_covar(t, -0.3, {0.0, 1.0, kNormal}, lv);
    EXPECT_NEAR(bivariate_copula_cdf(t, s.u, lv.alpha, -0.3), lv.alpha * lv.beta, 1e-10);
}

TEST(Covar, ConstantCorrelationSeriesVariesOnlyThroughMarginal) {
    CovarPairInput in;
    in.copula = kGauss;
    in.index_ticker = "IDX";
    in.insurer_ticker = "INS";
    in.rho = Eigen::VectorXd::Constant(3, 0.5);
    in.index_mu = Eigen::Vector3d(0.0, 0.0, 0.01);
    in.index_h = Eigen::Vector3d(1.0, 4.0, 1.0);
    in.index_dist = kNormal;
    in.insurer_mu = Eigen::VectorXd::Zero(3);
    in.insurer_h = Eigen::Vector3d(1.0, 1.0, 9.0);
    in.insurer_dist = kNormal;
    in.dates = {Date{}, Date{}, Date{}};
    const CoVaRSeries s = covar_series(in, {});
    EXPECT_NEAR(s.values[1], 2.0 * s.values[0], 1e-12);
    EXPECT_NEAR(s.values[2], s.values[0] + 0.01, 1e-12);
    EXPECT_NEAR(s.var_j[2], 3.0 * s.var_j[0], 1e-12);
    EXPECT_EQ(s.u[0], s.u[1]);
}

TEST(Covar, InvalidLevelsThrow) {
    EXPECT_THROW(validate(RiskLevels{0.0, 0.05}), std::invalid_argument);
    EXPECT_THROW(validate(RiskLevels{0.05, 1.0}), std::invalid_argument);
}

TEST(Summary, Type7Quantiles) {
    const double v[] = {1.0, 2.0, 3.0, 4.0};
    EXPECT_DOUBLE_EQ(quantile_type7(v, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile_type7(v, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile_type7(v, 1.0), 4.0);
    const double one[] = {7.0};
    EXPECT_DOUBLE_EQ(quantile_type7(one, 0.3), 7.0);
}

TEST(Summary, HandBuiltThreeThreeSplit) {
    const double v[] = {10.0, 3.0, 20.0, 1.0, 30.0, 2.0};
    const int l[] = {2, 1, 2, 1, 2, 1};
    const auto s = regime_summary(v, l, 2);
    const Summary& a = s.at(1);
    EXPECT_EQ(a.count, 3u);
    EXPECT_DOUBLE_EQ(a.mean, 2.0);
    EXPECT_DOUBLE_EQ(a.median, 2.0);
    EXPECT_DOUBLE_EQ(a.q1, 1.5);
    EXPECT_DOUBLE_EQ(a.q3, 2.5);
    EXPECT_DOUBLE_EQ(a.min, 1.0);
    EXPECT_DOUBLE_EQ(a.max, 3.0);
    const Summary& b = s.at(2);
    EXPECT_DOUBLE_EQ(b.q1, 15.0);
    EXPECT_DOUBLE_EQ(b.q3, 25.0);
    EXPECT_DOUBLE_EQ(b.mean, 20.0);
}

TEST(Summary, SingleRegimeEqualsWholeSample) {
    const double v[] = {0.3, -1.0, 2.5, 0.0, 4.0};
    const int l[] = {1, 1, 1, 1, 1};
    const Summary whole = summarize(v);
    const Summary one = regime_summary(v, l, 1).at(1);
    EXPECT_EQ(one.count, whole.count);
    EXPECT_EQ(one.median, whole.median);
    EXPECT_EQ(one.q1, whole.q1);
    EXPECT_EQ(one.q3, whole.q3);
    EXPECT_EQ(one.mean, whole.mean);
}

TEST(Summary, EmptyRegimeThrows) {
    const double v[] = {1.0, 2.0};
    const int l[] = {1, 1};
    EXPECT_THROW(regime_summary(v, l, 2), std::invalid_argument);
    EXPECT_THROW(summarize(std::span<const double>{}), std::invalid_argument);
}
