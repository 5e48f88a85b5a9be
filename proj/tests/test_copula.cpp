#include "sysrisk/copula.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace sysrisk;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double integrate(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12);
}

double bvn_density(double s, double t, double rho) {
    const double det = 1.0 - rho * rho;
    return std::exp(-0.5 * (s * s - 2.0 * rho * s * t + t * t) / det) / (2.0 * std::numbers::pi * std::sqrt(det));
}

}  // namespace

TEST(Copula, BivariateNormalMatchesQuadrature) {
    for (auto [x, y, rho] : {std::tuple{0.3, -0.4, 0.5}, {-1.5, 2.0, -0.7}, {-2.5, -2.0, 0.95}, {1.0, 1.0, 0.0}}) {
        const double q = integrate([&](double s) { return integrate([&](double t) { return bvn_density(s, t, rho); }, -kInf, y); }, -kInf, x);
        EXPECT_NEAR(bivariate_normal_cdf(x, y, rho), q, 1e-10);
    }
}

TEST(Copula, BivariateNormalSpecialValues) {
    boost::math::normal_distribution<double> n;
    EXPECT_NEAR(bivariate_normal_cdf(0.0, 0.0, 0.5), 0.25 + std::asin(0.5) / (2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(bivariate_normal_cdf(0.7, -0.2, 0.0), boost::math::cdf(n, 0.7) * boost::math::cdf(n, -0.2), 1e-15);
}

TEST(Copula, StudentOrthantProbability) {
    // P(X <= 0, Y <= 0) = 1/4 + asin(rho)/(2 pi) for every elliptical law.
    for (double nu : {3.0, 10.0})
        for (double rho : {-0.6, 0.2, 0.8}) EXPECT_NEAR(bivariate_t_cdf(0.0, 0.0, rho, nu), 0.25 + std::asin(rho) / (2.0 * std::numbers::pi), 1e-10);
}

TEST(Copula, IndependenceIsProduct) {
    EXPECT_NEAR(bivariate_copula_cdf({CopulaFamily::gaussian, 0.0}, 0.3, 0.6, 0.0), 0.18, 1e-14);
    const double u[] = {0.2, 0.7};
    EXPECT_NEAR(copula_density({CopulaFamily::gaussian, 0.0}, Eigen::Map<const Eigen::Vector2d>(u), Eigen::Matrix2d::Identity()), 1.0, 1e-14);
}

TEST(Copula, StudentCopulaAtZeroCorrelationIsNotIndependence) {
    // Shared chi-square mixing makes the joint tails heavier than the product.
    const double c = bivariate_copula_cdf({CopulaFamily::student, 4.0}, 0.05, 0.05, 0.0);
    EXPECT_GT(c, 0.05 * 0.05 * 1.5);
}

TEST(Copula, HFunctionIsPartialDerivative) {
    for (const CopulaSpec& c : {CopulaSpec{CopulaFamily::gaussian, 0.0}, CopulaSpec{CopulaFamily::student, 6.0}}) {
        for (auto [u, v, rho] : {std::tuple{0.3, 0.05, 0.6}, {0.01, 0.2, -0.4}, {0.8, 0.5, 0.9}}) {
            const double h = 1e-5;
            const double fd = (bivariate_copula_cdf(c, u + h, v, rho) - bivariate_copula_cdf(c, u - h, v, rho)) / (2.0 * h);
            EXPECT_NEAR(bivariate_copula_hfunc(c, u, v, rho), fd, 1e-6) << to_string(c.family);
        }
    }
}

TEST(Copula, DensityIntegratesToRectangleMass) {
    // Interior rectangle, away from the corner singularities of the density.
    const CopulaSpec c{CopulaFamily::student, 5.0};
    const double rho = 0.5, a0 = 0.2, a1 = 0.3, b0 = 0.4, b1 = 0.6;
    Eigen::Matrix2d R;
    R << 1.0, rho, rho, 1.0;
    auto gk = [](auto f, double a, double b) { return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 5, 1e-11); };
    const double q = gk([&](double u) { return gk([&](double v) { return copula_density(c, Eigen::Vector2d(u, v), R); }, b0, b1); }, a0, a1);
    auto C = [&](double u, double v) { return bivariate_copula_cdf(c, u, v, rho); };
    EXPECT_NEAR(q, C(a1, b1) - C(a0, b1) - C(a1, b0) + C(a0, b0), 1e-9);
}

TEST(Copula, LogDensityMatchesClosedForm) {
    // Gaussian copula density in closed form for two dimensions.
    const double rho = -0.35, u = 0.12, v = 0.77;
    boost::math::normal_distribution<double> n;
    const double x = boost::math::quantile(n, u), y = boost::math::quantile(n, v);
    const double expected =
        -0.5 * std::log(1.0 - rho * rho) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * (1.0 - rho * rho));
    Eigen::Matrix2d R;
    R << 1.0, rho, rho, 1.0;
    EXPECT_NEAR(copula_log_density({CopulaFamily::gaussian, 0.0}, Eigen::Vector2d(u, v), R), expected, 1e-12);
}

TEST(Copula, ScoresUseUnscaledStudentQuantiles) {
    const EllipticalCopula c({CopulaFamily::student, 7.0}, 2);
    boost::math::students_t_distribution<double> t(7.0);
    EXPECT_NEAR(c.score(0.9), boost::math::quantile(t, 0.9), 1e-13);
    EXPECT_NEAR(c.score_cdf(c.score(0.33)), 0.33, 1e-14);
}

TEST(Copula, InvalidInputThrows) {
    EXPECT_THROW(validate(CopulaSpec{CopulaFamily::student, 2.0}), std::invalid_argument);
    EXPECT_THROW(bivariate_copula_cdf({CopulaFamily::gaussian, 0.0}, 0.3, 0.3, 1.0), std::invalid_argument);
    EXPECT_THROW(copula_family_from_string("clayton"), std::invalid_argument);
    Eigen::Matrix2d bad;
    bad << 1.0, 1.5, 1.5, 1.0;
    EXPECT_THROW(copula_density({CopulaFamily::gaussian, 0.0}, Eigen::Vector2d(0.5, 0.5), bad), std::invalid_argument);
}
