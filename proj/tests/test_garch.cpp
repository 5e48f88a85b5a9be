#include "sysrisk/error.hpp"
#include "sysrisk/garch.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace sysrisk;

namespace {

ArmaEgarchParams example_params() {
    auto p = ArmaEgarchParams::zeros({1, 1, 1, 1}, DistSpec{Family::normal, 1.0, 0.0});
    p.mu = 0.1;
    p.ar[0] = 0.4;
    p.ma[0] = -0.3;
    p.omega = -0.2;
    p.alpha[0] = -0.1;
    p.gamma[0] = 0.25;
    p.beta[0] = 0.8;
    return p;
}

}  // namespace

TEST(Garch, FilterMatchesHandRecursion) {
    const ArmaEgarchParams p = example_params();
    const Eigen::Vector3d r(0.5, -1.0, 0.2);
    const FilterOutput f = arma_egarch_filter(p, r);

    const double mean = r.mean();
    const double var = (r.array() - mean).square().mean();
    const double Ez = std::sqrt(2.0 / std::numbers::pi);
    auto logpdf = [](double z) { return -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * z * z; };

    // t = 0: pre-sample return = mean, residual 0, log h = log var, no news.
    const double m0 = 0.1 + 0.4 * mean;
    const double lh0 = -0.2 + 0.8 * std::log(var);
    const double z0 = (r[0] - m0) / std::exp(0.5 * lh0);
    // t = 1
    const double y0 = r[0] - m0;
    const double m1 = 0.1 + 0.4 * r[0] - 0.3 * y0;
    const double lh1 = -0.2 - 0.1 * z0 + 0.25 * (std::abs(z0) - Ez) + 0.8 * lh0;
    const double z1 = (r[1] - m1) / std::exp(0.5 * lh1);
    // t = 2
    const double y1 = r[1] - m1;
    const double m2 = 0.1 + 0.4 * r[1] - 0.3 * y1;
    const double lh2 = -0.2 - 0.1 * z1 + 0.25 * (std::abs(z1) - Ez) + 0.8 * lh1;
    const double z2 = (r[2] - m2) / std::exp(0.5 * lh2);

    EXPECT_NEAR(f.mu[0], m0, 1e-15);
    EXPECT_NEAR(f.mu[1], m1, 1e-15);
    EXPECT_NEAR(f.mu[2], m2, 1e-15);
    EXPECT_NEAR(std::log(f.h[1]), lh1, 1e-14);
    EXPECT_NEAR(std::log(f.h[2]), lh2, 1e-14);
    EXPECT_NEAR(f.z[2], z2, 1e-14);
    const double ll = (-0.5 * lh0 + logpdf(z0)) + (-0.5 * lh1 + logpdf(z1)) + (-0.5 * lh2 + logpdf(z2));
    EXPECT_NEAR(f.loglik, ll, 1e-13);
}

TEST(Garch, PackUnpackRoundTrip) {
    auto p = ArmaEgarchParams::zeros({2, 1, 2, 2}, DistSpec{Family::skew_student_t, 0.9, 7.0});
    p.ar << 0.1, 0.2;
    p.beta << 0.5, 0.3;
    p.gamma << 0.2, -0.1;
    const Eigen::VectorXd v = pack(p);
    EXPECT_EQ(static_cast<std::size_t>(v.size()), parameter_names(p.orders(), p.dist.family).size());
    EXPECT_EQ(pack(unpack(v, p.orders(), p.dist.family)), v);
    const auto names = parameter_names({1, 1, 2, 2}, Family::skew_student_t);
    const std::vector<std::string> expected{"mu", "ar1", "ma1", "omega", "alpha1", "alpha2", "beta1", "beta2", "gamma1", "gamma2", "skew", "shape"};
    EXPECT_EQ(names, expected);
}

TEST(Garch, ScoreMatchesCentralDifferences) {
    ArmaEgarchParams p = example_params();
    p.dist = {Family::skew_student_t, 0.9, 8.0};
    const Eigen::VectorXd r = simulate_arma_egarch(p, 400, 100, 3);
    const Eigen::VectorXd g = arma_egarch_score(p, r);
    const Eigen::VectorXd x = pack(p);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-5;
        Eigen::VectorXd a = x, b = x;
        a[i] += h;
        b[i] -= h;
        const double fd = (arma_egarch_loglik(unpack(a, p.orders(), p.dist.family), r) -
                           arma_egarch_loglik(unpack(b, p.orders(), p.dist.family), r)) / (2.0 * h);
        EXPECT_NEAR(g[i], fd, 1e-4 * std::max(1.0, std::abs(fd))) << i;
    }
}

TEST(Garch, SimulationIsDeterministic) {
    const ArmaEgarchParams p = example_params();
    EXPECT_EQ(simulate_arma_egarch(p, 50, 10, 9), simulate_arma_egarch(p, 50, 10, 9));
    EXPECT_NE(simulate_arma_egarch(p, 50, 10, 9), simulate_arma_egarch(p, 50, 10, 10));
}

TEST(Garch, FitIsScaleEquivariant) {
    ArmaEgarchParams p = example_params();
    p.beta[0] = 0.9;
    const Eigen::VectorXd r = simulate_arma_egarch(p, 1500, 200, 21);
    const ArmaEgarchOrders o{1, 1, 1, 1};
    const UnivariateFit a = fit_arma_egarch(o, {Family::normal, 1.0, 0.0}, r);
    const UnivariateFit b = fit_arma_egarch(o, {Family::normal, 1.0, 0.0}, Eigen::VectorXd(10.0 * r));
    // Scaling returns by s multiplies mu by s and shifts omega by 2 log(s)(1 - sum beta).
    EXPECT_NEAR(b.params.mu, 10.0 * a.params.mu, 1e-4);
    EXPECT_NEAR(b.params.beta[0], a.params.beta[0], 1e-4);
    EXPECT_NEAR(b.params.omega, a.params.omega + 2.0 * std::log(10.0) * (1.0 - a.params.beta[0]), 1e-3);
    EXPECT_NEAR(b.filter.loglik, a.filter.loglik - r.size() * std::log(10.0), 1e-3);
}

TEST(Garch, FitRecoversSimulatedModel) {
    ArmaEgarchParams p = example_params();
    p.beta[0] = 0.9;
    p.dist = {Family::student_t, 1.0, 6.0};
    const Eigen::VectorXd r = simulate_arma_egarch(p, 3000, 300, 5);
    const UnivariateFit f = fit_arma_egarch({1, 1, 1, 1}, {Family::student_t, 1.0, 8.0}, r);
    ASSERT_TRUE(f.diagnostics.se_available);
    const Eigen::VectorXd est = pack(f.params), truth = pack(p);
    for (Eigen::Index i = 0; i < est.size(); ++i) EXPECT_LT(std::abs(est[i] - truth[i]), 4.0 * f.se[i]) << i;
    // p-values are two-sided normal.
    for (Eigen::Index i = 0; i < est.size(); ++i) EXPECT_NEAR(f.pvalues[i], std::erfc(std::abs(est[i] / f.se[i]) / std::sqrt(2.0)), 1e-12);
}

TEST(Garch, RejectsBadInput) {
    const ArmaEgarchOrders o{1, 1, 2, 2};
    EXPECT_THROW(fit_arma_egarch(o, {}, Eigen::VectorXd::Zero(2)), DataError);
    EXPECT_THROW(fit_arma_egarch(o, {}, Eigen::VectorXd::Constant(300, 0.01)), NumericError);
    Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(300, -1.0, 1.0);
    r[7] = std::nan("");
    EXPECT_THROW(fit_arma_egarch(o, {}, r), DataError);
}
