#include "sysrisk/dist.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace sysrisk;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double integrate(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-12);
}

// The skewed density has a kink where its two halves meet.
double junction(const StandardizedDist& d) {
    const double xi = is_skewed(d.spec().family) ? d.spec().skew : 1.0;
    return d.quantile(1.0 / (1.0 + xi * xi));
}

// Integral over [a, b], split at 0 and at the junction when they fall inside.
template <class F>
double integrate_split(const StandardizedDist& d, F f, double a, double b) {
    std::vector<double> cuts{a};
    for (double c : {std::min(0.0, junction(d)), std::max(0.0, junction(d))})
        if (c > cuts.back() && c < b) cuts.push_back(c);
    cuts.push_back(b);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate(f, cuts[i], cuts[i + 1]);
    return sum;
}

template <class F>
double integrate_line(const StandardizedDist& d, F f) {
    return integrate_split(d, f, -kInf, kInf);
}

// Quantile oracle by plain bisection on the cdf.
double bisect_quantile(const StandardizedDist& d, double p) {
    double lo = -200.0, hi = 200.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (d.cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

const DistSpec kLaws[] = {
    {Family::normal, 1.0, 0.0},         {Family::skew_normal, 0.7, 0.0},     {Family::skew_normal, 1.4, 0.0},
    {Family::student_t, 1.0, 4.5},      {Family::student_t, 1.0, 30.0},      {Family::skew_student_t, 0.8, 5.0},
    {Family::skew_student_t, 1.25, 12}, {Family::ged, 1.0, 1.0},             {Family::ged, 1.0, 2.5},
};

}  // namespace

TEST(Dist, StandardNormalValues) {
    const DistSpec n{Family::normal, 1.0, 0.0};
    EXPECT_NEAR(dist_quantile(n, 0.05), -1.6448536269514722, 1e-12);
    EXPECT_NEAR(dist_cdf(n, 1.96), 0.9750021048517795, 1e-14);
    EXPECT_NEAR(dist_pdf(n, 0.0), 0.3989422804014327, 1e-15);
}

TEST(Dist, GedWithShapeTwoIsNormal) {
    const DistSpec g{Family::ged, 1.0, 2.0}, n{Family::normal, 1.0, 0.0};
    for (double z : {-2.5, -0.3, 0.0, 1.1, 3.0}) {
        EXPECT_NEAR(dist_logpdf(g, z), dist_logpdf(n, z), 1e-12);
        EXPECT_NEAR(dist_cdf(g, z), dist_cdf(n, z), 1e-12);
    }
}

TEST(Dist, SymmetricFamiliesIgnoreSkew) {
    const DistSpec a{Family::student_t, 1.0, 7.0}, b{Family::student_t, 2.0, 7.0};
    EXPECT_DOUBLE_EQ(dist_logpdf(a, 0.7), dist_logpdf(b, 0.7));
}

TEST(Dist, DensityIsStandardized) {
    for (const auto& spec : kLaws) {
        const StandardizedDist d(spec);
        const double mass = integrate_line(d, [&](double z) { return d.pdf(z); });
        const double mean = integrate_line(d, [&](double z) { return z * d.pdf(z); });
        const double var = integrate_line(d, [&](double z) { return z * z * d.pdf(z); }) - mean * mean;
        EXPECT_NEAR(mass, 1.0, 1e-10) << to_string(spec.family);
        EXPECT_NEAR(mean, 0.0, 1e-9) << to_string(spec.family);
        EXPECT_NEAR(var, 1.0, 1e-7) << to_string(spec.family);
    }
}

TEST(Dist, AbsoluteMomentMatchesQuadrature) {
    for (const auto& spec : kLaws) {
        const StandardizedDist d(spec);
        const double m = integrate_line(d, [&](double z) { return std::abs(z) * d.pdf(z); });
        EXPECT_NEAR(d.abs_moment(), m, 1e-11) << to_string(spec.family) << " xi=" << spec.skew;
    }
}

TEST(Dist, CdfIsIntegralOfPdf) {
    for (const auto& spec : kLaws) {
        const StandardizedDist d(spec);
        for (double z : {-2.0, -0.4, 0.3, 1.7}) {
            const double lo = std::min(z, -1.0);
            const double tail = d.cdf(lo);
            EXPECT_NEAR(d.cdf(z), tail + integrate_split(d, [&](double s) { return d.pdf(s); }, lo, z), 1e-10);
        }
    }
}

TEST(Dist, QuantileMatchesBisection) {
    for (const auto& spec : kLaws) {
        const StandardizedDist d(spec);
        for (double p : {1e-5, 0.01, 0.05, 0.3, 0.5, 0.8, 0.99}) EXPECT_NEAR(d.quantile(p), bisect_quantile(d, p), 1e-9);
    }
}

TEST(Dist, QuantileRejectsOutOfRange) {
    const DistSpec n{Family::normal, 1.0, 0.0};
    EXPECT_THROW(dist_quantile(n, 0.0), std::domain_error);
    EXPECT_THROW(dist_quantile(n, 1.0), std::domain_error);
}

TEST(Dist, InvalidParametersThrow) {
    EXPECT_THROW(validate(DistSpec{Family::student_t, 1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW(validate(DistSpec{Family::skew_normal, 0.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(validate(DistSpec{Family::ged, 1.0, -1.0}), std::invalid_argument);
    EXPECT_NO_THROW(validate(DistSpec{Family::normal, -5.0, 0.0}));
}

TEST(Dist, FamilyNamesRoundTrip) {
    for (Family f : {Family::normal, Family::skew_normal, Family::student_t, Family::skew_student_t, Family::ged})
        EXPECT_EQ(family_from_string(to_string(f)), f);
    EXPECT_EQ(family_from_string("sstd"), Family::skew_student_t);
    EXPECT_THROW(family_from_string("cauchy"), std::invalid_argument);
}

TEST(Dist, SamplingIsDeterministicAndStandardized) {
    const DistSpec spec{Family::skew_student_t, 0.85, 9.0};
    const Eigen::VectorXd a = dist_sample(spec, 200000, 11);
    EXPECT_EQ(a, dist_sample(spec, 200000, 11));
    EXPECT_NE(a, dist_sample(spec, 200000, 12));
    const double mean = a.mean();
    const double var = (a.array() - mean).square().mean();
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(var, 1.0, 0.03);
}
