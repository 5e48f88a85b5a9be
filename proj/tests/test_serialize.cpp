#include "sysrisk/serialize.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

using namespace sysrisk;

TEST(Serialize, FormatDoubleRoundTrips) {
    for (double x : {0.1, -1e-300, 1.0 / 3.0, 123456789.125, 5e-324, std::numeric_limits<double>::max()})
        EXPECT_EQ(parse_double(format_double(x)), x);
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(std::nan("")), "nan");
    EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_TRUE(std::isnan(parse_double("nan")));
    EXPECT_THROW(parse_double("1.0x"), std::invalid_argument);
    EXPECT_THROW(parse_double(""), std::invalid_argument);
}

TEST(Serialize, NonFiniteNumbersSurviveJson) {
    const json j = number_to_json(std::numeric_limits<double>::infinity());
    EXPECT_TRUE(j.is_string());
    EXPECT_TRUE(std::isinf(number_from_json(json::parse(j.dump()))));
    EXPECT_EQ(number_from_json(number_to_json(0.25)), 0.25);
}

TEST(Serialize, DistAndOrdersRoundTrip) {
    const DistSpec d{Family::ged, 1.0, 1.3};
    const DistSpec e = dist_spec_from_json(to_json(d));
    EXPECT_EQ(e.family, d.family);
    EXPECT_EQ(e.shape, d.shape);
    const ArmaEgarchOrders o{2, 0, 1, 3};
    const ArmaEgarchOrders p = orders_from_json(to_json(o));
    EXPECT_EQ(p.ar, 2);
    EXPECT_EQ(p.ma, 0);
    EXPECT_EQ(p.arch, 1);
    EXPECT_EQ(p.garch, 3);
}

TEST(Serialize, DccParamsRoundTrip) {
    DccParams p;
    p.c = Eigen::VectorXd::Constant(1, 0.03);
    p.d = Eigen::Vector2d(0.5, 0.4);
    p.qbar = Eigen::Matrix2d{{1.0, 0.2}, {0.2, 1.0}};
    p.copula = {CopulaFamily::student, 9.5};
    const DccParams q = dcc_params_from_json(json::parse(to_json(p).dump()));
    EXPECT_EQ(q.c, p.c);
    EXPECT_EQ(q.d, p.d);
    EXPECT_EQ(q.qbar, p.qbar);
    EXPECT_EQ(q.copula.shape, 9.5);
}

TEST(Serialize, Table3RoundTrip) {
    ValidityReport r;
    r.methods = {ClusterMethod::ward, ClusterMethod::kmeans};
    r.ks = {2, 3};
    double x = 0.1;
    for (ClusterMethod m : r.methods)
        for (int k : r.ks) {
            r.entries.push_back({m, k, x, 10 * x, x / 3, 1 / x});
            x += 0.07;
        }
    std::ostringstream a;
    write_table3(a, r);
    std::istringstream in(a.str());
    std::ostringstream b;
    write_table3(b, read_table3(in));
    const std::string text = a.str();
    EXPECT_EQ(text, b.str());
    EXPECT_EQ(text.substr(0, text.find('\n')), "method,index,k2,k3,optimal_k");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 2 * 4);
}

TEST(Serialize, Table5RoundTrip) {
    Table5Row row;
    row.index = "IDX";
    row.insurer = "INS1";
    row.fit.params.c = Eigen::VectorXd::Constant(1, 0.0123);
    row.fit.params.d = Eigen::VectorXd::Constant(1, 0.95);
    row.fit.params.qbar = Eigen::Matrix2d::Identity();
    row.fit.params.copula = {CopulaFamily::student, 12.0};
    row.fit.se = Eigen::Vector3d(0.001, 0.01, 3.0);
    row.fit.loglik = 42.5;
    Table5Row gauss = row;
    gauss.insurer = "INS2";
    gauss.fit.params.copula = {CopulaFamily::gaussian, 0.0};
    gauss.fit.se = Eigen::Vector2d(0.002, 0.02);
    std::ostringstream a;
    write_table5(a, {row, gauss});
    std::istringstream in(a.str());
    std::ostringstream b;
    write_table5(b, read_table5(in));
    EXPECT_EQ(a.str(), b.str());
}

TEST(Serialize, UnivariateFitRoundTrip) {
    UnivariateFit f;
    f.params = ArmaEgarchParams::zeros({1, 1, 1, 1}, {Family::skew_student_t, 0.9, 7.0});
    f.params.beta[0] = 0.93;
    f.params.omega = -0.1;
    const auto n = static_cast<Eigen::Index>(parameter_names(f.params.orders(), f.params.dist.family).size());
    f.se = Eigen::VectorXd::LinSpaced(n, 0.01, 0.1);
    f.pvalues = Eigen::VectorXd::LinSpaced(n, 0.5, 0.001);
    f.filter.loglik = -123.25;
    const json a = to_json(f);
    EXPECT_EQ(to_json(univariate_fit_from_json(json::parse(a.dump()))).dump(), a.dump());
}
