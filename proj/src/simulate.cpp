#include "sysrisk/simulate.hpp"

#include "sysrisk/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace sysrisk {

namespace {

Eigen::MatrixXd equicorrelation(Eigen::Index k, double rho) {
    Eigen::MatrixXd R = Eigen::MatrixXd::Constant(k, k, rho);
    R.diagonal().setOnes();
    return R;
}

}  // namespace

SyntheticPanel simulate_regime_panel(const RegimePanelSpec& spec, std::uint64_t seed) {
    if (spec.instruments < 1) throw std::invalid_argument("simulate_regime_panel: need at least one instrument");
    if (spec.block_start + spec.block_length > spec.periods || spec.block_length == 0)
        throw std::invalid_argument("simulate_regime_panel: stress block must lie inside the sample");
    validate(spec.innovations);

    const Eigen::Index k = spec.instruments + (spec.with_index ? 1 : 0);
    const auto T = static_cast<Eigen::Index>(spec.periods);
    const Eigen::LLT<Eigen::MatrixXd> calm(equicorrelation(k, spec.calm_correlation));
    const Eigen::LLT<Eigen::MatrixXd> stress(equicorrelation(k, spec.stress_correlation));
    if (calm.info() != Eigen::Success || stress.info() != Eigen::Success)
        throw std::invalid_argument("simulate_regime_panel: correlation matrices must be positive definite");

    const StandardizedDist dist(spec.innovations);
    const double abs_mean = dist.abs_moment();
    const double log_var = 2.0 * std::log(spec.volatility);
    const double omega = log_var * (1.0 - spec.persistence);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd logh = Eigen::VectorXd::Constant(k, log_var);
    Eigen::VectorXd zprev = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd absprev = Eigen::VectorXd::Constant(k, abs_mean);
    Eigen::MatrixXd prices(T + 1, k);
    prices.row(0).setConstant(100.0);

    SyntheticPanel out;
    for (Eigen::Index t = 0; t < T; ++t) {
        const bool in_block = static_cast<std::size_t>(t) >= spec.block_start &&
                              static_cast<std::size_t>(t) < spec.block_start + spec.block_length;
        out.stressed.push_back(in_block);
        Eigen::VectorXd g(k);
        for (auto& v : g) v = normal(rng);
        const Eigen::VectorXd x = (in_block ? stress : calm).matrixL() * g;
        for (Eigen::Index i = 0; i < k; ++i) {
            logh[i] = omega + spec.leverage * zprev[i] + spec.magnitude * (absprev[i] - abs_mean) + spec.persistence * logh[i];
            const double u = 0.5 * std::erfc(-x[i] / std::sqrt(2.0));
            const double z = dist.quantile(std::clamp(u, 1e-15, 1.0 - 1e-15));
            zprev[i] = z;
            absprev[i] = std::abs(z);
            const double r = (in_block ? spec.stress_scale : 1.0) * std::exp(0.5 * logh[i]) * z;
            prices(t + 1, i) = prices(t, i) * std::exp(r);
        }
    }

    using namespace std::chrono;
    const sys_days first{spec.start};
    for (Eigen::Index t = 0; t <= T; ++t) out.prices.dates.push_back(Date{first + weeks{t}});
    for (int i = 1; i <= spec.instruments; ++i) out.insurer_tickers.push_back("INS" + std::to_string(i));
    out.prices.tickers = out.insurer_tickers;
    if (spec.with_index) {
        out.index_ticker = "INDEX";
        out.prices.tickers.insert(out.prices.tickers.begin(), out.index_ticker);
        // Index first: move its column to the front.
        Eigen::MatrixXd reordered(T + 1, k);
        reordered.col(0) = prices.col(k - 1);
        reordered.rightCols(k - 1) = prices.leftCols(k - 1);
        prices = std::move(reordered);
    }
    out.prices.prices = std::move(prices);
    out.block_first = out.prices.dates[spec.block_start + 1];
    out.block_last = out.prices.dates[spec.block_start + spec.block_length];
    return out;
}

void write_price_table(std::ostream& out, const PriceTable& p) {
    out << "date";
    for (const auto& t : p.tickers) out << ',' << t;
    out << '\n';
    for (Eigen::Index r = 0; r < p.prices.rows(); ++r) {
        out << format_date(p.dates[static_cast<std::size_t>(r)]);
        for (Eigen::Index j = 0; j < p.prices.cols(); ++j) {
            out << ',';
            if (!std::isnan(p.prices(r, j))) out << format_double(p.prices(r, j));
        }
        out << '\n';
    }
}

}  // namespace sysrisk
