#include "sysrisk/covar.hpp"

#include "sysrisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sysrisk {

void validate(const RiskLevels& lv) {
    if (!(lv.alpha > 0.0 && lv.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(lv.beta > 0.0 && lv.beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
}

double conditional_var(const MarginalState& m, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("VaR level must lie in (0,1)");
    if (!(m.h > 0.0)) throw std::invalid_argument("conditional variance must be positive");
    return m.mu + std::sqrt(m.h) * dist_quantile(m.dist, alpha);
}

CovarSolution solve_covar(const CopulaSpec& copula, double rho, const MarginalState& index, const RiskLevels& lv, double guess) {
    validate(lv);
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("correlation must lie in (-1,1)");
    if (!(index.h > 0.0)) throw std::invalid_argument("conditional variance must be positive");
    const double target = lv.alpha * lv.beta;
    auto g = [&](double u) { return bivariate_copula_cdf(copula, u, lv.alpha, rho) - target; };

    // The Frechet bounds give C(lo, alpha) <= lo and C(hi, alpha) >= alpha + hi - 1, so the
    // bracket holds whenever the target sits strictly between them.
    double lo = 1e-12;
    double hi = 1.0 - 1e-12;
    if (!(target > lo && target < lv.alpha + hi - 1.0)) throw NumericError("CoVaR root is not bracketed in (1e-12, 1 - 1e-12)");

    // Newton on u with dC/du = P(V <= alpha | U = u), kept inside a shrinking bracket.
    // C(., alpha) is continuous and increasing, so the bisection fallback cannot fail.
    double u = std::isfinite(guess) && guess > lo && guess < hi ? guess : lv.beta * std::sqrt(lv.alpha);
    double gu = g(u);
    for (int iter = 0; iter < 200 && std::abs(gu) > 1e-15 && hi - lo > 1e-12; ++iter) {
        if (gu < 0.0) lo = u;
        else hi = u;
        double next = u - gu / bivariate_copula_hfunc(copula, u, lv.alpha, rho);
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            // Geometric midpoint while the bracket spans orders of magnitude.
            next = hi > 4.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        }
        const double step = std::abs(next - u);
        u = next;
        gu = g(u);
        if (step < 1e-15 * std::max(u, 1e-3)) break;
    }

    CovarSolution s;
    s.u = u;
    s.residual = std::abs(gu);
    if (!(s.residual < 1e-10)) {
        std::ostringstream msg;
        msg << "CoVaR root residual " << s.residual << " exceeds 1e-10";
        throw NumericError(msg.str());
    }
    s.covar = index.mu + std::sqrt(index.h) * dist_quantile(index.dist, s.u);
    return s;
}

double covar_at(const CopulaSpec& copula, double rho, const MarginalState& index, const RiskLevels& lv) {
    return solve_covar(copula, rho, index, lv).covar;
}

CoVaRSeries covar_series(const CovarPairInput& in, const RiskLevels& lv) {
    const auto T = in.rho.size();
    if (in.index_mu.size() != T || in.index_h.size() != T || in.insurer_mu.size() != T || in.insurer_h.size() != T ||
        static_cast<Eigen::Index>(in.dates.size()) != T)
        throw std::invalid_argument("covar_series: inputs are not aligned");
    CoVaRSeries s;
    s.dates = in.dates;
    s.index_ticker = in.index_ticker;
    s.insurer_ticker = in.insurer_ticker;
    s.levels = lv;
    s.rho = in.rho;
    s.values.resize(T);
    s.var_j.resize(T);
    s.u.resize(T);
    s.residual.resize(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        const double guess = t > 0 ? s.u[t - 1] : std::numeric_limits<double>::quiet_NaN();
        const auto sol = solve_covar(in.copula, in.rho[t], {in.index_mu[t], in.index_h[t], in.index_dist}, lv, guess);
        s.values[t] = sol.covar;
        s.u[t] = sol.u;
        s.residual[t] = sol.residual;
        s.var_j[t] = conditional_var({in.insurer_mu[t], in.insurer_h[t], in.insurer_dist}, lv.alpha);
    }
    return s;
}

}  // namespace sysrisk
