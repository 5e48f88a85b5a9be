#include "sysrisk/garch.hpp"

#include "sysrisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace sysrisk {

ArmaEgarchOrders ArmaEgarchParams::orders() const {
    if (alpha.size() != gamma.size()) throw std::invalid_argument("alpha and gamma must have the same length");
    return {static_cast<int>(ar.size()), static_cast<int>(ma.size()), static_cast<int>(alpha.size()),
            static_cast<int>(beta.size())};
}

ArmaEgarchParams ArmaEgarchParams::zeros(const ArmaEgarchOrders& o, const DistSpec& dist) {
    if (o.ar < 0 || o.ma < 0 || o.arch < 0 || o.garch < 0) throw std::invalid_argument("negative model order");
    ArmaEgarchParams p;
    p.ar = Eigen::VectorXd::Zero(o.ar);
    p.ma = Eigen::VectorXd::Zero(o.ma);
    p.alpha = Eigen::VectorXd::Zero(o.arch);
    p.gamma = Eigen::VectorXd::Zero(o.arch);
    p.beta = Eigen::VectorXd::Zero(o.garch);
    p.dist = dist;
    return p;
}

std::vector<std::string> parameter_names(const ArmaEgarchOrders& o, Family family) {
    std::vector<std::string> names{"mu"};
    for (int j = 1; j <= o.ar; ++j) names.push_back("ar" + std::to_string(j));
    for (int j = 1; j <= o.ma; ++j) names.push_back("ma" + std::to_string(j));
    names.push_back("omega");
    for (int j = 1; j <= o.arch; ++j) names.push_back("alpha" + std::to_string(j));
    for (int j = 1; j <= o.garch; ++j) names.push_back("beta" + std::to_string(j));
    for (int j = 1; j <= o.arch; ++j) names.push_back("gamma" + std::to_string(j));
    if (is_skewed(family)) names.push_back("skew");
    if (has_shape(family)) names.push_back("shape");
    return names;
}

Eigen::VectorXd pack(const ArmaEgarchParams& p) {
    const auto o = p.orders();
    const Family fam = p.dist.family;
    Eigen::VectorXd v(parameter_names(o, fam).size());
    Eigen::Index k = 0;
    v[k++] = p.mu;
    v.segment(k, o.ar) = p.ar;
    k += o.ar;
    v.segment(k, o.ma) = p.ma;
    k += o.ma;
    v[k++] = p.omega;
    v.segment(k, o.arch) = p.alpha;
    k += o.arch;
    v.segment(k, o.garch) = p.beta;
    k += o.garch;
    v.segment(k, o.arch) = p.gamma;
    k += o.arch;
    if (is_skewed(fam)) v[k++] = p.dist.skew;
    if (has_shape(fam)) v[k++] = p.dist.shape;
    return v;
}

ArmaEgarchParams unpack(const Eigen::VectorXd& v, const ArmaEgarchOrders& o, Family family) {
    if (static_cast<std::size_t>(v.size()) != parameter_names(o, family).size())
        throw std::invalid_argument("parameter vector has the wrong length");
    ArmaEgarchParams p;
    Eigen::Index k = 0;
    p.mu = v[k++];
    p.ar = v.segment(k, o.ar);
    k += o.ar;
    p.ma = v.segment(k, o.ma);
    k += o.ma;
    p.omega = v[k++];
    p.alpha = v.segment(k, o.arch);
    k += o.arch;
    p.beta = v.segment(k, o.garch);
    k += o.garch;
    p.gamma = v.segment(k, o.arch);
    k += o.arch;
    p.dist.family = family;
    if (is_skewed(family)) p.dist.skew = v[k++];
    if (has_shape(family)) p.dist.shape = v[k++];
    return p;
}

FilterOutput arma_egarch_filter(const ArmaEgarchParams& params, const Eigen::Ref<const Eigen::VectorXd>& series) {
    const auto o = params.orders();
    const Eigen::Index n = series.size();
    const int max_lag = std::max({o.ar, o.ma, o.arch, o.garch});
    if (n <= max_lag) throw std::invalid_argument("series too short for the model orders");
    if (!is_valid(params.dist)) throw NonFiniteLikelihood("innovation distribution parameters are not admissible");
    const StandardizedDist dist(params.dist);
    const double abs_mean = dist.abs_moment();

    const double mean = series.mean();
    const double var = (series.array() - mean).square().mean();
    if (!(var > 0.0)) throw NumericError("series has zero variance");
    const double log_var0 = std::log(var);

    FilterOutput out;
    out.mu.resize(n);
    out.h.resize(n);
    out.z.resize(n);
    Eigen::VectorXd y(n);
    Eigen::VectorXd logh(n);
    double ll = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        double m = params.mu;
        for (int j = 1; j <= o.ar; ++j) m += params.ar[j - 1] * (t - j >= 0 ? series[t - j] : mean);
        for (int j = 1; j <= o.ma; ++j)
            if (t - j >= 0) m += params.ma[j - 1] * y[t - j];

        double lh = params.omega;
        for (int j = 1; j <= o.arch; ++j) {
            if (t - j < 0) continue;
            const double e = out.z[t - j];
            lh += params.alpha[j - 1] * e + params.gamma[j - 1] * (std::abs(e) - abs_mean);
        }
        for (int j = 1; j <= o.garch; ++j) lh += params.beta[j - 1] * (t - j >= 0 ? logh[t - j] : log_var0);

        const double h = std::exp(lh);
        const double sd = std::sqrt(h);
        y[t] = series[t] - m;
        const double z = y[t] / sd;
        if (!std::isfinite(z) || !(h > 0.0) || !std::isfinite(h))
            throw NonFiniteLikelihood("eGARCH recursion diverged at t=" + std::to_string(t));
        out.mu[t] = m;
        out.h[t] = h;
        out.z[t] = z;
        logh[t] = lh;
        ll += -0.5 * lh + dist.logpdf(z);
    }
    if (!std::isfinite(ll)) throw NonFiniteLikelihood("log-likelihood is not finite");
    out.loglik = ll;
    return out;
}

double arma_egarch_loglik(const ArmaEgarchParams& params, const Eigen::Ref<const Eigen::VectorXd>& series) {
    return arma_egarch_filter(params, series).loglik;
}

Eigen::VectorXd arma_egarch_score(const ArmaEgarchParams& params, const Eigen::Ref<const Eigen::VectorXd>& series) {
    const auto o = params.orders();
    const Family fam = params.dist.family;
    const Eigen::VectorXd x = pack(params);
    auto ll = [&](const Eigen::VectorXd& v) { return arma_egarch_loglik(unpack(v, o, fam), series); };
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-3 * std::max(std::abs(x[i]), 0.1);
        auto central = [&](double step) {
            xp[i] = x[i] + step;
            const double fp = ll(xp);
            xp[i] = x[i] - step;
            const double fm = ll(xp);
            xp[i] = x[i];
            return (fp - fm) / (2.0 * step);
        };
        const double d1 = central(h);
        const double d2 = central(0.5 * h);
        const double d4 = central(0.25 * h);
        const double r1 = (4.0 * d2 - d1) / 3.0;
        const double r2 = (4.0 * d4 - d2) / 3.0;
        g[i] = (16.0 * r2 - r1) / 15.0;
    }
    return g;
}

namespace {

constexpr double kBetaLimit = 1.0 - 1e-12;

// Unconstrained <-> natural mapping used by the optimizer.
struct Transform {
    ArmaEgarchOrders orders;
    Family family;

    Eigen::Index beta_offset() const { return 2 + orders.ar + orders.ma + orders.arch; }
    Eigen::Index dist_offset() const { return beta_offset() + orders.garch + orders.arch; }

    Eigen::VectorXd to_natural(const Eigen::VectorXd& u) const {
        Eigen::VectorXd v = u;
        for (int j = 0; j < orders.garch; ++j) v[beta_offset() + j] = std::tanh(u[beta_offset() + j]);
        Eigen::Index k = dist_offset();
        if (is_skewed(family)) {
            v[k] = std::exp(std::clamp(u[k], -3.0, 3.0));
            ++k;
        }
        if (has_shape(family)) {
            if (family == Family::ged) {
                v[k] = std::exp(std::clamp(u[k], -2.5, 3.5));
            } else {
                v[k] = 2.0 + std::exp(std::clamp(u[k], -4.5, 6.0));
            }
        }
        return v;
    }

    Eigen::VectorXd from_natural(const Eigen::VectorXd& v) const {
        Eigen::VectorXd u = v;
        for (int j = 0; j < orders.garch; ++j)
            u[beta_offset() + j] = std::atanh(std::clamp(v[beta_offset() + j], -kBetaLimit, kBetaLimit));
        Eigen::Index k = dist_offset();
        if (is_skewed(family)) {
            u[k] = std::log(v[k]);
            ++k;
        }
        if (has_shape(family)) u[k] = family == Family::ged ? std::log(v[k]) : std::log(v[k] - 2.0);
        return u;
    }

    bool at_boundary(const Eigen::VectorXd& u) const {
        for (int j = 0; j < orders.garch; ++j)
            if (std::abs(std::tanh(u[beta_offset() + j])) > 0.999) return true;
        Eigen::Index k = dist_offset();
        if (is_skewed(family)) {
            if (std::abs(u[k]) >= 3.0 - 1e-6) return true;
            ++k;
        }
        if (has_shape(family)) {
            const double lo = family == Family::ged ? -2.5 : -4.5;
            const double hi = family == Family::ged ? 3.5 : 6.0;
            if (u[k] <= lo + 1e-6 || u[k] >= hi - 1e-6) return true;
        }
        return false;
    }
};

ArmaEgarchParams start_point(const ArmaEgarchOrders& o, const DistSpec& dist, double mean, double var, double persistence,
                             double magnitude, double shape) {
    auto p = ArmaEgarchParams::zeros(o, dist);
    if (o.ar > 0) p.ar[0] = 0.1;
    if (o.ma > 0) p.ma[0] = -0.05;
    p.mu = mean * (1.0 - p.ar.sum());
    if (o.garch > 0) p.beta[0] = persistence;
    if (o.arch > 0) p.gamma[0] = magnitude;
    p.omega = (1.0 - p.beta.sum()) * std::log(var);
    if (is_skewed(dist.family)) p.dist.skew = 1.0;
    if (has_shape(dist.family)) p.dist.shape = dist.family == Family::ged ? 1.5 : shape;
    return p;
}

}  // namespace

UnivariateFit fit_arma_egarch(const ArmaEgarchOrders& orders, const DistSpec& dist_template,
                              const Eigen::Ref<const Eigen::VectorXd>& series, const GarchFitOptions& opts) {
    const Eigen::Index n = series.size();
    const int max_lag = std::max({orders.ar, orders.ma, orders.arch, orders.garch});
    if (n <= max_lag + 1) throw DataError(DataError::Kind::insufficient_data, "series too short for the model orders");
    if (!series.allFinite()) throw DataError(DataError::Kind::malformed, "series contains non-finite values");
    const double mean = series.mean();
    const double sd = std::sqrt((series.array() - mean).square().mean());
    // Rounding leaves a tiny spread on a constant series; treat it as zero.
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) throw NumericError("cannot fit a constant series (zero variance)");

    UnivariateFit fit;
    if (n < 100) fit.diagnostics.warnings.push_back("fewer than 100 observations; estimates may be unreliable");

    // Fit on r / sd; the mapping back to the original scale is exact.
    const Eigen::VectorXd scaled = series / sd;
    const double scaled_mean = mean / sd;
    const Family fam = dist_template.family;
    const Transform tr{orders, fam};

    auto objective = [&](const Eigen::VectorXd& u) {
        const Eigen::VectorXd v = tr.to_natural(u);
        const ArmaEgarchParams p = unpack(v, orders, fam);
        double ll;
        try {
            ll = arma_egarch_loglik(p, scaled);
        } catch (const NumericError&) {
            return std::numeric_limits<double>::infinity();
        }
        double penalty = 0.0;
        const double excess = std::abs(p.beta.sum()) - (1.0 - 1e-4);
        if (excess > 0.0) penalty = opts.stationarity_penalty * excess * excess;
        return -ll + penalty;
    };

    std::vector<Eigen::VectorXd> starts;
    starts.push_back(tr.from_natural(pack(start_point(orders, dist_template, scaled_mean, 1.0, 0.9, 0.1, 8.0))));
    starts.push_back(tr.from_natural(pack(start_point(orders, dist_template, scaled_mean, 1.0, 0.5, 0.05, 5.0))));
    {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> noise(0.0, 0.1);
        Eigen::VectorXd u = starts.front();
        for (auto& x : u) x += noise(rng);
        starts.push_back(u);
    }
    starts.resize(static_cast<std::size_t>(std::clamp(opts.starts, 1, 3)));

    optim::Result best;
    best.value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        auto r = optim::minimize_bfgs(objective, starts[s], opts.optimizer);
        evaluations += r.evaluations;
        if (r.value < best.value) {
            best = r;
            fit.diagnostics.best_start = static_cast<int>(s);
        }
    }
    if (!std::isfinite(best.value)) throw NumericError("no start produced a finite likelihood");
    {
        auto polish = optim::minimize_bfgs(objective, best.x, opts.optimizer);
        evaluations += polish.evaluations;
        if (polish.value <= best.value) {
            polish.iterations += best.iterations;
            best = polish;
        }
    }

    const Eigen::VectorXd v_scaled = tr.to_natural(best.x);
    const ArmaEgarchParams p_scaled = unpack(v_scaled, orders, fam);
    ArmaEgarchParams p = p_scaled;
    p.mu = sd * p_scaled.mu;
    p.omega = p_scaled.omega + 2.0 * std::log(sd) * (1.0 - p_scaled.beta.sum());

    fit.params = p;
    fit.filter = arma_egarch_filter(p, series);
    fit.diagnostics.converged = best.converged;
    fit.diagnostics.iterations = best.iterations;
    fit.diagnostics.evaluations = evaluations;
    fit.diagnostics.message = best.message;
    fit.diagnostics.boundary = tr.at_boundary(best.x);
    if (!best.converged) fit.diagnostics.warnings.push_back("optimizer did not converge: " + best.message);
    if (fit.diagnostics.boundary) fit.diagnostics.warnings.push_back("solution on a parameter boundary");

    // Standard errors from the Hessian in the scaled natural parametrization.
    const Eigen::Index k = v_scaled.size();
    Eigen::VectorXd step(k);
    for (Eigen::Index i = 0; i < k; ++i) step[i] = 1e-4 * std::max(std::abs(v_scaled[i]), 0.1);
    {
        Eigen::Index d = tr.dist_offset();
        if (is_skewed(fam)) {
            step[d] = std::min(step[d], 0.5 * v_scaled[d]);
            ++d;
        }
        if (has_shape(fam)) step[d] = std::min(step[d], 0.5 * (v_scaled[d] - (fam == Family::ged ? 0.0 : 2.0)));
    }
    auto natural_ll = [&](const Eigen::VectorXd& v) {
        try {
            return arma_egarch_loglik(unpack(v, orders, fam), scaled);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    const Eigen::MatrixXd H = optim::numeric_hessian(natural_ll, v_scaled, step);
    fit.se = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
    fit.pvalues = fit.se;
    if (H.allFinite()) {
        const Eigen::MatrixXd info = -0.5 * (H + H.transpose());
        Eigen::LLT<Eigen::MatrixXd> llt(info);
        if (llt.info() == Eigen::Success) {
            const Eigen::MatrixXd cov_scaled = llt.solve(Eigen::MatrixXd::Identity(k, k));
            Eigen::MatrixXd J = Eigen::MatrixXd::Identity(k, k);
            J(0, 0) = sd;
            const Eigen::Index omega_idx = 1 + orders.ar + orders.ma;
            for (int j = 0; j < orders.garch; ++j) J(omega_idx, tr.beta_offset() + j) = -2.0 * std::log(sd);
            const Eigen::MatrixXd cov = J * cov_scaled * J.transpose();
            const Eigen::VectorXd est = pack(p);
            for (Eigen::Index i = 0; i < k; ++i) {
                fit.se[i] = std::sqrt(std::max(cov(i, i), 0.0));
                fit.pvalues[i] = std::erfc(std::abs(est[i] / fit.se[i]) / std::sqrt(2.0));
            }
            fit.diagnostics.se_available = true;
        }
    }
    if (!fit.diagnostics.se_available) fit.diagnostics.warnings.push_back("Hessian not negative definite; standard errors unavailable");
    return fit;
}

SimulatedPath simulate_arma_egarch_path(const ArmaEgarchParams& params, std::size_t n, std::size_t burn, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("simulate_arma_egarch: n must be >= 1");
    const auto o = params.orders();
    const StandardizedDist dist(params.dist);
    const double abs_mean = dist.abs_moment();
    const Eigen::Index total = static_cast<Eigen::Index>(n + burn);
    const Eigen::VectorXd z = dist_sample(params.dist, static_cast<std::size_t>(total), seed);

    const double bsum = params.beta.sum();
    const double asum = params.ar.sum();
    const double logh0 = std::abs(bsum) < 1.0 ? params.omega / (1.0 - bsum) : params.omega;
    const double r0 = std::abs(asum) < 1.0 ? params.mu / (1.0 - asum) : params.mu;

    Eigen::VectorXd r(total), h(total), y(total), logh(total);
    for (Eigen::Index t = 0; t < total; ++t) {
        double m = params.mu;
        for (int j = 1; j <= o.ar; ++j) m += params.ar[j - 1] * (t - j >= 0 ? r[t - j] : r0);
        for (int j = 1; j <= o.ma; ++j)
            if (t - j >= 0) m += params.ma[j - 1] * y[t - j];
        double lh = params.omega;
        for (int j = 1; j <= o.arch; ++j) {
            if (t - j < 0) continue;
            lh += params.alpha[j - 1] * z[t - j] + params.gamma[j - 1] * (std::abs(z[t - j]) - abs_mean);
        }
        for (int j = 1; j <= o.garch; ++j) lh += params.beta[j - 1] * (t - j >= 0 ? logh[t - j] : logh0);
        logh[t] = lh;
        h[t] = std::exp(lh);
        y[t] = std::sqrt(h[t]) * z[t];
        r[t] = m + y[t];
        if (!std::isfinite(r[t]) || !(h[t] > 0.0)) throw NumericError("simulated eGARCH path is not finite (explosive parameters)");
    }
    const auto b = static_cast<Eigen::Index>(burn);
    const auto len = static_cast<Eigen::Index>(n);
    return {r.segment(b, len), h.segment(b, len), z.segment(b, len)};
}

Eigen::VectorXd simulate_arma_egarch(const ArmaEgarchParams& params, std::size_t n, std::size_t burn, std::uint64_t seed) {
    return simulate_arma_egarch_path(params, n, burn, seed).r;
}

}  // namespace sysrisk
