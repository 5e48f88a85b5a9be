#include "sysrisk/dcc.hpp"

#include "sysrisk/dist.hpp"
#include "sysrisk/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

namespace sysrisk {

void validate(const DccParams& p) {
    validate(p.copula);
    if ((p.c.array() < 0.0).any() || (p.d.array() < 0.0).any()) throw std::invalid_argument("DCC coefficients must be non-negative");
    if (!(p.c.sum() + p.d.sum() < 1.0)) throw std::invalid_argument("DCC requires sum(c) + sum(d) < 1");
    if (p.qbar.rows() != p.qbar.cols() || p.qbar.rows() < 1) throw std::invalid_argument("Qbar must be square");
    if (!p.qbar.isApprox(p.qbar.transpose(), 1e-12)) throw std::invalid_argument("Qbar must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.qbar, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) throw std::invalid_argument("Qbar must be positive semi-definite");
}

namespace {

Eigen::MatrixXd normalize(const Eigen::MatrixXd& Q) {
    const Eigen::VectorXd inv = Q.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd R = inv.asDiagonal() * Q * inv.asDiagonal();
    R.diagonal().setOnes();
    return R;
}

// Shared Q recursion. `visit(t, Q_t)` sees each conditional matrix before e_t is used.
template <class Visitor>
void run_recursion(const Eigen::VectorXd& c, const Eigen::VectorXd& d, const Eigen::MatrixXd& qbar,
                   const Eigen::Ref<const Eigen::MatrixXd>& eps, Visitor&& visit) {
    const Eigen::Index T = eps.rows();
    const Eigen::Index m = c.size();
    const Eigen::Index n = d.size();
    const Eigen::MatrixXd base = (1.0 - c.sum() - d.sum()) * qbar;
    // Most recent first.
    std::deque<Eigen::MatrixXd> past_q(static_cast<std::size_t>(n), qbar);
    std::deque<Eigen::MatrixXd> past_ee(static_cast<std::size_t>(m), qbar);
    for (Eigen::Index t = 0; t < T; ++t) {
        Eigen::MatrixXd Q = base;
        for (Eigen::Index j = 0; j < m; ++j) Q.noalias() += c[j] * past_ee[static_cast<std::size_t>(j)];
        for (Eigen::Index j = 0; j < n; ++j) Q.noalias() += d[j] * past_q[static_cast<std::size_t>(j)];
        if (!visit(t, Q)) return;
        if (m > 0) {
            past_ee.pop_back();
            const Eigen::VectorXd e = eps.row(t).transpose();
            past_ee.push_front(e * e.transpose());
        }
        if (n > 0) {
            past_q.pop_back();
            past_q.push_front(std::move(Q));
        }
    }
}

double loglik_core(const Eigen::VectorXd& c, const Eigen::VectorXd& d, const Eigen::MatrixXd& qbar, const EllipticalCopula& cop,
                   const Eigen::MatrixXd& X, const Eigen::Ref<const Eigen::MatrixXd>& E) {
    double ll = 0.0;
    Eigen::LLT<Eigen::MatrixXd> chol(qbar.rows());
    run_recursion(c, d, qbar, E, [&](Eigen::Index t, const Eigen::MatrixXd& Q) {
        if (!(Q.diagonal().array() > 0.0).all()) {
            ll = std::numeric_limits<double>::quiet_NaN();
            return false;
        }
        chol.compute(normalize(Q));
        if (chol.info() != Eigen::Success) {
            ll = std::numeric_limits<double>::quiet_NaN();
            return false;
        }
        ll += cop.log_density(X.row(t).transpose(), chol);
        return true;
    });
    return ll;
}

std::size_t clamp_pits(Eigen::MatrixXd& U) {
    std::size_t clamped = 0;
    for (auto& u : U.reshaped()) {
        if (!(u >= kPitClamp && u <= 1.0 - kPitClamp)) {
            if (std::isnan(u)) throw DataError(DataError::Kind::malformed, "PIT panel contains NaN");
            u = std::clamp(u, kPitClamp, 1.0 - kPitClamp);
            ++clamped;
        }
    }
    return clamped;
}

double unit_variance_factor(const CopulaSpec& c) {
    return c.family == CopulaFamily::student ? std::sqrt((c.shape - 2.0) / c.shape) : 1.0;
}

}  // namespace

CorrelationPath dcc_filter(const DccParams& params, const Eigen::Ref<const Eigen::MatrixXd>& eps) {
    validate(params);
    if (eps.cols() != params.qbar.rows()) throw std::invalid_argument("dcc_filter: residual panel width does not match Qbar");
    CorrelationPath path;
    path.R.reserve(static_cast<std::size_t>(eps.rows()));
    path.Q.reserve(static_cast<std::size_t>(eps.rows()));
    run_recursion(params.c, params.d, params.qbar, eps, [&](Eigen::Index, const Eigen::MatrixXd& Q) {
        path.Q.push_back(Q);
        path.R.push_back(normalize(Q));
        return true;
    });
    return path;
}

Eigen::MatrixXd conditional_covariance(const Eigen::Ref<const Eigen::MatrixXd>& R, const Eigen::Ref<const Eigen::VectorXd>& h) {
    const Eigen::VectorXd s = h.cwiseSqrt();
    return s.asDiagonal() * R * s.asDiagonal();
}

Eigen::MatrixXd sample_correlation(const Eigen::Ref<const Eigen::MatrixXd>& X) {
    const Eigen::MatrixXd centered = X.rowwise() - X.colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered;
    const Eigen::VectorXd inv = cov.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd R = inv.asDiagonal() * cov * inv.asDiagonal();
    R.diagonal().setOnes();
    return R;
}

Eigen::MatrixXd copula_scores(const CopulaSpec& c, const Eigen::Ref<const Eigen::MatrixXd>& U) {
    const EllipticalCopula cop(c, static_cast<int>(std::max<Eigen::Index>(U.cols(), 1)));
    Eigen::MatrixXd X(U.rows(), U.cols());
    for (Eigen::Index j = 0; j < U.cols(); ++j)
        for (Eigen::Index i = 0; i < U.rows(); ++i) X(i, j) = cop.score(std::clamp(U(i, j), kPitClamp, 1.0 - kPitClamp));
    return X;
}

Eigen::MatrixXd recursion_scores(const CopulaSpec& c, const Eigen::Ref<const Eigen::MatrixXd>& U) {
    return copula_scores(c, U) * unit_variance_factor(c);
}

double dcc_copula_loglik(const DccParams& params, const Eigen::Ref<const Eigen::MatrixXd>& U, const Eigen::MatrixXd* residuals) {
    validate(params);
    if (U.cols() != params.qbar.rows()) throw std::invalid_argument("dcc_copula_loglik: panel width does not match Qbar");
    Eigen::MatrixXd Uc = U;
    clamp_pits(Uc);
    const EllipticalCopula cop(params.copula, static_cast<int>(U.cols()));
    const Eigen::MatrixXd X = copula_scores(params.copula, Uc);
    double ll;
    if (residuals) {
        if (residuals->rows() != U.rows() || residuals->cols() != U.cols()) throw std::invalid_argument("residual panel shape mismatch");
        ll = loglik_core(params.c, params.d, params.qbar, cop, X, *residuals);
    } else {
        ll = loglik_core(params.c, params.d, params.qbar, cop, X, X * unit_variance_factor(params.copula));
    }
    if (!std::isfinite(ll)) throw NonFiniteLikelihood("DCC copula log-likelihood is not finite");
    return ll;
}

std::vector<std::string> dcc_parameter_names(int m, int n, CopulaFamily family) {
    std::vector<std::string> names;
    for (int j = 1; j <= m; ++j) names.push_back("c" + std::to_string(j));
    for (int j = 1; j <= n; ++j) names.push_back("d" + std::to_string(j));
    if (family == CopulaFamily::student) names.push_back("shape");
    return names;
}

DccFit fit_dcc(const Eigen::Ref<const Eigen::MatrixXd>& U, CopulaFamily family, const DccFitOptions& opts,
               const Eigen::MatrixXd* residuals) {
    const Eigen::Index T = U.rows();
    const Eigen::Index k = U.cols();
    if (k < 2) throw std::invalid_argument("fit_dcc needs at least two series");
    if (T < 2) throw DataError(DataError::Kind::insufficient_data, "fit_dcc needs at least two observations");
    if (opts.m < 0 || opts.n < 0) throw std::invalid_argument("negative DCC order");
    if (opts.source == ScoreSource::garch_residuals && (!residuals || residuals->rows() != T || residuals->cols() != k))
        throw std::invalid_argument("fit_dcc: residual panel required for the garch_residuals score source");

    DccFit fit;
    if (T < 200) fit.warnings.push_back("fewer than 200 observations; DCC estimates may be unreliable");
    Eigen::MatrixXd Uc = U;
    fit.clamped_pits = clamp_pits(Uc);
    if (fit.clamped_pits > 0) fit.warnings.push_back(std::to_string(fit.clamped_pits) + " PIT values clamped to [1e-10, 1-1e-10]");

    const bool student = family == CopulaFamily::student;
    const int m = opts.m;
    const int n = opts.n;
    const int np = m + n + (student ? 1 : 0);
    const double log_shape_max = std::log(opts.max_shape - 2.0);

    // Scores, recursion residuals and Qbar depend only on eta; cache the last one.
    struct Cache {
        double eta = std::numeric_limits<double>::quiet_NaN();
        Eigen::MatrixXd X, E, qbar;
    } cache;
    auto prepare = [&](double eta) -> const Cache& {
        if (cache.eta == eta && cache.X.size() > 0) return cache;
        const CopulaSpec spec{family, eta};
        cache.eta = eta;
        cache.X = copula_scores(spec, Uc);
        cache.E = opts.source == ScoreSource::garch_residuals ? *residuals : Eigen::MatrixXd(cache.X * unit_variance_factor(spec));
        cache.qbar = sample_correlation(cache.E);
        return cache;
    };
    auto natural_ll = [&](const Eigen::VectorXd& v) {
        const Eigen::VectorXd c = v.head(m);
        const Eigen::VectorXd d = v.segment(m, n);
        const double eta = student ? v[m + n] : 0.0;
        if (student && !(eta > 2.0)) return std::numeric_limits<double>::quiet_NaN();
        if (!(c.sum() + d.sum() < 1.0)) return std::numeric_limits<double>::quiet_NaN();
        const Cache& cc = prepare(eta);
        const EllipticalCopula cop(CopulaSpec{family, eta}, static_cast<int>(k));
        return loglik_core(c, d, cc.qbar, cop, cc.X, cc.E);
    };
    auto to_natural = [&](const Eigen::VectorXd& u) {
        Eigen::VectorXd v(np);
        const Eigen::ArrayXd e = u.head(m + n).array().max(-30.0).min(30.0).exp();
        const double denom = 1.0 + e.sum();
        v.head(m + n) = (e / denom).matrix();
        if (student) v[m + n] = 2.0 + std::exp(std::clamp(u[m + n], -3.0, log_shape_max));
        return v;
    };
    auto from_natural = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd u(np);
        const double rest = 1.0 - v.head(m + n).sum();
        for (int i = 0; i < m + n; ++i) u[i] = std::log(v[i] / rest);
        if (student) u[m + n] = std::log(v[m + n] - 2.0);
        return u;
    };
    auto objective = [&](const Eigen::VectorXd& u) {
        const double ll = natural_ll(to_natural(u));
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    auto start = [&](double c_total, double d_total, double eta) {
        Eigen::VectorXd v(np);
        for (int i = 0; i < m; ++i) v[i] = c_total / m;
        for (int i = 0; i < n; ++i) v[m + i] = d_total / n;
        if (student) v[m + n] = eta;
        return from_natural(v);
    };
    std::vector<Eigen::VectorXd> starts;
    if (m + n == 0) {
        if (student) starts.push_back(Eigen::VectorXd::Constant(1, std::log(8.0 - 2.0)));
    } else {
        starts.push_back(start(m ? 0.05 : 0.0, n ? 0.9 : 0.0, 8.0));
        starts.push_back(start(m ? 0.02 : 0.0, n ? 0.95 : 0.0, 12.0));
    }

    Eigen::VectorXd v_best(np);
    optim::Result best;
    best.value = std::numeric_limits<double>::infinity();
    if (np == 0) {
        best.converged = true;
    } else {
        for (auto& s : starts) {
            if (m == 0 || n == 0) {
                // zero-weight entries cannot be represented by the log-ratio map
                for (Eigen::Index i = 0; i < m + n; ++i)
                    if (!std::isfinite(s[i])) s[i] = -5.0;
            }
            auto r = optim::minimize_bfgs(objective, s, opts.optimizer);
            if (r.value < best.value) best = r;
        }
        if (!std::isfinite(best.value)) throw NumericError("DCC fit: no start produced a finite likelihood");
        v_best = to_natural(best.x);
    }

    const double eta = student ? v_best[m + n] : 0.0;
    const Cache& cc = prepare(eta);
    fit.params.c = v_best.head(m);
    fit.params.d = v_best.segment(m, n);
    fit.params.qbar = cc.qbar;
    fit.params.copula = CopulaSpec{family, eta};
    fit.loglik = np == 0 ? natural_ll(v_best) : -best.value;
    fit.converged = best.converged;
    fit.iterations = best.iterations;
    if (!fit.converged) fit.warnings.push_back("optimizer did not converge: " + best.message);
    fit.path = dcc_filter(fit.params, cc.E);
    if (student && v_best[m + n] >= opts.max_shape - 1e-6) fit.warnings.push_back("copula shape at its upper bound");

    fit.se = Eigen::VectorXd::Constant(np, std::numeric_limits<double>::quiet_NaN());
    fit.pvalues = fit.se;
    if (np > 0) {
        Eigen::VectorXd step(np);
        for (int i = 0; i < np; ++i) step[i] = 1e-4 * std::max(std::abs(v_best[i]), 0.01);
        for (int i = 0; i < m + n; ++i) step[i] = std::min(step[i], std::max(v_best[i], 1e-7));
        const Eigen::MatrixXd H = optim::numeric_hessian(natural_ll, v_best, step);
        if (H.allFinite()) {
            const Eigen::MatrixXd info = -0.5 * (H + H.transpose());
            Eigen::LLT<Eigen::MatrixXd> llt(info);
            if (llt.info() == Eigen::Success) {
                const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(np, np));
                for (int i = 0; i < np; ++i) {
                    fit.se[i] = std::sqrt(std::max(cov(i, i), 0.0));
                    fit.pvalues[i] = std::erfc(std::abs(v_best[i] / fit.se[i]) / std::sqrt(2.0));
                }
                fit.se_available = true;
            }
        }
        if (!fit.se_available) fit.warnings.push_back("Hessian not negative definite; standard errors unavailable");
    }
    return fit;
}

SimulatedDcc simulate_dcc(const DccParams& params, std::size_t T, std::uint64_t seed) {
    validate(params);
    const Eigen::Index k = params.qbar.rows();
    const bool student = params.copula.family == CopulaFamily::student;
    const double eta = params.copula.shape;
    const double unit = unit_variance_factor(params.copula);
    const EllipticalCopula cop(params.copula, static_cast<int>(k));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::chi_squared_distribution<double> chi2(student ? eta : 1.0);

    SimulatedDcc out;
    out.U.resize(static_cast<Eigen::Index>(T), k);
    out.scores.resize(static_cast<Eigen::Index>(T), k);
    Eigen::LLT<Eigen::MatrixXd> chol(k);
    // The recursion reads row t of `scores` only after visit(t) has filled it.
    run_recursion(params.c, params.d, params.qbar, out.scores, [&](Eigen::Index t, const Eigen::MatrixXd& Q) {
        Eigen::MatrixXd R = normalize(Q);
        chol.compute(R);
        if (chol.info() != Eigen::Success) throw NumericError("simulate_dcc: correlation matrix lost positive definiteness");
        Eigen::VectorXd g(k);
        for (auto& v : g) v = normal(rng);
        Eigen::VectorXd x = chol.matrixL() * g;
        if (student) x /= std::sqrt(chi2(rng) / eta);
        for (Eigen::Index i = 0; i < k; ++i) {
            out.U(t, i) = cop.score_cdf(x[i]);
            out.scores(t, i) = unit * x[i];
        }
        out.path.Q.push_back(Q);
        out.path.R.push_back(std::move(R));
        return true;
    });
    return out;
}

}  // namespace sysrisk
