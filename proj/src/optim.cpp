#include "sysrisk/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sysrisk::optim {

namespace {

double finite_or_inf(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

}  // namespace

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double rel_step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = rel_step * std::max(std::abs(x[i]), 1.0);
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& step) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd H(n, n);
    Eigen::VectorXd xp = x;
    const double f0 = f(x);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double hi = step[i];
        xp[i] = x[i] + hi;
        const double fp = f(xp);
        xp[i] = x[i] - hi;
        const double fm = f(xp);
        xp[i] = x[i];
        H(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double hj = step[j];
            auto at = [&](double si, double sj) {
                xp[i] = x[i] + si * hi;
                xp[j] = x[j] + sj * hj;
                const double v = f(xp);
                xp[i] = x[i];
                xp[j] = x[j];
                return v;
            };
            H(i, j) = H(j, i) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
        }
    }
    return H;
}

Result minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0, const Options& opts) {
    Result res;
    const Eigen::Index n = x0.size();
    int evals = 0;
    auto fe = [&](const Eigen::VectorXd& x) {
        ++evals;
        return finite_or_inf(f(x));
    };
    auto grad = [&](const Eigen::VectorXd& x) {
        evals += static_cast<int>(2 * n);
        return numeric_gradient(f, x);
    };

    Eigen::VectorXd x = x0;
    double fx = fe(x);
    if (!std::isfinite(fx)) {
        res.x = x;
        res.value = fx;
        res.message = "objective not finite at the starting point";
        return res;
    }
    Eigen::VectorXd g = grad(x);
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
    bool fresh = true;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (!g.allFinite()) {
            res.message = "gradient not finite";
            break;
        }
        if (g.lpNorm<Eigen::Infinity>() < opts.g_tolerance) {
            res.converged = true;
            res.message = "gradient below tolerance";
            break;
        }
        Eigen::VectorXd p = -Hinv * g;
        double slope = g.dot(p);
        if (!(slope < 0.0)) {
            Hinv.setIdentity();
            fresh = true;
            p = -g;
            slope = -g.squaredNorm();
        }
        double t = fresh ? std::min(1.0, 1.0 / std::max(p.lpNorm<Eigen::Infinity>(), 1e-12)) : 1.0;

        double fn = std::numeric_limits<double>::infinity();
        Eigen::VectorXd xn;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            xn = x + t * p;
            fn = fe(xn);
            if (fn <= fx + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            double next = 0.5 * t;
            if (std::isfinite(fn)) {
                // minimizer of the quadratic through f(0), f'(0), f(t)
                const double q = -slope * t * t / (2.0 * (fn - fx - slope * t));
                next = std::clamp(q, 0.1 * t, 0.5 * t);
            }
            t = next;
        }
        if (!accepted) {
            if (!fresh) {
                Hinv.setIdentity();
                fresh = true;
                continue;
            }
            res.converged = std::abs(slope) < 1e3 * opts.g_tolerance || g.lpNorm<Eigen::Infinity>() < 1e-3;
            res.message = "line search failed";
            break;
        }

        const Eigen::VectorXd s = xn - x;
        const Eigen::VectorXd gn = grad(xn);
        const Eigen::VectorXd y = gn - g;
        const double ys = y.dot(s);
        const double fdiff = fx - fn;
        x = xn;
        fx = fn;
        g = gn;

        if (ys > 1e-12 * y.norm() * s.norm()) {
            if (fresh) Hinv *= ys / y.squaredNorm();
            const double rho = 1.0 / ys;
            const Eigen::VectorXd Hy = Hinv * y;
            Hinv += (rho * rho * y.dot(Hy) + rho) * s * s.transpose() - rho * (Hy * s.transpose() + s * Hy.transpose());
            fresh = false;
        }
        if (fdiff < opts.f_tolerance * (1.0 + std::abs(fx)) && s.lpNorm<Eigen::Infinity>() < 1e-5 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
            res.converged = true;
            res.message = "objective change below tolerance";
            ++it;
            break;
        }
    }
    if (it >= opts.max_iterations) res.message = "iteration limit reached";
    res.x = x;
    res.value = fx;
    res.iterations = it;
    res.evaluations = evals;
    return res;
}

}  // namespace sysrisk::optim
