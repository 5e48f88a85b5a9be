#include "sysrisk/dist.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace sysrisk {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

}  // namespace

std::string_view to_string(Family f) {
    switch (f) {
        case Family::normal: return "normal";
        case Family::skew_normal: return "skew_normal";
        case Family::student_t: return "student_t";
        case Family::skew_student_t: return "skew_student_t";
        case Family::ged: return "ged";
    }
    return "unknown";
}

Family family_from_string(std::string_view name) {
    if (name == "normal" || name == "norm") return Family::normal;
    if (name == "skew_normal" || name == "snorm") return Family::skew_normal;
    if (name == "student_t" || name == "std") return Family::student_t;
    if (name == "skew_student_t" || name == "sstd") return Family::skew_student_t;
    if (name == "ged") return Family::ged;
    throw std::invalid_argument("unknown distribution family: " + std::string(name));
}

bool is_skewed(Family f) { return f == Family::skew_normal || f == Family::skew_student_t; }

bool has_shape(Family f) { return f == Family::student_t || f == Family::skew_student_t || f == Family::ged; }

bool is_valid(const DistSpec& d) noexcept {
    if (is_skewed(d.family) && !(d.skew > 0.0 && std::isfinite(d.skew))) return false;
    switch (d.family) {
        case Family::student_t:
        case Family::skew_student_t: return d.shape > 2.0 && std::isfinite(d.shape);
        case Family::ged: return d.shape > 0.0 && std::isfinite(d.shape);
        default: return true;
    }
}

void validate(const DistSpec& d) {
    if (!is_valid(d)) {
        throw std::invalid_argument("invalid " + std::string(to_string(d.family)) + " parameters: skew=" +
                                    std::to_string(d.skew) + " shape=" + std::to_string(d.shape));
    }
}

StandardizedDist::StandardizedDist(const DistSpec& d) : spec_(d) {
    validate(d);
    using std::lgamma;
    const double nu = d.shape;
    double m1 = 0.0;  // E|x| of the symmetric base law
    switch (d.family) {
        case Family::normal:
        case Family::skew_normal:
            log_norm_ = -kLogSqrt2Pi;
            m1 = std::sqrt(2.0 / std::numbers::pi);
            break;
        case Family::student_t:
        case Family::skew_student_t:
            aux_ = std::sqrt((nu - 2.0) / nu);
            log_norm_ = lgamma(0.5 * (nu + 1.0)) - lgamma(0.5 * nu) - 0.5 * std::log(std::numbers::pi * (nu - 2.0));
            m1 = std::sqrt(nu - 2.0) * std::exp(lgamma(0.5 * (nu - 1.0)) - lgamma(0.5 * nu)) / std::sqrt(std::numbers::pi);
            break;
        case Family::ged:
            aux_ = std::sqrt(std::exp(-2.0 / nu * std::numbers::ln2 + lgamma(1.0 / nu) - lgamma(3.0 / nu)));
            log_norm_ = std::log(nu) - std::log(aux_) - (1.0 + 1.0 / nu) * std::numbers::ln2 - lgamma(1.0 / nu);
            m1 = aux_ * std::exp(std::numbers::ln2 / nu + lgamma(2.0 / nu) - lgamma(1.0 / nu));
            break;
    }

    xi_ = is_skewed(d.family) ? d.skew : 1.0;
    log_skew_ = std::log(2.0 / (xi_ + 1.0 / xi_));
    if (xi_ == 1.0) {
        shift_ = 0.0;
        scale_ = 1.0;
        abs_moment_ = m1;
        return;
    }
    const double xi2 = xi_ * xi_;
    shift_ = m1 * (xi_ - 1.0 / xi_);
    scale_ = std::sqrt((1.0 - m1 * m1) * (xi2 + 1.0 / xi2) + 2.0 * m1 * m1 - 1.0);
    log_skew_ += std::log(scale_);

    // E|z| = 2 E[(m - w)+] / s for the skewed variable w with mean m, split at the junction w = 0.
    const double c = 2.0 / (xi_ + 1.0 / xi_);
    const double m = shift_;
    double lower;
    if (m >= 0.0) {
        const double a = m / xi_;
        lower = c / xi_ * (0.5 * m + 0.5 * m1 / xi_) + c * xi_ * (m * (base_cdf(a) - 0.5) - xi_ * (0.5 * m1 - base_upper_moment(a)));
    } else {
        const double b = m * xi_;
        lower = c / xi_ * (m * base_cdf(b) + base_upper_moment(-b) / xi_);
    }
    abs_moment_ = 2.0 * lower / scale_;
}

double StandardizedDist::base_logpdf(double s) const {
    switch (spec_.family) {
        case Family::normal:
        case Family::skew_normal: return log_norm_ - 0.5 * s * s;
        case Family::student_t:
        case Family::skew_student_t:
            return log_norm_ - 0.5 * (spec_.shape + 1.0) * std::log1p(s * s / (spec_.shape - 2.0));
        case Family::ged: return log_norm_ - 0.5 * std::pow(std::abs(s) / aux_, spec_.shape);
    }
    return 0.0;
}

double StandardizedDist::base_cdf(double s) const {
    switch (spec_.family) {
        case Family::normal:
        case Family::skew_normal: return 0.5 * std::erfc(-s / std::numbers::sqrt2);
        case Family::student_t:
        case Family::skew_student_t: {
            boost::math::students_t_distribution<double> t(spec_.shape);
            return boost::math::cdf(t, s / aux_);
        }
        case Family::ged: {
            const double x = 0.5 * std::pow(std::abs(s) / aux_, spec_.shape);
            const double tail = 0.5 * boost::math::gamma_q(1.0 / spec_.shape, x);
            return s < 0.0 ? tail : 1.0 - tail;
        }
    }
    return 0.0;
}

double StandardizedDist::base_quantile(double p) const {
    switch (spec_.family) {
        case Family::normal:
        case Family::skew_normal: return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
        case Family::student_t:
        case Family::skew_student_t: {
            boost::math::students_t_distribution<double> t(spec_.shape);
            return aux_ * boost::math::quantile(t, p);
        }
        case Family::ged: {
            // p is always in (0, 1/2] or its mirror here; solve on the lower tail.
            const bool lower = p < 0.5;
            const double tail = lower ? p : 1.0 - p;
            if (tail == 0.5) return 0.0;
            const double x = boost::math::gamma_q_inv(1.0 / spec_.shape, 2.0 * tail);
            const double s = aux_ * std::pow(2.0 * x, 1.0 / spec_.shape);
            return lower ? -s : s;
        }
    }
    return 0.0;
}

double StandardizedDist::base_upper_moment(double a) const {
    const double nu = spec_.shape;
    switch (spec_.family) {
        case Family::normal:
        case Family::skew_normal: return std::exp(-kLogSqrt2Pi - 0.5 * a * a);
        case Family::student_t:
        case Family::skew_student_t: {
            // Tail first moment of the unit t law: (nu + y^2) / (nu - 1) * t_nu(y).
            const double y = a / aux_;
            const double log_t = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(std::numbers::pi * nu) -
                                 0.5 * (nu + 1.0) * std::log1p(y * y / nu);
            return aux_ * (nu + y * y) / (nu - 1.0) * std::exp(log_t);
        }
        case Family::ged: {
            const double m1 = aux_ * std::exp(std::numbers::ln2 / nu + std::lgamma(2.0 / nu) - std::lgamma(1.0 / nu));
            return 0.5 * m1 * boost::math::gamma_q(2.0 / nu, 0.5 * std::pow(a / aux_, nu));
        }
    }
    return 0.0;
}

double StandardizedDist::logpdf(double z) const {
    const double w = z * scale_ + shift_;
    const double s = w < 0.0 ? w * xi_ : w / xi_;
    return log_skew_ + base_logpdf(s);
}

double StandardizedDist::pdf(double z) const { return std::exp(logpdf(z)); }

double StandardizedDist::cdf(double z) const {
    if (std::isnan(z)) return z;
    if (z == -std::numeric_limits<double>::infinity()) return 0.0;
    if (z == std::numeric_limits<double>::infinity()) return 1.0;
    const double w = z * scale_ + shift_;
    const double xi2 = xi_ * xi_;
    if (w < 0.0) return 2.0 / (1.0 + xi2) * base_cdf(w * xi_);
    return 1.0 - 2.0 * xi2 / (1.0 + xi2) * base_cdf(-w / xi_);
}

double StandardizedDist::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile probability must lie in (0,1), got " + std::to_string(p));
    const double xi2 = xi_ * xi_;
    double w;
    if (p < 1.0 / (1.0 + xi2)) {
        w = base_quantile(0.5 * p * (1.0 + xi2)) / xi_;
    } else {
        w = -xi_ * base_quantile(0.5 * (1.0 - p) * (1.0 + xi2) / xi2);
    }
    return (w - shift_) / scale_;
}

double dist_pdf(const DistSpec& d, double z) { return StandardizedDist(d).pdf(z); }
double dist_logpdf(const DistSpec& d, double z) { return StandardizedDist(d).logpdf(z); }
double dist_cdf(const DistSpec& d, double z) { return StandardizedDist(d).cdf(z); }
double dist_quantile(const DistSpec& d, double p) { return StandardizedDist(d).quantile(p); }
double dist_abs_moment(const DistSpec& d) { return StandardizedDist(d).abs_moment(); }

Eigen::VectorXd dist_sample(const DistSpec& d, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("dist_sample: n must be >= 1");
    const StandardizedDist dist(d);
    std::mt19937_64 rng(seed);
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (auto& v : out) v = dist.quantile(open_uniform(rng));
    return out;
}

}  // namespace sysrisk
