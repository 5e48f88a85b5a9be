#include "sysrisk/copula.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sysrisk {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Gauss-Legendre abscissae/weights (negative half) for 6, 12 and 20 points.
constexpr std::array<std::array<double, 10>, 3> kGLW{{
    {0.1713244923791705, 0.3607615730481384, 0.4679139345726904},
    {0.04717533638651177, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659, 0.2334925365383547,
     0.2491470458134029},
    {0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475, 0.1019301198172404,
     0.1181945319615184, 0.1316886384491766, 0.1420961093183821, 0.1491729864726037, 0.1527533871307259},
}};
constexpr std::array<std::array<double, 10>, 3> kGLX{{
    {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970},
    {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050, -0.5873179542866171, -0.3678314989981802,
     -0.1252334085114692},
    {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188, -0.7463319064601508,
     -0.6360536807265150, -0.5108670019508271, -0.3737060887154196, -0.2277858511416451, -0.07652652113349733},
}};

// Upper orthant P(X > dh, Y > dk).
double bvnd(double dh, double dk, double r) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    int ng, lg;
    if (std::abs(r) < 0.3) {
        ng = 0;
        lg = 3;
    } else if (std::abs(r) < 0.75) {
        ng = 1;
        lg = 6;
    } else {
        ng = 2;
        lg = 10;
    }
    const auto& w = kGLW[ng];
    const auto& x = kGLX[ng];
    double h = dh;
    double k = dk;
    double hk = h * k;
    double bvn = 0.0;
    if (std::abs(r) < 0.925) {
        const double hs = 0.5 * (h * h + k * k);
        const double asr = std::asin(r);
        for (int i = 0; i < lg; ++i) {
            double sn = std::sin(asr * (x[i] + 1.0) / 2.0);
            bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            sn = std::sin(asr * (1.0 - x[i]) / 2.0);
            bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        return bvn * asr / (2.0 * two_pi) + norm_cdf(-h) * norm_cdf(-k);
    }
    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    if (std::abs(r) < 1.0) {
        const double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        const double bs = (h - k) * (h - k);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 16.0;
        bvn = a * std::exp(-(bs / as + hk) / 2.0) * (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (hk > -160.0) {
            const double b = std::sqrt(bs);
            bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * norm_cdf(-b / a) * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (int i = 0; i < lg; ++i) {
            for (int is = -1; is <= 1; is += 2) {
                const double xs = std::pow(a * (is * x[i] + 1.0), 2);
                const double rs = std::sqrt(1.0 - xs);
                bvn += a * w[i] *
                       (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs - std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
            }
        }
        bvn = -bvn / two_pi;
    }
    if (r > 0.0) return bvn + norm_cdf(-std::max(h, k));
    bvn = -bvn;
    if (k > h) bvn += h < 0.0 ? norm_cdf(k) - norm_cdf(h) : norm_cdf(-h) - norm_cdf(-k);
    return bvn;
}

}  // namespace

std::string_view to_string(CopulaFamily f) { return f == CopulaFamily::gaussian ? "gaussian" : "student"; }

CopulaFamily copula_family_from_string(std::string_view name) {
    if (name == "gaussian" || name == "normal" || name == "mvnorm") return CopulaFamily::gaussian;
    if (name == "student" || name == "student_t" || name == "mvt") return CopulaFamily::student;
    throw std::invalid_argument("unknown copula family: " + std::string(name));
}

void validate(const CopulaSpec& c) {
    if (c.family == CopulaFamily::student && !(c.shape > 2.0 && std::isfinite(c.shape)))
        throw std::invalid_argument("Student copula requires shape > 2, got " + std::to_string(c.shape));
}

EllipticalCopula::EllipticalCopula(const CopulaSpec& spec, int dim) : spec_(spec), dim_(dim) {
    validate(spec);
    if (dim < 1) throw std::invalid_argument("copula dimension must be >= 1");
    if (spec.family == CopulaFamily::student) {
        const double eta = spec.shape;
        log_const_ = std::lgamma(0.5 * (eta + dim)) + (dim - 1) * std::lgamma(0.5 * eta) - dim * std::lgamma(0.5 * (eta + 1.0));
    }
}

double EllipticalCopula::score(double u) const {
    if (spec_.family == CopulaFamily::gaussian) return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
    return boost::math::quantile(boost::math::students_t_distribution<double>(spec_.shape), u);
}

double EllipticalCopula::score_cdf(double x) const {
    if (spec_.family == CopulaFamily::gaussian) return norm_cdf(x);
    return boost::math::cdf(boost::math::students_t_distribution<double>(spec_.shape), x);
}

double EllipticalCopula::score_pdf(double x) const {
    if (spec_.family == CopulaFamily::gaussian) return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    return boost::math::pdf(boost::math::students_t_distribution<double>(spec_.shape), x);
}

double EllipticalCopula::log_density(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::LLT<Eigen::MatrixXd>& chol) const {
    const Eigen::MatrixXd& L = chol.matrixLLT();
    const double log_det = 2.0 * L.diagonal().array().log().sum();
    const Eigen::VectorXd w = chol.matrixL().solve(x);
    const double quad = w.squaredNorm();
    if (spec_.family == CopulaFamily::gaussian) return -0.5 * log_det - 0.5 * (quad - x.squaredNorm());
    const double eta = spec_.shape;
    double marg = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) marg += std::log1p(x[i] * x[i] / eta);
    return log_const_ - 0.5 * log_det - 0.5 * (eta + dim_) * std::log1p(quad / eta) + 0.5 * (eta + 1.0) * marg;
}

double copula_log_density(const CopulaSpec& c, const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::MatrixXd>& R) {
    const Eigen::Index k = u.size();
    if (R.rows() != k || R.cols() != k) throw std::invalid_argument("copula_density: dimension mismatch");
    for (Eigen::Index i = 0; i < k; ++i)
        if (!(u[i] > 0.0 && u[i] < 1.0)) throw std::invalid_argument("copula_density: u must lie strictly inside (0,1)");
    if (!R.isApprox(R.transpose(), 1e-12) || (R.diagonal().array() - 1.0).abs().maxCoeff() > 1e-10)
        throw std::invalid_argument("copula_density: R must be a symmetric unit-diagonal matrix");
    Eigen::LLT<Eigen::MatrixXd> chol(R);
    if (chol.info() != Eigen::Success) throw std::invalid_argument("copula_density: R is not positive definite");
    const EllipticalCopula cop(c, static_cast<int>(k));
    Eigen::VectorXd x(k);
    for (Eigen::Index i = 0; i < k; ++i) x[i] = cop.score(u[i]);
    return cop.log_density(x, chol);
}

double copula_density(const CopulaSpec& c, const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::MatrixXd>& R) {
    return std::exp(copula_log_density(c, u, R));
}

double bivariate_normal_cdf(double x, double y, double rho) {
    if (std::isnan(x) || std::isnan(y)) return std::numeric_limits<double>::quiet_NaN();
    if (x == -std::numeric_limits<double>::infinity() || y == -std::numeric_limits<double>::infinity()) return 0.0;
    if (x == std::numeric_limits<double>::infinity()) return norm_cdf(y);
    if (y == std::numeric_limits<double>::infinity()) return norm_cdf(x);
    return std::clamp(bvnd(-x, -y, rho), 0.0, std::min(norm_cdf(x), norm_cdf(y)));
}

double bivariate_t_cdf(double x, double y, double rho, double nu) {
    if (std::isnan(x) || std::isnan(y)) return std::numeric_limits<double>::quiet_NaN();
    constexpr double inf = std::numeric_limits<double>::infinity();
    const boost::math::students_t_distribution<double> tnu(nu);
    if (x == -inf || y == -inf) return 0.0;
    if (x == inf) return boost::math::cdf(tnu, y);
    if (y == inf) return boost::math::cdf(tnu, x);
    // Integrate over the variable with the smaller argument; the integrand then stays in the
    // lower tail where relative accuracy is best.
    if (y < x) std::swap(x, y);
    const boost::math::students_t_distribution<double> tnu1(nu + 1.0);
    const double srho = std::sqrt((1.0 - rho) * (1.0 + rho));
    auto integrand = [&](double s) {
        const double scale = srho * std::sqrt((nu + s * s) / (nu + 1.0));
        return boost::math::pdf(tnu, s) * boost::math::cdf(tnu1, (y - rho * s) / scale);
    };
    using boost::math::quadrature::gauss_kronrod;
    double result;
    if (x <= 0.0) {
        result = gauss_kronrod<double, 31>::integrate(integrand, -inf, x, 15, 1e-13);
    } else {
        result = gauss_kronrod<double, 31>::integrate(integrand, -inf, 0.0, 15, 1e-13) +
                 gauss_kronrod<double, 31>::integrate(integrand, 0.0, x, 15, 1e-13);
    }
    return std::clamp(result, 0.0, std::min(boost::math::cdf(tnu, x), boost::math::cdf(tnu, y)));
}

double bivariate_copula_cdf(const CopulaSpec& c, double u, double v, double rho) {
    validate(c);
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("bivariate_copula_cdf: |rho| must be < 1");
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) throw std::invalid_argument("bivariate_copula_cdf: u, v must lie in [0,1]");
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;
    if (rho == 0.0 && c.family == CopulaFamily::gaussian) return u * v;
    const EllipticalCopula cop(c, 2);
    const double x = cop.score(u);
    const double y = cop.score(v);
    const double p = c.family == CopulaFamily::gaussian ? bivariate_normal_cdf(x, y, rho) : bivariate_t_cdf(x, y, rho, c.shape);
    return std::clamp(p, std::max(u + v - 1.0, 0.0), std::min(u, v));
}

double bivariate_copula_hfunc(const CopulaSpec& c, double u, double v, double rho) {
    validate(c);
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("bivariate_copula_hfunc: |rho| must be < 1");
    if (!(u > 0.0 && u < 1.0 && v >= 0.0 && v <= 1.0)) throw std::invalid_argument("bivariate_copula_hfunc: need 0 < u < 1, 0 <= v <= 1");
    if (v == 0.0) return 0.0;
    if (v == 1.0) return 1.0;
    const EllipticalCopula cop(c, 2);
    const double x = cop.score(u);
    const double y = cop.score(v);
    const double s2 = (1.0 - rho) * (1.0 + rho);
    if (c.family == CopulaFamily::gaussian) return norm_cdf((y - rho * x) / std::sqrt(s2));
    const double nu = c.shape;
    const double arg = (y - rho * x) * std::sqrt((nu + 1.0) / ((nu + x * x) * s2));
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu + 1.0), arg);
}

}  // namespace sysrisk
