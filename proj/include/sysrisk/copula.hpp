#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace sysrisk {

enum class CopulaFamily { gaussian, student };

std::string_view to_string(CopulaFamily f);
CopulaFamily copula_family_from_string(std::string_view name);

struct CopulaSpec {
    CopulaFamily family = CopulaFamily::gaussian;
    /// Degrees of freedom eta (> 2) of the Student copula; unused for the Gaussian.
    double shape = 0.0;

    friend bool operator==(const CopulaSpec&, const CopulaSpec&) = default;
};

void validate(const CopulaSpec& c);

/// Elliptical copula evaluated through its scores x_i = F^{-1}(u_i), where F is the
/// standard normal or the (unscaled) Student-t with eta degrees of freedom.
class EllipticalCopula {
public:
    explicit EllipticalCopula(const CopulaSpec& spec, int dim);

    const CopulaSpec& spec() const noexcept { return spec_; }
    int dim() const noexcept { return dim_; }

    double score(double u) const;
    double score_cdf(double x) const;
    double score_pdf(double x) const;

    /// log c(u; R) from scores x and a Cholesky factor of R.
    double log_density(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::LLT<Eigen::MatrixXd>& chol) const;

private:
    CopulaSpec spec_;
    int dim_;
    double log_const_ = 0.0;
};

/// Density of the copula at u (each u_i in (0,1)); R must be a positive-definite
/// correlation matrix. Throws std::invalid_argument otherwise.
double copula_density(const CopulaSpec& c, const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::MatrixXd>& R);
double copula_log_density(const CopulaSpec& c, const Eigen::Ref<const Eigen::VectorXd>& u,
                          const Eigen::Ref<const Eigen::MatrixXd>& R);

/// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho (Genz, 2004).
double bivariate_normal_cdf(double x, double y, double rho);

/// P(X <= x, Y <= y) for a standard bivariate Student-t with correlation rho and nu degrees
/// of freedom, by adaptive quadrature of the conditional representation
/// int_{-inf}^{x} t_nu(s) T_{nu+1}((y - rho s) / sqrt((1 - rho^2)(nu + s^2)/(nu + 1))) ds.
double bivariate_t_cdf(double x, double y, double rho, double nu);

/// C(u, v) for the bivariate copula with correlation rho; |rho| < 1.
double bivariate_copula_cdf(const CopulaSpec& c, double u, double v, double rho);

/// dC(u, v)/du = P(V <= v | U = u); 0 < u < 1, 0 <= v <= 1.
double bivariate_copula_hfunc(const CopulaSpec& c, double u, double v, double rho);

}  // namespace sysrisk
