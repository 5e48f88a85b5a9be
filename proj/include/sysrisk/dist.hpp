#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace sysrisk {

enum class Family { normal, skew_normal, student_t, skew_student_t, ged };

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);

bool is_skewed(Family f);
bool has_shape(Family f);

/// Standardized innovation law (zero mean, unit variance).
///
/// `skew` is the Fernandez-Steel inverse-scale factor xi (xi = 1 is symmetric) and is
/// ignored by the symmetric families. `shape` is the degrees of freedom nu for the t
/// families (nu > 2) or the GED tail parameter (nu > 0); ignored by the normal families.
struct DistSpec {
    Family family = Family::normal;
    double skew = 1.0;
    double shape = 0.0;

    friend bool operator==(const DistSpec&, const DistSpec&) = default;
};

/// Throws std::invalid_argument when the parameters are outside the admissible region.
void validate(const DistSpec& d);
bool is_valid(const DistSpec& d) noexcept;

/// Precomputed constants for repeated evaluation of one DistSpec.
///
/// Every family is built as a symmetric unit-variance base law f, skewed by
/// p(w) = 2/(xi + 1/xi) * f(w / xi^sign(w)), then re-centred and re-scaled so
/// that z = (w - m) / s has zero mean and unit variance. Symmetric families use
/// the same code path with xi = 1, which makes the reduction exact.
class StandardizedDist {
public:
    explicit StandardizedDist(const DistSpec& d);

    const DistSpec& spec() const noexcept { return spec_; }

    double pdf(double z) const;
    double logpdf(double z) const;
    double cdf(double z) const;
    double quantile(double p) const;
    /// E|z| under the standardized law.
    double abs_moment() const noexcept { return abs_moment_; }

private:
    double base_logpdf(double s) const;
    double base_cdf(double s) const;
    double base_quantile(double p) const;
    // Integral of s * g(s) over [a, inf) for the unit-variance base density g, a >= 0.
    double base_upper_moment(double a) const;

    DistSpec spec_;
    double xi_ = 1.0;
    double shift_ = 0.0;  // m: mean of the skewed variable
    double scale_ = 1.0;  // s: its standard deviation
    double log_norm_ = 0.0;
    double log_skew_ = 0.0;  // log(2/(xi + 1/xi)) + log(s)
    double aux_ = 0.0;  // t: sqrt((nu-2)/nu); ged: lambda
    double abs_moment_ = 0.0;
};

double dist_pdf(const DistSpec& d, double z);
double dist_logpdf(const DistSpec& d, double z);
double dist_cdf(const DistSpec& d, double z);
/// Throws std::domain_error unless 0 < p < 1.
double dist_quantile(const DistSpec& d, double p);
double dist_abs_moment(const DistSpec& d);
/// i.i.d. draws by inversion; deterministic for a fixed seed.
Eigen::VectorXd dist_sample(const DistSpec& d, std::size_t n, std::uint64_t seed);

/// Uniform (0,1) draw with 53 random bits, never exactly 0 or 1.
template <class Rng>
double open_uniform(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace sysrisk
