#pragma once

#include "sysrisk/dist.hpp"
#include "sysrisk/optim.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sysrisk {

/// Lag orders of the ARMA mean and of the eGARCH variance recursion.
/// `arch` counts the (alpha, gamma) shock lags and `garch` the beta lags.
struct ArmaEgarchOrders {
    int ar = 1;
    int ma = 1;
    int arch = 2;
    int garch = 2;

    friend bool operator==(const ArmaEgarchOrders&, const ArmaEgarchOrders&) = default;
};

/// ARMA(ar, ma) mean with an exponential GARCH variance:
///
///   r_t = mu_t + y_t,  mu_t = mu + sum ar_j r_{t-j} + sum ma_j y_{t-j},  y_t = sqrt(h_t) z_t
///   log h_t = omega + sum_j (alpha_j e_{t-j} + gamma_j (|e_{t-j}| - E|e|)) + sum_j beta_j log h_{t-j}
///
/// with e_t = y_t / sqrt(h_t). alpha carries the signed (leverage) effect and gamma the
/// magnitude effect.
struct ArmaEgarchParams {
    double mu = 0.0;
    Eigen::VectorXd ar;
    Eigen::VectorXd ma;
    double omega = 0.0;
    Eigen::VectorXd alpha;
    Eigen::VectorXd gamma;
    Eigen::VectorXd beta;
    DistSpec dist;

    ArmaEgarchOrders orders() const;
    /// Zero-initialised parameters of the given orders.
    static ArmaEgarchParams zeros(const ArmaEgarchOrders& o, const DistSpec& dist);
};

/// Parameter labels in reporting order: mu, ar*, ma*, omega, alpha*, beta*, gamma*, [skew], [shape].
std::vector<std::string> parameter_names(const ArmaEgarchOrders& o, Family family);
Eigen::VectorXd pack(const ArmaEgarchParams& p);
ArmaEgarchParams unpack(const Eigen::VectorXd& v, const ArmaEgarchOrders& o, Family family);

struct FilterOutput {
    Eigen::VectorXd mu;
    Eigen::VectorXd h;
    Eigen::VectorXd z;
    double loglik = 0.0;
};

/// Runs the mean and variance recursions over `series`.
///
/// Pre-sample returns are the sample mean, pre-sample residuals are 0, pre-sample
/// log-variances are the log of the sample variance and pre-sample shocks carry no news
/// (|e| = E|e|, e = 0). Throws NonFiniteLikelihood if the recursion leaves the finite range.
FilterOutput arma_egarch_filter(const ArmaEgarchParams& params, const Eigen::Ref<const Eigen::VectorXd>& series);
double arma_egarch_loglik(const ArmaEgarchParams& params, const Eigen::Ref<const Eigen::VectorXd>& series);

struct GarchFitOptions {
    optim::Options optimizer;
    int starts = 3;
    std::uint64_t seed = 20181230;
    /// Weight of the quadratic penalty on |sum beta| >= 1.
    double stationarity_penalty = 1e6;
};

struct FitDiagnostics {
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
    int best_start = 0;
    std::string message;
    bool boundary = false;
    bool se_available = false;
    std::vector<std::string> warnings;
};

struct UnivariateFit {
    ArmaEgarchParams params;
    FilterOutput filter;
    Eigen::VectorXd se;
    Eigen::VectorXd pvalues;
    FitDiagnostics diagnostics;
};

/// Maximum-likelihood fit by multi-start BFGS on transformed parameters. Standard errors
/// come from the inverse numerical Hessian (NaN when it is not negative definite) and
/// p-values are two-sided normal.
UnivariateFit fit_arma_egarch(const ArmaEgarchOrders& orders, const DistSpec& dist_template,
                              const Eigen::Ref<const Eigen::VectorXd>& series, const GarchFitOptions& opts = {});

/// Gradient of the log-likelihood by Richardson-extrapolated central differences.
Eigen::VectorXd arma_egarch_score(const ArmaEgarchParams& params, const Eigen::Ref<const Eigen::VectorXd>& series);

struct SimulatedPath {
    Eigen::VectorXd r;
    Eigen::VectorXd h;
    Eigen::VectorXd z;
};

/// Generates n values after discarding `burn`; innovations are dist_sample(params.dist, n + burn, seed).
SimulatedPath simulate_arma_egarch_path(const ArmaEgarchParams& params, std::size_t n, std::size_t burn, std::uint64_t seed);
Eigen::VectorXd simulate_arma_egarch(const ArmaEgarchParams& params, std::size_t n, std::size_t burn, std::uint64_t seed);

}  // namespace sysrisk
