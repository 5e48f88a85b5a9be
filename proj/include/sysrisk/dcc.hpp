#pragma once

#include "sysrisk/copula.hpp"
#include "sysrisk/optim.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sysrisk {

/// DCC(m, n) parameters:
///   Q_t = (1 - sum c - sum d) Qbar + sum_j c_j e_{t-j} e_{t-j}' + sum_j d_j Q_{t-j}
///   R_t = diag(Q_t)^{-1/2} Q_t diag(Q_t)^{-1/2}
struct DccParams {
    Eigen::VectorXd c;
    Eigen::VectorXd d;
    Eigen::MatrixXd qbar;
    CopulaSpec copula;
};

/// Throws std::invalid_argument unless c, d >= 0, sum c + sum d < 1 and Qbar is symmetric PSD.
void validate(const DccParams& p);

struct CorrelationPath {
    std::vector<Eigen::MatrixXd> R;
    std::vector<Eigen::MatrixXd> Q;
};

/// Runs the Q recursion over the T x k panel `eps` with Q and e e' equal to Qbar before the sample.
CorrelationPath dcc_filter(const DccParams& params, const Eigen::Ref<const Eigen::MatrixXd>& eps);

/// H_t = D_t R_t D_t with D_t = diag(sqrt(h_t)).
Eigen::MatrixXd conditional_covariance(const Eigen::Ref<const Eigen::MatrixXd>& R, const Eigen::Ref<const Eigen::VectorXd>& h);

/// Pearson correlation matrix of the columns of X.
Eigen::MatrixXd sample_correlation(const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Which residuals drive the Q recursion.
enum class ScoreSource {
    /// Quantile transforms of the PIT values under the copula family, scaled to unit variance.
    copula_scores,
    /// Standardized residuals of the marginal models, supplied by the caller.
    garch_residuals,
};

/// PIT values are clamped to this distance from {0, 1}.
inline constexpr double kPitClamp = 1e-10;

/// Copula scores F^{-1}(u) (unscaled t quantiles for the Student copula).
Eigen::MatrixXd copula_scores(const CopulaSpec& c, const Eigen::Ref<const Eigen::MatrixXd>& U);
/// Copula scores rescaled to unit variance (identity for the Gaussian copula).
Eigen::MatrixXd recursion_scores(const CopulaSpec& c, const Eigen::Ref<const Eigen::MatrixXd>& U);

/// Stage-2 log-likelihood sum_t log c(u_t; R_t, eta). The recursion is driven by
/// recursion_scores(U), or by `residuals` when it is non-null. Qbar is taken from params.
double dcc_copula_loglik(const DccParams& params, const Eigen::Ref<const Eigen::MatrixXd>& U,
                         const Eigen::MatrixXd* residuals = nullptr);

struct DccFitOptions {
    int m = 1;
    int n = 1;
    ScoreSource source = ScoreSource::copula_scores;
    optim::Options optimizer;
    double max_shape = 100.0;
};

struct DccFit {
    DccParams params;
    /// Standard errors and p-values in the order c..., d..., [eta].
    Eigen::VectorXd se;
    Eigen::VectorXd pvalues;
    double loglik = 0.0;
    CorrelationPath path;
    bool converged = false;
    int iterations = 0;
    bool se_available = false;
    std::size_t clamped_pits = 0;
    std::vector<std::string> warnings;
};

std::vector<std::string> dcc_parameter_names(int m, int n, CopulaFamily family);

/// IFM stage 2: maximizes the copula log-likelihood over (c, d, eta) with Qbar fixed at
/// the sample correlation of the recursion residuals. `residuals` is required when
/// opts.source is garch_residuals.
DccFit fit_dcc(const Eigen::Ref<const Eigen::MatrixXd>& U, CopulaFamily family, const DccFitOptions& opts = {},
               const Eigen::MatrixXd* residuals = nullptr);

struct SimulatedDcc {
    Eigen::MatrixXd U;       // PIT values
    Eigen::MatrixXd scores;  // unit-variance recursion residuals
    CorrelationPath path;
};

/// Draws a T x k sample from the copula-DCC model; deterministic for a fixed seed.
SimulatedDcc simulate_dcc(const DccParams& params, std::size_t T, std::uint64_t seed);

}  // namespace sysrisk
