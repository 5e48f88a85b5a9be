#pragma once

#include "sysrisk/copula.hpp"
#include "sysrisk/dist.hpp"
#include "sysrisk/marketdata.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

namespace sysrisk {

/// alpha is the distress level of the conditioning institution j, beta the CoVaR level of i.
struct RiskLevels {
    double alpha = 0.05;
    double beta = 0.05;
};

void validate(const RiskLevels& lv);

/// Conditional marginal law of one return at one date: r = mu + sqrt(h) z, z ~ dist.
struct MarginalState {
    double mu = 0.0;
    double h = 1.0;
    DistSpec dist;
};

/// VaR = mu + sqrt(h) F^{-1}(alpha).
double conditional_var(const MarginalState& m, double alpha);

struct CovarSolution {
    double covar = 0.0;
    /// u* with C(u*, alpha) = alpha beta.
    double u = 0.0;
    /// |C(u*, alpha) - alpha beta|.
    double residual = 0.0;
};

/// Solves C(u, alpha) = alpha beta for u (safeguarded Newton inside a bisection bracket),
/// then maps u* through the quantile of the index marginal. `guess` is an optional
/// starting point. Throws NumericError if the root is not bracketed or the residual
/// exceeds 1e-10.
CovarSolution solve_covar(const CopulaSpec& copula, double rho, const MarginalState& index, const RiskLevels& lv,
                          double guess = std::numeric_limits<double>::quiet_NaN());
double covar_at(const CopulaSpec& copula, double rho, const MarginalState& index, const RiskLevels& lv);

struct CoVaRSeries {
    std::vector<Date> dates;
    Eigen::VectorXd values;
    Eigen::VectorXd var_j;
    Eigen::VectorXd rho;
    Eigen::VectorXd u;
    Eigen::VectorXd residual;
    std::string index_ticker;
    std::string insurer_ticker;
    RiskLevels levels;
};

/// Inputs for one (index i, insurer j) pair, all aligned on the same dates.
struct CovarPairInput {
    std::vector<Date> dates;
    std::string index_ticker;
    std::string insurer_ticker;
    CopulaSpec copula;
    Eigen::VectorXd rho;
    Eigen::VectorXd index_mu;
    Eigen::VectorXd index_h;
    DistSpec index_dist;
    Eigen::VectorXd insurer_mu;
    Eigen::VectorXd insurer_h;
    DistSpec insurer_dist;
};

CoVaRSeries covar_series(const CovarPairInput& in, const RiskLevels& lv);

}  // namespace sysrisk
