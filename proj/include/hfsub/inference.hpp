#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hfsub/cov_estimate.hpp"
#include "hfsub/preavg.hpp"
#include "hfsub/series.hpp"
#include "hfsub/variation.hpp"

namespace hfsub {

/// Standard normal CDF and quantile (Wichura's AS241, ~1e-15 accurate).
double normal_cdf(double x);
double normal_quantile(double p);

enum class ConvergenceRate { SqrtN, FourthRootN };

double rate_factor(ConvergenceRate rate, std::size_t n);

struct TestResult {
    double statistic = 0.0;    // the contrast estimate itself
    double std_error = 0.0;
    double t = 0.0;            // statistic / std_error
    ConvergenceRate rate = ConvergenceRate::SqrtN;
    double p_right = 1.0;
    double p_two_sided = 1.0;
    double cov_min_eigenvalue = 0.0;
    double cov_condition_number = 0.0;
    bool cov_psd = false;
};

/// Componentwise studentisation: rate(n) * (estimate_k - target_k) / sqrt(cov_kk).
std::vector<double> studentize(const EstimateVector& estimate, const std::vector<double>& target,
                               const CovEstimate& cov, std::size_t n, ConvergenceRate rate);

/// Jump contrast V*(2,0) - mu_1^{-2} V*(1,1) (raw) or the log difference
/// (delta method); right-tail p-value against N(0,1). cov must be the 2x2
/// covariance estimate of (V*(2,0), V*(1,1)).
TestResult jump_test(const TickSeries& prices, const WeightScheme& scheme, const CovEstimate& cov,
                     bool log_form);

/// log(sqrt(IQ) / IV) with a delta-method standard error through the
/// bias-corrected estimates; cov4 must cover (V*(2,0), V*(4,0)).
TestResult const_vol_test(const TickSeries& prices, const WeightScheme& scheme,
                          const CovEstimate& cov4);

// Pure statistic/gradient helpers (unit-testable against finite differences).
double jump_log_statistic(double v20, double v11);
Eigen::Vector2d jump_log_gradient(double v20, double v11);
double const_vol_statistic(double v20, double v40, const WeightConstants& c, double theta,
                           double omega2);
Eigen::Vector2d const_vol_gradient(double v20, double v40, const WeightConstants& c, double theta,
                                   double omega2);

struct MatrixDiagnostics {
    double min_eigenvalue = 0.0;
    double condition_number = 0.0;
    bool psd = false;
    bool ill_conditioned = false;   // condition number >= 10 * dim
};

MatrixDiagnostics matrix_diagnostics(const Eigen::MatrixXd& cov);

enum class Sidedness { TwoSided, LeftSided, RightSided };

/// Normal-quantile interval; LeftSided returns (stat - z se, +inf),
/// RightSided returns (-inf, stat + z se).
std::pair<double, double> confidence_interval(double statistic, double std_error, double level,
                                              Sidedness sidedness);

} // namespace hfsub
