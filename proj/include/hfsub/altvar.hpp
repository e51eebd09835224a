#pragma once

#include <vector>

#include "hfsub/cov_estimate.hpp"
#include "hfsub/power_spec.hpp"
#include "hfsub/preavg.hpp"
#include "hfsub/series.hpp"
#include "hfsub/variation.hpp"

namespace hfsub {

/// 1-dependent-sum covariance estimator built from gamma_i(k) = f_k(x_i) g_k(x_{i+1});
/// symmetrised, not guaranteed positive semi-definite.
CovEstimate sigma_tilde(const ReturnSeries& returns, const PowerSpec& spec);
CovEstimate sigma_tilde(const ReturnSeries& returns, const std::vector<ScalarFn>& f,
                        const std::vector<ScalarFn>& g);

/// Componentwise estimator c_ij V(q_i+q_j, r_i+r_j)^n with the moment constant
/// c_ij implied by the pure-power covariance structure.
CovEstimate sigma_via_rescaled_bipower(const ReturnSeries& returns, const PowerSpec& spec);

/// Element-by-element estimator of the noisy-case asymptotic covariance;
/// symmetric by construction but not guaranteed positive semi-definite.
CovEstimate sigma_tilde_star_pv(const TickSeries& prices, const PowerSpec& spec,
                                const WeightScheme& scheme);

struct ObservedAvarConfig {
    std::size_t B = 2;
    std::size_t K1 = 1;
    std::size_t K2 = 2;
    bool forward_half_intervals = true;

    ObservedAvarConfig() = default;
    ObservedAvarConfig(std::size_t B_, std::size_t K1_, std::size_t K2_, bool halves = true)
        : B(B_), K1(K1_), K2(K2_), forward_half_intervals(halves) {
        if (B < 2 || K1 < 1 || K1 >= K2)
            fail(ErrorCode::InvalidConfig, "ObservedAvarConfig: need B >= 2 and 1 <= K1 < K2");
    }
};

/// Two-scale combination of the K-averaged apparent quadratic covariation of a
/// sequence of local statistics; cancels a locally linear drift in the
/// sequence exactly. Returned matrix is the estimated per-term error variance.
Eigen::MatrixXd two_scale_quadratic_covariation(const std::vector<Eigen::VectorXd>& locals,
                                                std::size_t K1, std::size_t K2);

/// Observed asymptotic variance: local pre-averaged statistics on B blocks
/// (forward half-intervals by default), differenced at scales K1 < K2 and
/// combined to cancel the smooth drift; the trailing incomplete block is dropped.
CovEstimate observed_avar(const TickSeries& prices, const PowerSpec& spec,
                          const WeightScheme& scheme, const ObservedAvarConfig& cfg);

/// Closed-form Sigma for pure powers given the integral of |sigma|^p.
Eigen::MatrixXd closed_form_sigma(const PowerSpec& spec,
                                  const std::function<double(double)>& integrated_power);

} // namespace hfsub
