#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hfsub/power_spec.hpp"
#include "hfsub/series.hpp"
#include "hfsub/variation.hpp"

namespace hfsub {

/// min(x, 1-x) on [0,1]; the weight used throughout the numerical work.
double weight_min_x(double x);

/// Weight function together with its derivative and interior kink locations,
/// which the quadrature for the limit constants must split at.
struct WeightProfile {
    ScalarFn w;
    ScalarFn wprime;
    std::vector<double> kinks;
    std::string name;
};

enum class WindowRounding { Nearest, Floor };

/// Pre-averaging window: weights w_j = w(j/k_n), j = 0..k_n, with
/// k_n = max(2, round(theta * sqrt(n))) by default (floor selectable).
class WeightScheme {
public:
    static WeightScheme min_weight(double theta, std::size_t n,
                                   WindowRounding rounding = WindowRounding::Nearest);
    static WeightScheme min_weight_window(std::size_t kn, double theta);
    static WeightScheme custom(std::shared_ptr<const WeightProfile> profile, std::size_t kn,
                               double theta);

    std::size_t kn() const { return kn_; }
    double theta() const { return theta_; }
    const std::vector<double>& weights() const { return wj_; }
    const WeightProfile& profile() const { return *profile_; }
    std::shared_ptr<const WeightProfile> profile_ptr() const { return profile_; }

    /// k_n / sqrt(n): the realised window ratio for a given sample size.
    double theta_effective(std::size_t n) const;

private:
    WeightScheme(std::shared_ptr<const WeightProfile> profile, std::size_t kn, double theta);

    std::shared_ptr<const WeightProfile> profile_;
    std::size_t kn_;
    double theta_;
    std::vector<double> wj_;
};

/// Limit constants psi_1, psi_2, Phi_ij of the weight function plus their
/// finite-n counterparts psi_i^n for the scheme's window.
struct WeightConstants {
    double psi1 = 0.0;
    double psi2 = 0.0;
    double psi1_n = 0.0;
    double psi2_n = 0.0;
    double phi11 = 0.0;
    double phi12 = 0.0;
    double phi22 = 0.0;
};

/// Limit constants are evaluated by adaptive quadrature (tolerance 1e-10) and
/// cached per weight profile; the finite-n sums are recomputed per window.
WeightConstants weight_constants(const WeightScheme& scheme);

/// Pre-averaged returns.
struct PreAveragedSeries {
    std::vector<double> values;   // n - k_n + 2 entries
    std::size_t kn = 0;
    double theta = 0.0;
};

/// dYbar[i] = sum_{j=1}^{kn-1} w_j (Y[i+j] - Y[i+j-1]), i = 0..n-kn+1.
PreAveragedSeries preaverage(const TickSeries& prices, const WeightScheme& scheme);

/// Equivalent level form -(sum_j (w_{j+1}-w_j) Y_{i+j}); used as a cross-check.
PreAveragedSeries preaverage_levels(const TickSeries& prices, const WeightScheme& scheme);

/// Component k: (1/(n-2kn+2)) sum_i |n^{1/4} dYbar_i|^{q_k} |n^{1/4} dYbar_{i+kn}|^{r_k}.
EstimateVector preavg_bipower(const TickSeries& prices, const PowerSpec& spec,
                              const WeightScheme& scheme);

/// Probability limit of preavg_bipower given discretised variance paths:
/// component k = mu_q mu_r (1/n) sum_i (te*psi2n*sigma2[i] + psi1n*noise_var[i]/te)^{(q+r)/2},
/// with te = kn/sqrt(n). Paths are read at observation times i = 0..n-1.
std::vector<double> preavg_bipower_limit(const PowerSpec& spec, const WeightScheme& scheme,
                                         std::size_t n, const std::vector<double>& sigma2_path,
                                         const std::vector<double>& noise_var_path);

/// omega^2 estimate from minus the first-order autocovariance of noisy returns.
struct NoiseVariance {
    double value = 0.0;
    bool negative = false;
};
NoiseVariance noise_variance_hat(const ReturnSeries& returns);

/// Bias-corrected integrated variance; negative omega2 is clamped to zero.
/// Limitation: the noise correction term is derived for i.i.d. noise; under
/// serially dependent noise the point estimate keeps a small residual bias.
struct BiasCorrected {
    double value = 0.0;
    bool omega2_clamped = false;
};
BiasCorrected iv_hat(const TickSeries& prices, const WeightScheme& scheme, double omega2);

/// Bias-corrected integrated quarticity; takes the iv_hat value computed on
/// the same data.
BiasCorrected iq_hat(const TickSeries& prices, const WeightScheme& scheme, double omega2,
                     double iv);

/// Closed-form asymptotic variance of the pre-averaged realized variance:
/// 4 (theta^3 Phi22 S4 + 2 theta Phi12 S2 w2 + Phi11 w2^2 / theta),
/// with S4, S2 the integrals of sigma^4 and sigma^2.
double sigma_star_20_closed_form(double theta, const WeightConstants& constants,
                                 double int_sigma4, double int_sigma2, double omega2);

} // namespace hfsub
