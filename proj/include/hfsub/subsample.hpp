#pragma once

#include <cstddef>

#include "hfsub/cov_estimate.hpp"
#include "hfsub/power_spec.hpp"
#include "hfsub/preavg.hpp"
#include "hfsub/series.hpp"
#include "hfsub/variation.hpp"

namespace hfsub {

/// Tuning for the blocked subsamplers. Corrections default on; turn them off
/// to replicate the raw estimators.
struct SubsampleConfig {
    std::size_t L = 2;
    std::size_t p = 2;
    bool apply_L_correction = true;   // divide by 1 - 1/L
    bool apply_p_correction = true;   // divide by 1 - 0.75/p (noisy), 1 - 1/p (noiseless)
    // When block sizes do not divide n, the estimate computed on the partial
    // window already sits on a per-unit-time scale and is used unchanged for
    // the whole interval (true, the default). Setting false rescales by
    // 1/effective_window instead.
    bool inflate_partial_window = true;

    static SubsampleConfig corrected(std::size_t L, std::size_t p) { return {L, p, true, true, true}; }
    static SubsampleConfig raw(std::size_t L, std::size_t p) { return {L, p, false, false, true}; }
};

/// Strided-return subsampler for power variation; L subsamples, no blocks.
CovEstimate subsample_cov_power(const ReturnSeries& returns, const PowerSpec& spec, std::size_t L);
CovEstimate subsample_cov_power(const ReturnSeries& returns, const std::vector<ScalarFn>& f,
                                std::size_t L);

/// Blocked subsampler for bipower variation, blocks of p returns assigned
/// round-robin to L subsamples, centred at the full-sample estimate.
CovEstimate subsample_cov_bipower(const ReturnSeries& returns, const PowerSpec& spec,
                                  const SubsampleConfig& cfg);

/// Same with every increment truncated at u_n, in the block statistics and in
/// the centring statistic alike.
CovEstimate subsample_cov_truncated(const ReturnSeries& returns, const PowerSpec& spec,
                                    const TruncationRule& rule, const SubsampleConfig& cfg);

/// Noisy-data subsampler for pre-averaged bipower variation. Blocks hold
/// p*k_n returns and are pre-averaged locally so no window straddles a block
/// boundary; requires p >= 3.
CovEstimate subsample_cov_noisy(const TickSeries& prices, const PowerSpec& spec,
                                const WeightScheme& scheme, const SubsampleConfig& cfg);

/// Maximum number of blocks of length p*k_n assignable to each of L subsamples.
std::size_t n_block(std::size_t n, std::size_t kn, std::size_t p, std::size_t L);

enum class TuningRegime { Power, Bipower, Noisy };

struct Tuning {
    std::size_t L = 0;
    std::size_t p = 0;
    bool degraded = false;   // true if shrunk below the rate rule to stay feasible
};

/// Rate-optimal tuning: L ~ n^{2/3} (power), (L,p) ~ (n^{2/5}, n^{1/5})
/// (bipower), (n^{1/5}, n^{1/10}) with p >= 3 (noisy). Constants are
/// user-supplied; results shrink until n_block >= 1. kn is only used for the
/// noisy regime and defaults to round(sqrt(n)).
Tuning suggest_tuning(std::size_t n, TuningRegime regime, double c_L = 1.0, double c_p = 1.0,
                      std::size_t kn = 0);

/// Difference-based positive semi-definite estimator for power variation,
/// (1/2n) sum_i (f(x_i) - f(x_{i+1})) (f(x_i) - f(x_{i+1}))'.
CovEstimate s_hat_power(const ReturnSeries& returns, const PowerSpec& spec);
CovEstimate s_hat_power(const ReturnSeries& returns, const std::vector<ScalarFn>& f);

} // namespace hfsub
