#include "hfsub/subsample.hpp"

#include <cmath>
#include <vector>

namespace hfsub {

namespace {

inline double abs_pow(double x, double p) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return std::abs(x);
    if (p == 2.0) return x * x;
    return std::pow(std::abs(x), p);
}

std::vector<ScalarFn> pure_power_fns(const PowerSpec& spec) {
    std::vector<ScalarFn> f;
    f.reserve(spec.m());
    for (double q : spec.q)
        f.push_back([q](double x) { return abs_pow(x, q); });
    return f;
}

CovEstimate subsample_cov_power_impl(const ReturnSeries& returns, const std::vector<ScalarFn>& f,
                                     std::size_t L, const std::vector<double>& full) {
    std::size_t n = returns.n();
    if (L < 2) fail(ErrorCode::TooFewSubsamples, "subsample_cov_power: need L >= 2");
    std::size_t n_sub = n / L;
    if (n_sub < 2) fail(ErrorCode::SubsampleTooSmall, "subsample_cov_power: need n/L >= 2");
    std::size_t m = f.size();
    double s = std::sqrt(static_cast<double>(n));

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd d(m);
    std::vector<double> vl(m);
    for (std::size_t l = 0; l < L; ++l) {
        std::fill(vl.begin(), vl.end(), 0.0);
        for (std::size_t i = 0; i < n_sub; ++i) {
            double x = s * returns.values[i * L + l];
            for (std::size_t k = 0; k < m; ++k) vl[k] += f[k](x);
        }
        for (std::size_t k = 0; k < m; ++k)
            d(k) = vl[k] / static_cast<double>(n_sub) - full[k];
        acc.noalias() += d * d.transpose();
    }
    acc *= static_cast<double>(n_sub) / static_cast<double>(L);
    double window = static_cast<double>(n_sub * L) / static_cast<double>(n);
    return make_cov_estimate(acc, "subsample_power", window);
}

// Shared machinery for the noiseless blocked subsampler; `returns` are already
// truncated when called from subsample_cov_truncated.
CovEstimate subsample_cov_blocked(const ReturnSeries& returns, const PowerSpec& spec,
                                  const SubsampleConfig& cfg, const std::vector<double>& center,
                                  const char* id) {
    std::size_t n = returns.n();
    if (cfg.p < 2) fail(ErrorCode::BlockTooSmall, "subsample_cov_bipower: need p >= 2");
    if (cfg.L < 2) fail(ErrorCode::TooFewSubsamples, "subsample_cov_bipower: need L >= 2");
    std::size_t nb = n_block(n, 1, cfg.p, cfg.L);
    if (nb < 1) fail(ErrorCode::InsufficientData, "subsample_cov_bipower: no full block per subsample");
    std::size_t m = spec.m();
    std::size_t L = cfg.L, p = cfg.p;
    double s = std::sqrt(static_cast<double>(n));

    // v[b][k]: average of the p-1 adjacent products strictly inside block b.
    std::size_t nblocks = nb * L;
    std::vector<double> v(nblocks * m, 0.0);
    for (std::size_t b = 0; b < nblocks; ++b) {
        for (std::size_t t = b * p; t + 1 < b * p + p; ++t) {
            double x = s * returns.values[t];
            double y = s * returns.values[t + 1];
            for (std::size_t k = 0; k < m; ++k)
                v[b * m + k] += abs_pow(x, spec.q[k]) * abs_pow(y, spec.r[k]);
        }
        for (std::size_t k = 0; k < m; ++k) v[b * m + k] /= static_cast<double>(p - 1);
    }

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd d(m);
    for (std::size_t l = 0; l < L; ++l) {
        d.setZero();
        for (std::size_t j = 0; j < nb; ++j)
            for (std::size_t k = 0; k < m; ++k) d(k) += v[(j * L + l) * m + k];
        for (std::size_t k = 0; k < m; ++k)
            d(k) = d(k) / static_cast<double>(nb) - center[k];
        acc.noalias() += d * d.transpose();
    }
    double n_eff = static_cast<double>(nb * L * p);
    acc *= n_eff / static_cast<double>(L * L);
    if (cfg.apply_L_correction) acc /= 1.0 - 1.0 / static_cast<double>(L);
    if (cfg.apply_p_correction) acc /= 1.0 - 1.0 / static_cast<double>(p);
    double window = n_eff / static_cast<double>(n);
    if (!cfg.inflate_partial_window) acc /= window;
    return make_cov_estimate(acc, id, window);
}

} // namespace

CovEstimate subsample_cov_power(const ReturnSeries& returns, const PowerSpec& spec,
                                std::size_t L) {
    for (double r : spec.r)
        if (r != 0.0) fail(ErrorCode::NonPurePowers, "subsample_cov_power: spec must have r == 0");
    std::vector<double> full = power_variation(returns, spec).values;
    return subsample_cov_power_impl(returns, pure_power_fns(spec), L, full);
}

CovEstimate subsample_cov_power(const ReturnSeries& returns, const std::vector<ScalarFn>& f,
                                std::size_t L) {
    std::vector<double> full = power_variation(returns, f).values;
    return subsample_cov_power_impl(returns, f, L, full);
}

CovEstimate subsample_cov_bipower(const ReturnSeries& returns, const PowerSpec& spec,
                                  const SubsampleConfig& cfg) {
    std::vector<double> center = bipower_variation(returns, spec).values;
    return subsample_cov_blocked(returns, spec, cfg, center, "subsample_bipower");
}

CovEstimate subsample_cov_truncated(const ReturnSeries& returns, const PowerSpec& spec,
                                    const TruncationRule& rule, const SubsampleConfig& cfg) {
    std::size_t n = returns.n();
    if (n < 2) fail(ErrorCode::SeriesTooShort, "subsample_cov_truncated: need n >= 2");
    double u = rule.threshold(n);
    ReturnSeries kept;
    kept.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = returns.values[i];
        kept.values[i] = (std::abs(d) <= u) ? d : 0.0;
    }
    std::vector<double> center = bipower_variation(kept, spec).values;
    CovEstimate out = subsample_cov_blocked(kept, spec, cfg, center, "subsample_truncated");
    return out;
}

CovEstimate subsample_cov_noisy(const TickSeries& prices, const PowerSpec& spec,
                                const WeightScheme& scheme, const SubsampleConfig& cfg) {
    std::size_t n = prices.size() - 1;
    std::size_t kn = scheme.kn();
    if (cfg.p < 3)
        fail(ErrorCode::BlockTooSmall,
             "subsample_cov_noisy: need p >= 3; already at p = 3 a block holds only k_n + 2 "
             "pre-averaged pairs against a dependence span of 2 k_n, and below that the block "
             "statistic is not computable");
    if (cfg.L < 2) fail(ErrorCode::TooFewSubsamples, "subsample_cov_noisy: need L >= 2");
    std::size_t nb = n_block(n, kn, cfg.p, cfg.L);
    if (nb < 1) fail(ErrorCode::InsufficientData, "subsample_cov_noisy: n < L*p*k_n");
    std::size_t m = spec.m();
    std::size_t L = cfg.L, p = cfg.p;
    double scale = std::pow(static_cast<double>(n), 0.25);
    std::size_t block_len = p * kn;          // returns per block
    std::size_t mv = block_len - 2 * kn + 2; // pre-averaged pairs per block

    std::vector<double> center = preavg_bipower(prices, spec, scheme).values;

    std::size_t nblocks = nb * L;
    std::vector<double> v(nblocks * m, 0.0);
    TickSeries seg;
    for (std::size_t b = 0; b < nblocks; ++b) {
        auto first = prices.values.begin() + static_cast<std::ptrdiff_t>(b * block_len);
        seg.values.assign(first, first + static_cast<std::ptrdiff_t>(block_len + 1));
        PreAveragedSeries bar = preaverage(seg, scheme);
        for (std::size_t t = 0; t < mv; ++t) {
            double a = scale * bar.values[t];
            double c = scale * bar.values[t + kn];
            for (std::size_t k = 0; k < m; ++k)
                v[b * m + k] += abs_pow(a, spec.q[k]) * abs_pow(c, spec.r[k]);
        }
        for (std::size_t k = 0; k < m; ++k) v[b * m + k] /= static_cast<double>(mv);
    }

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd d(m);
    for (std::size_t l = 0; l < L; ++l) {
        d.setZero();
        for (std::size_t j = 0; j < nb; ++j)
            for (std::size_t k = 0; k < m; ++k) d(k) += v[(j * L + l) * m + k];
        for (std::size_t k = 0; k < m; ++k)
            d(k) = d(k) / static_cast<double>(nb) - center[k];
        acc.noalias() += d * d.transpose();
    }
    // Rate factor: the effective number of pre-averaged pairs per subsample
    // over sqrt(n). Equals the nominal sqrt(n)/L scaling as p grows, but uses
    // the pair count actually available, which is what keeps the estimator
    // centred for moderate p.
    double c_rate = static_cast<double>(nb * mv) / std::sqrt(static_cast<double>(n));
    acc *= c_rate / static_cast<double>(L);
    if (cfg.apply_L_correction) acc /= 1.0 - 1.0 / static_cast<double>(L);
    if (cfg.apply_p_correction) acc /= 1.0 - 0.75 / static_cast<double>(p);
    double window = static_cast<double>(nb * L * block_len) / static_cast<double>(n);
    if (!cfg.inflate_partial_window) acc /= window;
    return make_cov_estimate(acc, "subsample_noisy", window);
}

std::size_t n_block(std::size_t n, std::size_t kn, std::size_t p, std::size_t L) {
    if (kn == 0 || p == 0 || L == 0)
        fail(ErrorCode::InvalidConfig, "n_block: all inputs must be positive");
    return (n / (p * kn)) / L;
}

Tuning suggest_tuning(std::size_t n, TuningRegime regime, double c_L, double c_p,
                      std::size_t kn) {
    double nd = static_cast<double>(n);
    Tuning t;
    auto rounded = [](double x, std::size_t lo) {
        return std::max<std::size_t>(lo, static_cast<std::size_t>(std::llround(x)));
    };
    switch (regime) {
        case TuningRegime::Power: {
            t.L = rounded(c_L * std::pow(nd, 2.0 / 3.0), 2);
            t.p = 1;
            while (t.L > 2 && n / t.L < 2) { t.L /= 2; t.degraded = true; }
            return t;
        }
        case TuningRegime::Bipower: {
            t.L = rounded(c_L * std::pow(nd, 2.0 / 5.0), 2);
            t.p = rounded(c_p * std::pow(nd, 1.0 / 5.0), 2);
            while (n_block(n, 1, t.p, t.L) < 1 && t.p > 2) { --t.p; t.degraded = true; }
            while (n_block(n, 1, t.p, t.L) < 1 && t.L > 2) { --t.L; t.degraded = true; }
            return t;
        }
        case TuningRegime::Noisy: {
            if (kn == 0) kn = rounded(std::sqrt(nd), 2);
            t.L = rounded(c_L * std::pow(nd, 1.0 / 5.0), 2);
            t.p = rounded(c_p * std::pow(nd, 1.0 / 10.0), 3);
            while (n_block(n, kn, t.p, t.L) < 1 && t.p > 3) { --t.p; t.degraded = true; }
            while (n_block(n, kn, t.p, t.L) < 1 && t.L > 2) { --t.L; t.degraded = true; }
            return t;
        }
    }
    fail(ErrorCode::InvalidConfig, "suggest_tuning: unknown regime");
}

namespace {

CovEstimate s_hat_power_impl(const ReturnSeries& returns, const std::vector<ScalarFn>& f) {
    std::size_t n = returns.n();
    if (n < 2) fail(ErrorCode::SeriesTooShort, "s_hat_power: need n >= 2");
    std::size_t m = f.size();
    double s = std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd d(m);
    std::vector<double> cur(m), nxt(m);
    for (std::size_t k = 0; k < m; ++k) cur[k] = f[k](s * returns.values[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t k = 0; k < m; ++k) nxt[k] = f[k](s * returns.values[i + 1]);
        for (std::size_t k = 0; k < m; ++k) d(k) = cur[k] - nxt[k];
        acc.noalias() += d * d.transpose();
        cur.swap(nxt);
    }
    acc /= 2.0 * static_cast<double>(n);
    return make_cov_estimate(acc, "s_hat", 1.0);
}

} // namespace

CovEstimate s_hat_power(const ReturnSeries& returns, const PowerSpec& spec) {
    for (double r : spec.r)
        if (r != 0.0) fail(ErrorCode::NonPurePowers, "s_hat_power: spec must have r == 0");
    return s_hat_power_impl(returns, pure_power_fns(spec));
}

CovEstimate s_hat_power(const ReturnSeries& returns, const std::vector<ScalarFn>& f) {
    return s_hat_power_impl(returns, f);
}

} // namespace hfsub
