#include "hfsub/simulate.hpp"

#include <cmath>
#include <limits>

#include "hfsub/errors.hpp"

namespace hfsub {

double HestonConfig::feller() const {
    if (xi == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * kappa * sigma2 / (xi * xi);
}

HestonPath simulate_heston(const HestonConfig& cfg, Rng& rng) {
    if (cfg.kappa <= 0.0 || cfg.sigma2 <= 0.0 || cfg.xi < 0.0 || std::abs(cfg.rho) > 1.0 ||
        cfg.n < 1 || cfg.interval_years <= 0.0)
        fail(ErrorCode::InvalidConfig, "simulate_heston: invalid parameters");

    std::size_t n = cfg.n;
    double T = cfg.interval_years;
    double dt = T / static_cast<double>(n);
    double sdt = std::sqrt(dt);
    double rho_c = std::sqrt(1.0 - cfg.rho * cfg.rho);

    HestonPath out;
    out.log_prices.values.resize(n + 1);
    out.sigma2.resize(n + 1);

    double v = (cfg.xi == 0.0)
                   ? cfg.sigma2
                   : rng.gamma(2.0 * cfg.kappa * cfg.sigma2 / (cfg.xi * cfg.xi),
                               2.0 * cfg.kappa / (cfg.xi * cfg.xi));
    out.sigma2_initial_annual = v;

    double x = 0.0;
    out.log_prices.values[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double vplus = v > 0.0 ? v : 0.0;
        if (v < 0.0) ++out.truncation_events;
        double s = std::sqrt(vplus);
        out.sigma2[i] = vplus * T;   // per-interval units

        double dw = sdt * rng.normal();
        double db = sdt * rng.normal();
        x += s * dw;
        v += cfg.kappa * (cfg.sigma2 - vplus) * dt + cfg.xi * s * (cfg.rho * dw + rho_c * db);
        out.log_prices.values[i + 1] = x;
    }
    out.sigma2[n] = (v > 0.0 ? v : 0.0) * T;
    if (v < 0.0) ++out.truncation_events;

    double iv = 0.0, iq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        iv += out.sigma2[i];
        iq += out.sigma2[i] * out.sigma2[i];
    }
    out.iv = iv / static_cast<double>(n);
    out.iq = iq / static_cast<double>(n);
    return out;
}

HestonPath simulate_heston(const HestonConfig& cfg) {
    Rng rng(cfg.seed, 0);
    return simulate_heston(cfg, rng);
}

TickSeries add_noise(const TickSeries& prices, const std::vector<double>& sigma2_path,
                     const NoiseConfig& cfg, Rng& rng) {
    std::size_t count = prices.size();
    TickSeries out = prices;
    if (cfg.kind == NoiseKind::None) return out;
    std::size_t n = count - 1;

    if (cfg.kind == NoiseKind::Iid) {
        double w = std::sqrt(cfg.omega2);
        for (std::size_t i = 0; i < count; ++i) out.values[i] += w * rng.normal();
        return out;
    }

    // unit-variance MA(1) series u_i = u'_i + zeta u'_{i-1}
    double sd_innov = std::sqrt(1.0 / (1.0 + cfg.zeta * cfg.zeta));
    double prev = sd_innov * rng.normal();
    if (cfg.kind == NoiseKind::Ma1) {
        double w = std::sqrt(cfg.omega2);
        for (std::size_t i = 0; i < count; ++i) {
            double cur = sd_innov * rng.normal();
            out.values[i] += w * (cur + cfg.zeta * prev);
            prev = cur;
        }
        return out;
    }

    // HeteroMa1
    if (sigma2_path.size() != count)
        fail(ErrorCode::MissingSigmaPath, "add_noise: heteroscedastic noise needs a sigma2 path");
    double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < count; ++i) {
        double cur = sd_innov * rng.normal();
        double u = cur + cfg.zeta * prev;
        out.values[i] += cfg.gamma * std::sqrt(sigma2_path[i]) * inv_sqrt_n * u;
        prev = cur;
    }
    return out;
}

std::vector<double> noise_effective_variance_path(const std::vector<double>& sigma2_path,
                                                  std::size_t n, const NoiseConfig& cfg) {
    double dep = 1.0 + 2.0 * cfg.zeta / (1.0 + cfg.zeta * cfg.zeta);
    std::vector<double> out(n, 0.0);
    switch (cfg.kind) {
        case NoiseKind::None:
            break;
        case NoiseKind::Iid:
            for (auto& v : out) v = cfg.omega2;
            break;
        case NoiseKind::Ma1:
            for (auto& v : out) v = cfg.omega2 * dep;
            break;
        case NoiseKind::HeteroMa1: {
            if (sigma2_path.size() < n)
                fail(ErrorCode::MissingSigmaPath, "noise_effective_variance_path: sigma2 path too short");
            double g2n = cfg.gamma * cfg.gamma / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) out[i] = g2n * sigma2_path[i] * dep;
            break;
        }
    }
    return out;
}

std::pair<TickSeries, JumpLog> add_jumps(const TickSeries& prices, const JumpConfig& cfg,
                                         double iv, Rng& rng) {
    if (cfg.lambda < 0.0) fail(ErrorCode::InvalidConfig, "add_jumps: lambda must be >= 0");
    std::size_t n = prices.size() - 1;
    TickSeries out = prices;
    JumpLog log;

    double jump_sd = std::sqrt(cfg.var_multiple * iv);
    std::uint64_t count = rng.poisson(cfg.lambda);
    for (std::uint64_t k = 0; k < count; ++k) {
        double t = rng.uniform_pos();
        double size = jump_sd * rng.normal();
        std::size_t idx = static_cast<std::size_t>(std::ceil(t * static_cast<double>(n)));
        if (idx < 1) idx = 1;
        if (idx > n) idx = n;
        log.indices.push_back(idx);
        log.sizes.push_back(size);
    }
    for (const auto& [t, size] : cfg.forced) {
        std::size_t idx = static_cast<std::size_t>(std::ceil(t * static_cast<double>(n)));
        if (idx < 1) idx = 1;
        if (idx > n) idx = n;
        log.indices.push_back(idx);
        log.sizes.push_back(size);
    }
    for (std::size_t k = 0; k < log.indices.size(); ++k) {
        log.sum_squared += log.sizes[k] * log.sizes[k];
        for (std::size_t i = log.indices[k]; i <= n; ++i) out.values[i] += log.sizes[k];
    }
    return {std::move(out), std::move(log)};
}

} // namespace hfsub
