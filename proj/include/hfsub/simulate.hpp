#pragma once

#include <cstdint>
#include <vector>

#include "hfsub/rng.hpp"
#include "hfsub/series.hpp"

namespace hfsub {

/// Square-root stochastic volatility model. Parameters are in per-year units;
/// the simulated window covers interval_years of calendar time on the grid
/// t_i = i/n (default one trading day, 1/250). Output paths are expressed in
/// per-interval units, the units the sampled prices live in.
struct HestonConfig {
    double kappa = 5.0;
    double sigma2 = 0.04;
    double xi = 0.5;
    double rho = -0.5;
    std::size_t n = 23400;
    std::uint64_t seed = 1;
    double interval_years = 1.0 / 250.0;

    /// 2 kappa sigma2 / xi^2; reported, not enforced.
    double feller() const;
};

struct HestonPath {
    TickSeries log_prices;              // n+1 levels, X_0 = 0
    std::vector<double> sigma2;         // n+1 spot variances, per-interval units
    double iv = 0.0;                    // (1/n) sum of sigma2 over left endpoints
    double iq = 0.0;                    // (1/n) sum of sigma2^2
    double sigma2_initial_annual = 0.0; // the stationary draw, annual units
    std::size_t truncation_events = 0;  // Euler steps with negative variance
};

/// Euler scheme with full truncation (max(v,0) inside drift and diffusion,
/// outputs clipped at zero); sigma2_0 drawn from the stationary
/// Gamma(2 kappa sigma2 / xi^2, 2 kappa / xi^2) unless xi == 0, in which case
/// the variance stays at sigma2 exactly.
HestonPath simulate_heston(const HestonConfig& cfg, Rng& rng);
HestonPath simulate_heston(const HestonConfig& cfg);

enum class NoiseKind { None, Iid, Ma1, HeteroMa1 };

/// Additive observation noise. Iid/Ma1 use a fixed variance omega2; the MA(1)
/// filter u_i = u'_i + zeta u'_{i-1} has var(u') = 1/(1+zeta^2) so u has unit
/// variance and first-lag autocorrelation zeta/(1+zeta^2). HeteroMa1 scales by
/// the spot volatility: eps_i = gamma * sigma_i / sqrt(n) * u_i.
struct NoiseConfig {
    NoiseKind kind = NoiseKind::None;
    double omega2 = 0.0;
    double zeta = 0.0;
    double gamma = 0.0;

    static NoiseConfig none() { return {}; }
    static NoiseConfig iid(double omega2) { return {NoiseKind::Iid, omega2, 0.0, 0.0}; }
    static NoiseConfig ma1(double omega2, double zeta) { return {NoiseKind::Ma1, omega2, zeta, 0.0}; }
    static NoiseConfig hetero_ma1(double gamma, double zeta) {
        return {NoiseKind::HeteroMa1, 0.0, zeta, gamma};
    }
};

/// sigma2_path (per-interval units, n+1 values) is required for HeteroMa1.
TickSeries add_noise(const TickSeries& prices, const std::vector<double>& sigma2_path,
                     const NoiseConfig& cfg, Rng& rng);

/// Per-observation effective noise variance entering the pre-averaging limit;
/// serial dependence replaces omega^2 by omega^2 (1 + 2 zeta/(1+zeta^2)).
std::vector<double> noise_effective_variance_path(const std::vector<double>& sigma2_path,
                                                  std::size_t n, const NoiseConfig& cfg);

/// Compound Poisson jumps: Poisson(lambda) times uniform on (0,1], sizes
/// N(0, var_multiple * iv). `forced` jumps (time in (0,1], size) are applied
/// in addition and deterministically.
struct JumpConfig {
    double lambda = 0.0;
    double var_multiple = 2.0;
    std::vector<std::pair<double, double>> forced;
};

struct JumpLog {
    std::vector<std::size_t> indices;   // first price index the jump affects
    std::vector<double> sizes;
    double sum_squared = 0.0;
};

std::pair<TickSeries, JumpLog> add_jumps(const TickSeries& prices, const JumpConfig& cfg,
                                         double iv, Rng& rng);

/// Deterministic splittable stream; (seed, stream_id) fixes the sequence.
inline Rng rng_stream(std::uint64_t seed, std::uint64_t stream_id) { return Rng(seed, stream_id); }

} // namespace hfsub
