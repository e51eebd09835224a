#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hfsub/power_spec.hpp"
#include "hfsub/series.hpp"

namespace hfsub {

using ScalarFn = std::function<double(double)>;

enum class EstimatorKind { Plain, Truncated, Preaveraged };

/// Point estimate vector with provenance metadata.
struct EstimateVector {
    std::vector<double> values;
    PowerSpec spec;
    std::size_t n = 0;
    EstimatorKind kind = EstimatorKind::Plain;
    std::optional<TruncationRule> truncation;
    double theta = 0.0;       // pre-averaging only
    std::size_t window = 0;   // pre-averaging only (k_n)

    std::size_t m() const { return values.size(); }
};

/// V(f)^n = (1/n) sum_i f(sqrt(n) dX_i) for componentwise f.
EstimateVector power_variation(const ReturnSeries& returns, const std::vector<ScalarFn>& f);

/// Pure-power fast path; requires r == 0 in the spec.
EstimateVector power_variation(const ReturnSeries& returns, const PowerSpec& spec);

/// V(f,g)^n = (1/n) sum_{i<n} f(sqrt(n) dX_i) g(sqrt(n) dX_{i+1}).
EstimateVector bipower_variation(const ReturnSeries& returns, const std::vector<ScalarFn>& f,
                                 const std::vector<ScalarFn>& g);

/// Pure bipower: component k is (1/n) sum |sqrt(n) dX_i|^{q_k} |sqrt(n) dX_{i+1}|^{r_k}.
EstimateVector bipower_variation(const ReturnSeries& returns, const PowerSpec& spec);

/// Same with increments zeroed when |dX_i| exceeds u_n = alpha n^{-omega_check}.
/// The indicator keeps increments with |dX_i| exactly equal to u_n.
EstimateVector truncated_bipower_variation(const ReturnSeries& returns, const PowerSpec& spec,
                                           const TruncationRule& rule);

/// Probability limit: component k is mu_{q_k} mu_{r_k} * integrated_power(q_k + r_k),
/// where integrated_power(p) evaluates the integral of |sigma_s|^p over [0,1].
std::vector<double> bipower_limit(const PowerSpec& spec,
                                  const std::function<double(double)>& integrated_power);

} // namespace hfsub
