#include "hfsub/variation.hpp"

#include <cmath>

#include "hfsub/moments.hpp"

namespace hfsub {

namespace {

void check_pure_power(const PowerSpec& spec) {
    for (std::size_t k = 0; k < spec.m(); ++k)
        if (spec.r[k] != 0.0)
            fail(ErrorCode::NonPurePowers, "power_variation: spec must have r == 0");
}

// |x|^p with the p==0 convention |x|^0 = 1 (also at x = 0).
inline double abs_pow(double x, double p) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return std::abs(x);
    if (p == 2.0) return x * x;
    return std::pow(std::abs(x), p);
}

} // namespace

EstimateVector power_variation(const ReturnSeries& returns, const std::vector<ScalarFn>& f) {
    std::size_t n = returns.n();
    if (n < 1) fail(ErrorCode::EmptySeries, "power_variation: empty return series");
    double s = std::sqrt(static_cast<double>(n));
    EstimateVector out;
    out.values.assign(f.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double x = s * returns.values[i];
        for (std::size_t k = 0; k < f.size(); ++k) out.values[k] += f[k](x);
    }
    for (auto& v : out.values) v /= static_cast<double>(n);
    out.n = n;
    return out;
}

EstimateVector power_variation(const ReturnSeries& returns, const PowerSpec& spec) {
    check_pure_power(spec);
    std::size_t n = returns.n();
    if (n < 1) fail(ErrorCode::EmptySeries, "power_variation: empty return series");
    double s = std::sqrt(static_cast<double>(n));
    EstimateVector out;
    out.values.assign(spec.m(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double x = s * returns.values[i];
        for (std::size_t k = 0; k < spec.m(); ++k) out.values[k] += abs_pow(x, spec.q[k]);
    }
    for (auto& v : out.values) v /= static_cast<double>(n);
    out.spec = spec;
    out.n = n;
    return out;
}

EstimateVector bipower_variation(const ReturnSeries& returns, const std::vector<ScalarFn>& f,
                                 const std::vector<ScalarFn>& g) {
    std::size_t n = returns.n();
    if (n < 2) fail(ErrorCode::SeriesTooShort, "bipower_variation: need n >= 2");
    if (f.size() != g.size() || f.empty())
        fail(ErrorCode::InvalidConfig, "bipower_variation: f and g must have equal length >= 1");
    double s = std::sqrt(static_cast<double>(n));
    EstimateVector out;
    out.values.assign(f.size(), 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double x = s * returns.values[i];
        double y = s * returns.values[i + 1];
        for (std::size_t k = 0; k < f.size(); ++k) out.values[k] += f[k](x) * g[k](y);
    }
    for (auto& v : out.values) v /= static_cast<double>(n);
    out.n = n;
    return out;
}

EstimateVector bipower_variation(const ReturnSeries& returns, const PowerSpec& spec) {
    std::size_t n = returns.n();
    if (n < 2) fail(ErrorCode::SeriesTooShort, "bipower_variation: need n >= 2");
    double s = std::sqrt(static_cast<double>(n));
    EstimateVector out;
    out.values.assign(spec.m(), 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double x = s * returns.values[i];
        double y = s * returns.values[i + 1];
        for (std::size_t k = 0; k < spec.m(); ++k)
            out.values[k] += abs_pow(x, spec.q[k]) * abs_pow(y, spec.r[k]);
    }
    for (auto& v : out.values) v /= static_cast<double>(n);
    out.spec = spec;
    out.n = n;
    return out;
}

EstimateVector truncated_bipower_variation(const ReturnSeries& returns, const PowerSpec& spec,
                                           const TruncationRule& rule) {
    std::size_t n = returns.n();
    if (n < 2) fail(ErrorCode::SeriesTooShort, "truncated_bipower_variation: need n >= 2");
    double u = rule.threshold(n);
    ReturnSeries kept;
    kept.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = returns.values[i];
        kept.values[i] = (std::abs(d) <= u) ? d : 0.0;
    }
    EstimateVector out = bipower_variation(kept, spec);
    out.kind = EstimatorKind::Truncated;
    out.truncation = rule;
    return out;
}

std::vector<double> bipower_limit(const PowerSpec& spec,
                                  const std::function<double(double)>& integrated_power) {
    std::vector<double> out(spec.m());
    for (std::size_t k = 0; k < spec.m(); ++k)
        out[k] = gaussian_abs_moment(spec.q[k]) * gaussian_abs_moment(spec.r[k]) *
                 integrated_power(spec.q[k] + spec.r[k]);
    return out;
}

} // namespace hfsub
