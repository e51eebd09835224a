#include "hfsub/preavg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "hfsub/moments.hpp"

namespace hfsub {

namespace {

inline double abs_pow(double x, double p) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return std::abs(x);
    if (p == 2.0) return x * x;
    return std::pow(std::abs(x), p);
}

// Adaptive Simpson on [a, b]; throws QuadratureFailure past max depth.
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || (b - a) < 1e-14)
        return left + right + delta / 15.0;
    if (depth <= 0)
        fail(ErrorCode::QuadratureFailure, "adaptive quadrature did not reach tolerance");
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 const std::vector<double>& split_at = {}) {
    if (b <= a) return 0.0;
    std::vector<double> pts{a, b};
    for (double s : split_at)
        if (s > a + 1e-15 && s < b - 1e-15) pts.push_back(s);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double lo = pts[i], hi = pts[i + 1];
        double fm = f(0.5 * (lo + hi));
        double flo = f(lo), fhi = f(hi);
        double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += simpson_rec(f, lo, hi, flo, fm, fhi, whole, tol, 48);
    }
    return total;
}

struct LimitConstants {
    double psi1, psi2, phi11, phi12, phi22;
};

// phi_1(s) = int_s^1 w'(u) w'(u-s) du,  phi_2(s) = int_s^1 w(u) w(u-s) du.
LimitConstants compute_limit_constants(const WeightProfile& p) {
    auto splits_for = [&p](double s) {
        std::vector<double> pts = p.kinks;
        for (double k : p.kinks) pts.push_back(k + s);
        return pts;
    };
    auto phi1 = [&](double s) {
        return integrate([&](double u) { return p.wprime(u) * p.wprime(u - s); }, s, 1.0, 1e-13,
                         splits_for(s));
    };
    auto phi2 = [&](double s) {
        return integrate([&](double u) { return p.w(u) * p.w(u - s); }, s, 1.0, 1e-13,
                         splits_for(s));
    };
    // The outer integrands change analytic form where s crosses a kink or the
    // image of one; splitting there keeps Simpson's rate.
    std::vector<double> outer = p.kinks;
    for (double k : p.kinks) outer.push_back(1.0 - k);
    LimitConstants c{};
    c.psi1 = phi1(0.0);
    c.psi2 = phi2(0.0);
    c.phi11 = integrate([&](double s) { double v = phi1(s); return v * v; }, 0.0, 1.0, 1e-11, outer);
    c.phi12 = integrate([&](double s) { return phi1(s) * phi2(s); }, 0.0, 1.0, 1e-11, outer);
    c.phi22 = integrate([&](double s) { double v = phi2(s); return v * v; }, 0.0, 1.0, 1e-11, outer);
    return c;
}

std::mutex g_cache_mutex;
std::map<const WeightProfile*, LimitConstants> g_cache;

const LimitConstants& cached_limit_constants(std::shared_ptr<const WeightProfile> profile) {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_cache.find(profile.get());
    if (it == g_cache.end())
        it = g_cache.emplace(profile.get(), compute_limit_constants(*profile)).first;
    return it->second;
}

std::shared_ptr<const WeightProfile> min_weight_profile() {
    static auto profile = std::make_shared<const WeightProfile>(WeightProfile{
        [](double x) { return (x <= 0.0 || x >= 1.0) ? 0.0 : std::min(x, 1.0 - x); },
        [](double x) { return (x <= 0.0 || x >= 1.0) ? 0.0 : (x < 0.5 ? 1.0 : -1.0); },
        {0.5},
        "min(x,1-x)"});
    return profile;
}

} // namespace

double weight_min_x(double x) {
    if (x < 0.0 || x > 1.0) fail(ErrorCode::DomainError, "weight_min_x: x outside [0,1]");
    return std::min(x, 1.0 - x);
}

WeightScheme::WeightScheme(std::shared_ptr<const WeightProfile> profile, std::size_t kn,
                           double theta)
    : profile_(std::move(profile)), kn_(kn), theta_(theta) {
    if (kn_ < 2) fail(ErrorCode::InvalidConfig, "WeightScheme: k_n must be >= 2");
    if (theta_ <= 0.0) fail(ErrorCode::InvalidConfig, "WeightScheme: theta must be > 0");
    wj_.resize(kn_ + 1);
    for (std::size_t j = 0; j <= kn_; ++j)
        wj_[j] = profile_->w(static_cast<double>(j) / static_cast<double>(kn_));
    // A valid weight vanishes at the endpoints and has positive L2 norm.
    double norm = 0.0;
    for (double w : wj_) norm += w * w;
    if (wj_.front() != 0.0 || wj_.back() != 0.0 || norm <= 0.0)
        fail(ErrorCode::InvalidConfig, "WeightScheme: weight must satisfy w(0)=w(1)=0, ||w|| > 0");
}

WeightScheme WeightScheme::min_weight(double theta, std::size_t n, WindowRounding rounding) {
    if (theta <= 0.0) fail(ErrorCode::InvalidConfig, "min_weight: theta must be > 0");
    double raw = theta * std::sqrt(static_cast<double>(n));
    double k = (rounding == WindowRounding::Nearest) ? std::round(raw) : std::floor(raw);
    std::size_t kn = static_cast<std::size_t>(std::max(2.0, k));
    return WeightScheme(min_weight_profile(), kn, theta);
}

WeightScheme WeightScheme::min_weight_window(std::size_t kn, double theta) {
    return WeightScheme(min_weight_profile(), kn, theta);
}

WeightScheme WeightScheme::custom(std::shared_ptr<const WeightProfile> profile, std::size_t kn,
                                  double theta) {
    return WeightScheme(std::move(profile), kn, theta);
}

double WeightScheme::theta_effective(std::size_t n) const {
    return static_cast<double>(kn_) / std::sqrt(static_cast<double>(n));
}

WeightConstants weight_constants(const WeightScheme& scheme) {
    const LimitConstants& lc = cached_limit_constants(scheme.profile_ptr());
    WeightConstants c;
    c.psi1 = lc.psi1;
    c.psi2 = lc.psi2;
    c.phi11 = lc.phi11;
    c.phi12 = lc.phi12;
    c.phi22 = lc.phi22;
    const auto& w = scheme.weights();
    std::size_t kn = scheme.kn();
    double s1 = 0.0;
    for (std::size_t j = 0; j <= kn; ++j) {
        double next = (j + 1 <= kn) ? w[j + 1] : 0.0;
        double d = next - w[j];
        s1 += d * d;
    }
    c.psi1_n = static_cast<double>(kn) * s1;
    double s2 = 0.0;
    for (std::size_t j = 1; j <= kn; ++j) s2 += w[j] * w[j];
    c.psi2_n = s2 / static_cast<double>(kn);
    return c;
}

PreAveragedSeries preaverage(const TickSeries& prices, const WeightScheme& scheme) {
    std::size_t n = prices.size() - 1;
    std::size_t kn = scheme.kn();
    if (prices.size() < 2 || kn > n)
        fail(ErrorCode::WindowTooLarge, "preaverage: need n >= k_n");
    const auto& w = scheme.weights();
    PreAveragedSeries out;
    out.kn = kn;
    out.theta = scheme.theta();
    out.values.assign(n - kn + 2, 0.0);
    const double* y = prices.values.data();
    for (std::size_t i = 0; i + kn <= n + 1; ++i) {
        double acc = 0.0;
        for (std::size_t j = 1; j < kn; ++j) acc += w[j] * (y[i + j] - y[i + j - 1]);
        out.values[i] = acc;
    }
    return out;
}

PreAveragedSeries preaverage_levels(const TickSeries& prices, const WeightScheme& scheme) {
    std::size_t n = prices.size() - 1;
    std::size_t kn = scheme.kn();
    if (prices.size() < 2 || kn > n)
        fail(ErrorCode::WindowTooLarge, "preaverage_levels: need n >= k_n");
    const auto& w = scheme.weights();
    PreAveragedSeries out;
    out.kn = kn;
    out.theta = scheme.theta();
    out.values.assign(n - kn + 2, 0.0);
    const double* y = prices.values.data();
    for (std::size_t i = 0; i + kn <= n + 1; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < kn; ++j) acc -= (w[j + 1] - w[j]) * y[i + j];
        out.values[i] = acc;
    }
    return out;
}

EstimateVector preavg_bipower(const TickSeries& prices, const PowerSpec& spec,
                              const WeightScheme& scheme) {
    std::size_t n = prices.size() - 1;
    std::size_t kn = scheme.kn();
    if (prices.size() < 2 || 2 * kn > n)
        fail(ErrorCode::WindowTooLarge, "preavg_bipower: need n >= 2 k_n");
    PreAveragedSeries bar = preaverage(prices, scheme);
    double scale = std::pow(static_cast<double>(n), 0.25);
    std::size_t count = n - 2 * kn + 2;
    EstimateVector out;
    out.values.assign(spec.m(), 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        double a = scale * bar.values[i];
        double b = scale * bar.values[i + kn];
        for (std::size_t k = 0; k < spec.m(); ++k)
            out.values[k] += abs_pow(a, spec.q[k]) * abs_pow(b, spec.r[k]);
    }
    for (auto& v : out.values) v /= static_cast<double>(count);
    out.spec = spec;
    out.n = n;
    out.kind = EstimatorKind::Preaveraged;
    out.theta = scheme.theta();
    out.window = kn;
    return out;
}

std::vector<double> preavg_bipower_limit(const PowerSpec& spec, const WeightScheme& scheme,
                                         std::size_t n, const std::vector<double>& sigma2_path,
                                         const std::vector<double>& noise_var_path) {
    if (sigma2_path.size() < n || noise_var_path.size() < n)
        fail(ErrorCode::LengthMismatch, "preavg_bipower_limit: paths shorter than n");
    WeightConstants c = weight_constants(scheme);
    double te = scheme.theta_effective(n);
    std::vector<double> out(spec.m(), 0.0);
    for (std::size_t k = 0; k < spec.m(); ++k) {
        double power = 0.5 * (spec.q[k] + spec.r[k]);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double base = te * c.psi2_n * sigma2_path[i] + c.psi1_n * noise_var_path[i] / te;
            acc += std::pow(base, power);
        }
        out[k] = gaussian_abs_moment(spec.q[k]) * gaussian_abs_moment(spec.r[k]) * acc /
                 static_cast<double>(n);
    }
    return out;
}

NoiseVariance noise_variance_hat(const ReturnSeries& returns) {
    std::size_t n = returns.n();
    if (n < 2) fail(ErrorCode::SeriesTooShort, "noise_variance_hat: need n >= 2");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) acc += returns.values[i] * returns.values[i + 1];
    NoiseVariance out;
    out.value = -acc / static_cast<double>(n - 1);
    out.negative = out.value < 0.0;
    return out;
}

BiasCorrected iv_hat(const TickSeries& prices, const WeightScheme& scheme, double omega2) {
    BiasCorrected out;
    if (omega2 < 0.0) {
        omega2 = 0.0;
        out.omega2_clamped = true;
    }
    WeightConstants c = weight_constants(scheme);
    PowerSpec spec({2.0}, {0.0});
    double v20 = preavg_bipower(prices, spec, scheme).values[0];
    double denom = scheme.theta() * c.psi2_n;
    out.value = v20 / denom - c.psi1_n * omega2 / denom;
    return out;
}

BiasCorrected iq_hat(const TickSeries& prices, const WeightScheme& scheme, double omega2,
                     double iv) {
    BiasCorrected out;
    if (omega2 < 0.0) {
        omega2 = 0.0;
        out.omega2_clamped = true;
    }
    WeightConstants c = weight_constants(scheme);
    PowerSpec spec({4.0}, {0.0});
    double v40 = preavg_bipower(prices, spec, scheme).values[0];
    double th = scheme.theta();
    double d1 = th * c.psi2_n;
    double mu4 = gaussian_abs_moment(4.0);
    out.value = v40 / (mu4 * d1 * d1) -
                2.0 * c.psi2_n * c.psi1_n * omega2 * iv / (d1 * d1) -
                (c.psi1_n * omega2) * (c.psi1_n * omega2) / ((th * th * c.psi2_n) * (th * th * c.psi2_n));
    return out;
}

double sigma_star_20_closed_form(double theta, const WeightConstants& constants,
                                 double int_sigma4, double int_sigma2, double omega2) {
    return 4.0 * (theta * theta * theta * constants.phi22 * int_sigma4 +
                  2.0 * theta * constants.phi12 * int_sigma2 * omega2 +
                  constants.phi11 * omega2 * omega2 / theta);
}

} // namespace hfsub
