#include "hfsub/altvar.hpp"

#include <cmath>

#include "hfsub/moments.hpp"

namespace hfsub {

namespace {

inline double abs_pow(double x, double p) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return std::abs(x);
    if (p == 2.0) return x * x;
    return std::pow(std::abs(x), p);
}

CovEstimate sigma_tilde_impl(const ReturnSeries& returns, const std::vector<ScalarFn>& f,
                             const std::vector<ScalarFn>& g) {
    std::size_t n = returns.n();
    if (n < 6) fail(ErrorCode::SeriesTooShort, "sigma_tilde: need n >= 6");
    std::size_t m = f.size();
    double s = std::sqrt(static_cast<double>(n));

    // gamma[k][i] = f_k(x_i) g_k(x_{i+1}), i = 0..n-2
    std::vector<std::vector<double>> gam(m, std::vector<double>(n - 1));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double x = s * returns.values[i];
        double y = s * returns.values[i + 1];
        for (std::size_t k = 0; k < m; ++k) gam[k][i] = f[k](x) * g[k](y);
    }

    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t l = 1; l + 3 < n; ++l)
                acc += gam[i][l] * (gam[j][l - 1] + gam[j][l] + gam[j][l + 1] - 3.0 * gam[j][l + 2]);
            raw(i, j) = acc / static_cast<double>(n);
        }
    return make_cov_estimate(raw, "sigma_tilde", 1.0);
}

} // namespace

CovEstimate sigma_tilde(const ReturnSeries& returns, const PowerSpec& spec) {
    std::vector<ScalarFn> f, g;
    for (std::size_t k = 0; k < spec.m(); ++k) {
        double qk = spec.q[k], rk = spec.r[k];
        f.push_back([qk](double x) { return abs_pow(x, qk); });
        g.push_back([rk](double x) { return abs_pow(x, rk); });
    }
    return sigma_tilde_impl(returns, f, g);
}

CovEstimate sigma_tilde(const ReturnSeries& returns, const std::vector<ScalarFn>& f,
                        const std::vector<ScalarFn>& g) {
    if (f.size() != g.size() || f.empty())
        fail(ErrorCode::InvalidConfig, "sigma_tilde: f and g must have equal length >= 1");
    return sigma_tilde_impl(returns, f, g);
}

CovEstimate sigma_via_rescaled_bipower(const ReturnSeries& returns, const PowerSpec& spec) {
    std::size_t m = spec.m();
    // one combined statistic per (i,j) pair
    std::vector<double> q2, r2;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            q2.push_back(spec.q[i] + spec.q[j]);
            r2.push_back(spec.r[i] + spec.r[j]);
        }
    EstimateVector v = bipower_variation(returns, PowerSpec(q2, r2));
    auto mu = [](double p) { return gaussian_abs_moment(p); };
    Eigen::MatrixXd raw(m, m);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j, ++idx) {
            double qi = spec.q[i], qj = spec.q[j], ri = spec.r[i], rj = spec.r[j];
            double denom = mu(qi + qj) * mu(ri + rj);
            double c = (denom + mu(qi) * mu(rj) * mu(qj + ri) + mu(qj) * mu(ri) * mu(qi + rj) -
                        3.0 * mu(qi) * mu(qj) * mu(ri) * mu(rj)) /
                       denom;
            raw(i, j) = raw(j, i) = c * v.values[idx];
        }
    return make_cov_estimate(raw, "rescaled_bipower", 1.0);
}

CovEstimate sigma_tilde_star_pv(const TickSeries& prices, const PowerSpec& spec,
                                const WeightScheme& scheme) {
    std::size_t n = prices.size() - 1;
    std::size_t kn = scheme.kn();
    if (prices.size() < 2 || 4 * kn > n)
        fail(ErrorCode::WindowTooLarge, "sigma_tilde_star_pv: need n >= 4 k_n");
    std::size_t m = spec.m();
    PreAveragedSeries bar = preaverage(prices, scheme);
    double scale = std::pow(static_cast<double>(n), 0.25);
    double sqn = std::sqrt(static_cast<double>(n));

    // Ytil[k][t] = n^{-1/2} |n^{1/4} dYbar_t|^{q_k} |n^{1/4} dYbar_{t+kn}|^{r_k}
    std::size_t tcount = n - 2 * kn + 2;
    std::vector<std::vector<double>> ytil(m, std::vector<double>(tcount));
    for (std::size_t t = 0; t < tcount; ++t) {
        double a = scale * bar.values[t];
        double b = scale * bar.values[t + kn];
        for (std::size_t k = 0; k < m; ++k)
            ytil[k][t] = abs_pow(a, spec.q[k]) * abs_pow(b, spec.r[k]) / sqn;
    }
    // prefix sums for the inner lag sum
    std::vector<std::vector<double>> pre(m, std::vector<double>(tcount + 1, 0.0));
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t t = 0; t < tcount; ++t) pre[k][t + 1] = pre[k][t] + ytil[k][t];

    std::size_t mcount = n - 4 * kn + 2;
    double twokn = static_cast<double>(2 * kn);
    Eigen::MatrixXd raw(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < mcount; ++t) {
                double aj = pre[j][t + 2 * kn] - pre[j][t] - twokn * ytil[j][t + 2 * kn];
                double ai = pre[i][t + 2 * kn] - pre[i][t] - twokn * ytil[i][t + 2 * kn];
                acc += ytil[i][t] * aj + ytil[j][t] * ai;
            }
            raw(i, j) = raw(j, i) = acc / sqn;
        }
    return make_cov_estimate(raw, "pv_elementwise", 1.0);
}

Eigen::MatrixXd two_scale_quadratic_covariation(const std::vector<Eigen::VectorXd>& locals,
                                                std::size_t K1, std::size_t K2) {
    if (locals.size() <= K2)
        fail(ErrorCode::InsufficientData, "two_scale_quadratic_covariation: need more than K2 locals");
    std::size_t m = static_cast<std::size_t>(locals.front().size());
    auto qc = [&](std::size_t K) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, m);
        std::size_t cnt = locals.size() - K;
        for (std::size_t i = 0; i < cnt; ++i) {
            Eigen::VectorXd d = locals[i + K] - locals[i];
            acc.noalias() += d * d.transpose();
        }
        return Eigen::MatrixXd(acc / (2.0 * static_cast<double>(cnt)));
    };
    double k1 = static_cast<double>(K1 * K1), k2 = static_cast<double>(K2 * K2);
    return (k2 * qc(K1) - k1 * qc(K2)) / (k2 - k1);
}

CovEstimate observed_avar(const TickSeries& prices, const PowerSpec& spec,
                          const WeightScheme& scheme, const ObservedAvarConfig& cfg) {
    std::size_t n = prices.size() - 1;
    std::size_t kn = scheme.kn();
    std::size_t M = cfg.forward_half_intervals ? 2 * cfg.B : cfg.B;
    std::size_t nh = n / M;
    if (nh < 2 * kn)
        fail(ErrorCode::InsufficientData, "observed_avar: blocks too short for the window");
    if (M <= cfg.K2)
        fail(ErrorCode::InsufficientData, "observed_avar: need more blocks than K2");
    std::size_t m = spec.m();
    double scale = std::pow(static_cast<double>(n), 0.25);
    std::size_t mp = nh - 2 * kn + 2;

    std::vector<Eigen::VectorXd> locals;
    locals.reserve(M);
    TickSeries seg;
    for (std::size_t b = 0; b < M; ++b) {
        auto first = prices.values.begin() + static_cast<std::ptrdiff_t>(b * nh);
        seg.values.assign(first, first + static_cast<std::ptrdiff_t>(nh + 1));
        PreAveragedSeries bar = preaverage(seg, scheme);
        Eigen::VectorXd stat = Eigen::VectorXd::Zero(m);
        for (std::size_t t = 0; t < mp; ++t) {
            double a = scale * bar.values[t];
            double c = scale * bar.values[t + kn];
            for (std::size_t k = 0; k < m; ++k)
                stat(k) += abs_pow(a, spec.q[k]) * abs_pow(c, spec.r[k]);
        }
        locals.push_back(stat / static_cast<double>(mp));
    }
    Eigen::MatrixXd qc = two_scale_quadratic_covariation(locals, cfg.K1, cfg.K2);
    Eigen::MatrixXd raw = qc * (static_cast<double>(mp) / std::sqrt(static_cast<double>(n)));
    double window = static_cast<double>(M * nh) / static_cast<double>(n);
    return make_cov_estimate(raw, "observed_avar", window);
}

Eigen::MatrixXd closed_form_sigma(const PowerSpec& spec,
                                  const std::function<double(double)>& integrated_power) {
    std::size_t m = spec.m();
    auto mu = [](double p) { return gaussian_abs_moment(p); };
    Eigen::MatrixXd out(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double qi = spec.q[i], qj = spec.q[j], ri = spec.r[i], rj = spec.r[j];
            double comb = mu(qi + qj) * mu(ri + rj) + mu(qi) * mu(rj) * mu(qj + ri) +
                          mu(qj) * mu(ri) * mu(qi + rj) - 3.0 * mu(qi) * mu(qj) * mu(ri) * mu(rj);
            out(i, j) = out(j, i) = comb * integrated_power(qi + qj + ri + rj);
        }
    return out;
}

} // namespace hfsub
