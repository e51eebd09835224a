#include <doctest.h>

#include <cmath>

#include "hfsub/altvar.hpp"
#include "hfsub/inference.hpp"
#include "hfsub/moments.hpp"
#include "hfsub/simulate.hpp"
#include "hfsub/subsample.hpp"
#include "test_util.hpp"

using namespace hfsub;

namespace {

CovEstimate identity_cov(std::size_t m) {
    return make_cov_estimate(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                       static_cast<Eigen::Index>(m)),
                             "test");
}

} // namespace

TEST_CASE("normal quantiles") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.95996398454).epsilon(1e-9));
    CHECK(normal_quantile(0.95) == doctest::Approx(1.64485362695).epsilon(1e-9));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normal_cdf(normal_quantile(0.31)) == doctest::Approx(0.31).epsilon(1e-12));
    CHECK_THROWS_AS(normal_quantile(0.0), Error);
}

TEST_CASE("studentize basics") {
    EstimateVector est;
    est.values = {1.0, 2.0};
    est.n = 10000;
    CovEstimate cov = identity_cov(2);
    std::vector<double> t = studentize(est, {1.0, 2.0}, cov, 10000, ConvergenceRate::SqrtN);
    CHECK(t[0] == 0.0);
    CHECK(t[1] == 0.0);

    t = studentize(est, {0.0, 0.0}, cov, 10000, ConvergenceRate::FourthRootN);
    CHECK(t[0] == doctest::Approx(std::pow(10000.0, 0.25)).epsilon(1e-12));

    CovEstimate zero = make_cov_estimate(Eigen::MatrixXd::Zero(2, 2), "test");
    CHECK_THROWS_AS(studentize(est, {0.0, 0.0}, zero, 10000, ConvergenceRate::SqrtN), Error);
    try {
        studentize(est, {0.0, 0.0}, zero, 10000, ConvergenceRate::SqrtN);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPositiveVariance);
    }
}

TEST_CASE("jump test statistic is zero at the no-jump equality point") {
    // build a price path, then check the raw contrast identity directly
    Rng rng(71, 0);
    TickSeries p = testutil::brownian_path(10000, 0.01, rng);
    WeightScheme scheme = WeightScheme::min_weight(1.0, 10000);
    EstimateVector v = preavg_bipower(p, PowerSpec({2.0, 1.0}, {0.0, 1.0}), scheme);
    double mu1 = gaussian_abs_moment(1.0);
    double contrast = v.values[0] - v.values[1] / (mu1 * mu1);
    CovEstimate cov = identity_cov(2);
    TestResult tr = jump_test(p, scheme, cov, false);
    CHECK(tr.statistic == doctest::Approx(contrast).epsilon(1e-12));
    // statistic 0 exactly when the two components satisfy the null identity
    CHECK(jump_log_statistic(1.0, mu1 * mu1) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("jump test rejects a zero contrast variance") {
    Rng rng(72, 0);
    TickSeries p = testutil::brownian_path(8000, 0.01, rng);
    WeightScheme scheme = WeightScheme::min_weight(1.0, 8000);
    double mu1 = gaussian_abs_moment(1.0);
    // rank-one covariance aligned with the contrast direction: w' S w = 0
    Eigen::Vector2d u(1.0 / (mu1 * mu1), 1.0);   // orthogonal-ish construction
    Eigen::Vector2d w(1.0, -1.0 / (mu1 * mu1));
    Eigen::Vector2d v = u - (u.dot(w) / w.squaredNorm()) * w;
    CovEstimate cov = make_cov_estimate(v * v.transpose(), "test");
    CHECK_THROWS_AS(jump_test(p, scheme, cov, false), Error);
}

TEST_CASE("raw and log jump tests agree in sign near the null") {
    std::size_t agree = 0, total = 0;
    for (std::size_t s = 0; s < 1000; ++s) {
        Rng rng(3000 + s, 9);
        HestonConfig hc;
        hc.n = 2048;
        hc.seed = 0;
        HestonPath path = simulate_heston(hc, rng);
        NoiseConfig nc = NoiseConfig::hetero_ma1(0.5, -0.4);
        TickSeries prices = add_noise(path.log_prices, path.sigma2, nc, rng);
        WeightScheme scheme = WeightScheme::min_weight(1.0, hc.n);
        CovEstimate cov =
            subsample_cov_noisy(prices, PowerSpec({2.0, 1.0}, {0.0, 1.0}), scheme,
                                SubsampleConfig::corrected(6, 4));
        TestResult raw = jump_test(prices, scheme, cov, false);
        TestResult lg = jump_test(prices, scheme, cov, true);
        ++total;
        if ((raw.t > 0) == (lg.t > 0)) ++agree;
    }
    CHECK(total == 1000);
    CHECK(agree == total);
}

TEST_CASE("const-vol statistic is near zero for constant volatility") {
    std::vector<double> stats;
    for (std::size_t s = 0; s < 60; ++s) {
        Rng rng(3300 + s, 9);
        TickSeries p = testutil::brownian_path(23400, 0.2, rng);
        WeightScheme scheme = WeightScheme::min_weight(1.0, 23400);
        CovEstimate cov =
            subsample_cov_noisy(p, PowerSpec({2.0, 4.0}, {0.0, 0.0}), scheme,
                                SubsampleConfig::corrected(15, 10));
        stats.push_back(const_vol_test(p, scheme, cov).statistic);
    }
    double se = testutil::sample_std(stats) / std::sqrt(60.0);
    CHECK(std::abs(testutil::mean(stats)) < 3.0 * se + 0.01);
}

TEST_CASE("const-vol statistic is positive on average for moving volatility") {
    // a year-long window makes the square-root variance process travel far
    // from its mean, so sqrt(IQ)/IV sits clearly above one
    std::vector<double> stats;
    for (std::size_t s = 0; s < 40; ++s) {
        Rng rng(3600 + s, 9);
        HestonConfig hc;
        hc.n = 23400;
        hc.xi = 0.5;
        hc.interval_years = 1.0;
        HestonPath path = simulate_heston(hc, rng);
        WeightScheme scheme = WeightScheme::min_weight(1.0, hc.n);
        CovEstimate cov =
            subsample_cov_noisy(path.log_prices, PowerSpec({2.0, 4.0}, {0.0, 0.0}), scheme,
                                SubsampleConfig::corrected(15, 10));
        stats.push_back(const_vol_test(path.log_prices, scheme, cov).statistic);
    }
    CHECK(testutil::mean(stats) > 0.05);
}

TEST_CASE("delta-method gradients match finite differences") {
    WeightScheme scheme = WeightScheme::min_weight_window(50, 1.0);
    WeightConstants c = weight_constants(scheme);
    Rng rng(73, 0);
    for (int rep = 0; rep < 100; ++rep) {
        double v20 = 0.5 + rng.uniform();
        double v11 = 0.5 + rng.uniform();
        Eigen::Vector2d g = jump_log_gradient(v20, v11);
        double h = 1e-6;
        double fd0 = (jump_log_statistic(v20 + h, v11) - jump_log_statistic(v20 - h, v11)) / (2 * h);
        double fd1 = (jump_log_statistic(v20, v11 + h) - jump_log_statistic(v20, v11 - h)) / (2 * h);
        CHECK(g(0) == doctest::Approx(fd0).epsilon(1e-4));
        CHECK(g(1) == doctest::Approx(fd1).epsilon(1e-4));

        double y2 = 0.5 + rng.uniform();
        double y4 = 2.0 + 3.0 * rng.uniform();   // keep IQ positive
        double om = 1e-4 * rng.uniform();
        Eigen::Vector2d gc = const_vol_gradient(y2, y4, c, 1.0, om);
        double s_hi = const_vol_statistic(y2 + h, y4, c, 1.0, om);
        double s_lo = const_vol_statistic(y2 - h, y4, c, 1.0, om);
        CHECK(gc(0) == doctest::Approx((s_hi - s_lo) / (2 * h)).epsilon(1e-4));
        s_hi = const_vol_statistic(y2, y4 + h, c, 1.0, om);
        s_lo = const_vol_statistic(y2, y4 - h, c, 1.0, om);
        CHECK(gc(1) == doctest::Approx((s_hi - s_lo) / (2 * h)).epsilon(1e-4));
    }
}

TEST_CASE("matrix diagnostics") {
    MatrixDiagnostics ident = matrix_diagnostics(Eigen::MatrixXd::Identity(2, 2));
    CHECK(ident.min_eigenvalue == doctest::Approx(1.0));
    CHECK(ident.condition_number == doctest::Approx(1.0));
    CHECK(ident.psd);
    CHECK_FALSE(ident.ill_conditioned);

    Eigen::MatrixXd d(2, 2);
    d << 1.0, 0.0, 0.0, 0.04;
    MatrixDiagnostics dd = matrix_diagnostics(d);
    CHECK(dd.condition_number == doctest::Approx(25.0));
    CHECK(dd.ill_conditioned);   // 25 >= 20 for a 2x2

    // reported condition numbers classify like the empirical episode:
    // 452.36 is ill-conditioned, 15.16 is fine
    Eigen::MatrixXd big(2, 2);
    big << 452.36, 0.0, 0.0, 1.0;
    CHECK(matrix_diagnostics(big).ill_conditioned);
    Eigen::MatrixXd ok(2, 2);
    ok << 15.16, 0.0, 0.0, 1.0;
    CHECK_FALSE(matrix_diagnostics(ok).ill_conditioned);

    CHECK_THROWS_AS(matrix_diagnostics(Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST_CASE("condition number agrees with an independent SVD") {
    Rng rng(74, 0);
    for (int rep = 0; rep < 25; ++rep) {
        Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(
            3, 3, [&rng](Eigen::Index, Eigen::Index) { return rng.normal(); });
        Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
        MatrixDiagnostics diag = matrix_diagnostics(sym);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(sym);
        double cond = svd.singularValues()(0) / svd.singularValues()(2);
        CHECK(diag.condition_number == doctest::Approx(cond).epsilon(1e-8));
    }
}

TEST_CASE("confidence intervals") {
    auto [lo, hi] = confidence_interval(0.0, 1.0, 0.95, Sidedness::TwoSided);
    CHECK(lo == doctest::Approx(-1.95996).epsilon(1e-5));
    CHECK(hi == doctest::Approx(1.95996).epsilon(1e-5));

    auto [llo, lhi] = confidence_interval(0.0, 1.0, 0.95, Sidedness::LeftSided);
    CHECK(llo == doctest::Approx(-1.64485).epsilon(1e-5));
    CHECK(std::isinf(lhi));

    auto [wlo, whi] = confidence_interval(0.0, 2.0, 0.95, Sidedness::TwoSided);
    CHECK(whi == doctest::Approx(2.0 * hi).epsilon(1e-12));
    CHECK(wlo == doctest::Approx(2.0 * lo).epsilon(1e-12));

    CHECK_THROWS_AS(confidence_interval(0.0, 1.0, 1.5, Sidedness::TwoSided), Error);
    CHECK_THROWS_AS(confidence_interval(0.0, 0.0, 0.95, Sidedness::TwoSided), Error);
}
