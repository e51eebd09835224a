#include <doctest.h>

#include <cmath>

#include "hfsub/moments.hpp"
#include "hfsub/preavg.hpp"
#include "hfsub/series.hpp"
#include "test_util.hpp"

using namespace hfsub;

namespace {

// Regression constants for w(x) = min(x, 1-x), fixed by exact integration
// before the build: psi1 = 1, psi2 = 1/12, Phi11 = 1/6, Phi12 = 1/96,
// Phi22 = 151/80640.
constexpr double kPhi11 = 1.0 / 6.0;
constexpr double kPhi12 = 1.0 / 96.0;
constexpr double kPhi22 = 151.0 / 80640.0;

} // namespace

TEST_CASE("min weight boundary and peak") {
    CHECK(weight_min_x(0.0) == 0.0);
    CHECK(weight_min_x(1.0) == 0.0);
    CHECK(weight_min_x(0.5) == 0.5);
    CHECK(weight_min_x(0.25) == 0.25);
    CHECK_THROWS_AS(weight_min_x(-0.1), Error);
    CHECK_THROWS_AS(weight_min_x(1.1), Error);
}

TEST_CASE("limit constants of the min weight") {
    WeightScheme scheme = WeightScheme::min_weight_window(152, 1.0);
    WeightConstants c = weight_constants(scheme);
    CHECK(c.psi1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c.psi2 == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
    CHECK(c.phi11 == doctest::Approx(kPhi11).epsilon(1e-9));
    CHECK(c.phi12 == doctest::Approx(kPhi12).epsilon(1e-9));
    CHECK(c.phi22 == doctest::Approx(kPhi22).epsilon(1e-9));
}

TEST_CASE("finite-n constants approach the limits") {
    WeightScheme s152 = WeightScheme::min_weight_window(152, 1.0);
    WeightConstants c = weight_constants(s152);
    CHECK(std::abs(c.psi2_n - 1.0 / 12.0) <= 0.01);
    CHECK(c.psi1_n == doctest::Approx(1.0).epsilon(1e-12));   // exact for even windows

    // halving the window does not bring psi closer to the limit
    WeightScheme s76 = WeightScheme::min_weight_window(76, 1.0);
    WeightConstants c2 = weight_constants(s76);
    CHECK(std::abs(c.psi2_n - c.psi2) <= std::abs(c2.psi2_n - c2.psi2) + 1e-12);
}

TEST_CASE("window construction from theta and n") {
    WeightScheme nearest = WeightScheme::min_weight(1.0, 23400);
    CHECK(nearest.kn() == 153);
    WeightScheme floored = WeightScheme::min_weight(1.0, 23400, WindowRounding::Floor);
    CHECK(floored.kn() == 152);
    WeightScheme tiny = WeightScheme::min_weight(0.01, 100);
    CHECK(tiny.kn() == 2);   // clamped
}

TEST_CASE("pre-averaging a constant price gives zeros") {
    TickSeries p;
    p.values.assign(300, 4.2);
    WeightScheme scheme = WeightScheme::min_weight_window(16, 1.0);
    PreAveragedSeries bar = preaverage(p, scheme);
    CHECK(bar.values.size() == 300 - 1 - 16 + 2);
    for (double v : bar.values) CHECK(v == 0.0);
}

TEST_CASE("return form and level form of pre-averaging agree") {
    Rng rng(21, 0);
    TickSeries p = testutil::brownian_path(512, 0.3, rng);
    WeightScheme scheme = WeightScheme::min_weight_window(23, 1.0);
    PreAveragedSeries a = preaverage(p, scheme);
    PreAveragedSeries b = preaverage_levels(p, scheme);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
}

TEST_CASE("pure-noise variance of scaled pre-averaged returns is psi1 omega^2 / theta") {
    std::size_t n = 10000;
    double omega2 = 1e-4;
    WeightScheme scheme = WeightScheme::min_weight(1.0, n);
    WeightConstants c = weight_constants(scheme);
    std::vector<double> sq;
    Rng rng(22, 0);
    for (std::size_t s = 0; s < 40; ++s) {
        TickSeries pure_noise;
        pure_noise.values.resize(n + 1);
        double w = std::sqrt(omega2);
        for (auto& v : pure_noise.values) v = w * rng.normal();
        PreAveragedSeries bar = preaverage(pure_noise, scheme);
        double scale = std::pow(static_cast<double>(n), 0.25);
        for (double v : bar.values) sq.push_back(scale * v * scale * v);
    }
    double target = c.psi1 * omega2 / scheme.theta_effective(n);
    CHECK(testutil::mean(sq) == doctest::Approx(target).epsilon(0.05));
}

TEST_CASE("pre-averaged bipower of a constant price is zero; (0,0) is one") {
    TickSeries p;
    p.values.assign(400, -1.5);
    WeightScheme scheme = WeightScheme::min_weight_window(10, 1.0);
    EstimateVector v = preavg_bipower(p, PowerSpec({2.0, 1.0}, {0.0, 1.0}), scheme);
    CHECK(v.values[0] == 0.0);
    CHECK(v.values[1] == 0.0);
    EstimateVector ones = preavg_bipower(p, PowerSpec({0.0}, {0.0}), scheme);
    CHECK(ones.values[0] == 1.0);
}

TEST_CASE("location invariance: shifting prices changes nothing") {
    Rng rng(23, 0);
    TickSeries p = testutil::brownian_path(800, 0.5, rng);
    TickSeries shifted = p;
    for (auto& v : shifted.values) v += 7.25;
    WeightScheme scheme = WeightScheme::min_weight_window(20, 1.0);
    PowerSpec spec({2.0, 1.0}, {0.0, 1.0});
    EstimateVector a = preavg_bipower(p, spec, scheme);
    EstimateVector b = preavg_bipower(shifted, spec, scheme);
    for (std::size_t k = 0; k < spec.m(); ++k)
        CHECK(a.values[k] == doctest::Approx(b.values[k]).epsilon(1e-12));

    double iva = iv_hat(p, scheme, 1e-6).value;
    double ivb = iv_hat(shifted, scheme, 1e-6).value;
    CHECK(iva == doctest::Approx(ivb).epsilon(1e-12));
}

TEST_CASE("window preconditions") {
    TickSeries p;
    p.values.assign(30, 0.0);
    CHECK_THROWS_AS(preaverage(p, WeightScheme::min_weight_window(40, 1.0)), Error);
    CHECK_THROWS_AS(preavg_bipower(p, PowerSpec({2.0}, {0.0}),
                                   WeightScheme::min_weight_window(20, 1.0)),
                    Error);
    CHECK_THROWS_AS(WeightScheme::min_weight_window(1, 1.0), Error);   // k_n >= 2
}

TEST_CASE("noise variance estimator on a two-return series") {
    ReturnSeries r{{0.3, -0.3}};
    NoiseVariance nv = noise_variance_hat(r);
    CHECK(nv.value == doctest::Approx(0.09).epsilon(1e-14));
    CHECK_FALSE(nv.negative);
}

TEST_CASE("noise variance estimator is consistent under iid noise") {
    std::size_t n = 23400;
    double omega2 = 1e-4;
    std::vector<double> est;
    for (std::size_t s = 0; s < 100; ++s) {
        Rng rng(400 + s, 3);
        TickSeries p = testutil::brownian_path(n, 0.2, rng);
        double w = std::sqrt(omega2);
        for (auto& v : p.values) v += w * rng.normal();
        est.push_back(noise_variance_hat(log_returns(p)).value);
    }
    CHECK(testutil::mean(est) == doctest::Approx(omega2).epsilon(0.02));
}

TEST_CASE("noise variance estimator is near zero without noise") {
    std::size_t n = 23400;
    std::vector<double> est;
    for (std::size_t s = 0; s < 100; ++s) {
        Rng rng(800 + s, 3);
        TickSeries p = testutil::brownian_path(n, 0.2, rng);
        est.push_back(noise_variance_hat(log_returns(p)).value);
    }
    double se = testutil::sample_std(est) / 10.0;
    CHECK(std::abs(testutil::mean(est)) <= 3.0 * se);
}

TEST_CASE("iv_hat recovers sigma^2 without noise") {
    std::vector<double> est;
    for (std::size_t s = 0; s < 60; ++s) {
        Rng rng(1200 + s, 3);
        TickSeries p = testutil::brownian_path(23400, 0.2, rng);
        WeightScheme scheme = WeightScheme::min_weight(1.0, 23400);
        est.push_back(iv_hat(p, scheme, 0.0).value);
    }
    CHECK(testutil::mean(est) == doctest::Approx(0.04).epsilon(0.03));
}

TEST_CASE("iv_hat of a constant price is zero; annualisation shape") {
    TickSeries p;
    p.values.assign(2000, 1.0);
    WeightScheme scheme = WeightScheme::min_weight(1.0, 1999);
    BiasCorrected iv = iv_hat(p, scheme, 0.0);
    CHECK(iv.value == 0.0);
    // the reporting transform 100 sqrt(250 IV) maps a daily variance of
    // 1.6e-4 to about a 20 percent annualised volatility
    CHECK(100.0 * std::sqrt(250.0 * 1.6e-4) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("iv_hat clamps negative noise variance and flags it") {
    Rng rng(31, 0);
    TickSeries p = testutil::brownian_path(1000, 0.2, rng);
    WeightScheme scheme = WeightScheme::min_weight(1.0, 1000);
    BiasCorrected a = iv_hat(p, scheme, -1.0);
    BiasCorrected b = iv_hat(p, scheme, 0.0);
    CHECK(a.omega2_clamped);
    CHECK(a.value == b.value);
}

TEST_CASE("iv_hat is linear in the inputs with the printed coefficients") {
    Rng rng(32, 0);
    TickSeries p = testutil::brownian_path(4000, 0.3, rng);
    WeightScheme scheme = WeightScheme::min_weight(1.0, 4000);
    WeightConstants c = weight_constants(scheme);
    double base = iv_hat(p, scheme, 0.0).value;
    double with_noise = iv_hat(p, scheme, 1e-5).value;
    // slope in omega2 is -psi1_n / (theta psi2_n)
    double slope = (with_noise - base) / 1e-5;
    CHECK(slope == doctest::Approx(-c.psi1_n / (scheme.theta() * c.psi2_n)).epsilon(1e-9));
}

TEST_CASE("iq_hat recovers sigma^4 without noise and the ratio hits one") {
    std::vector<double> iq_est, ratio;
    for (std::size_t s = 0; s < 60; ++s) {
        Rng rng(1600 + s, 3);
        TickSeries p = testutil::brownian_path(23400, 0.2, rng);
        WeightScheme scheme = WeightScheme::min_weight(1.0, 23400);
        double iv = iv_hat(p, scheme, 0.0).value;
        double iq = iq_hat(p, scheme, 0.0, iv).value;
        iq_est.push_back(iq);
        ratio.push_back(std::sqrt(iq) / iv);
    }
    CHECK(testutil::mean(iq_est) == doctest::Approx(0.0016).epsilon(0.05));
    CHECK(testutil::mean(ratio) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("iq_hat of a constant price is zero") {
    TickSeries p;
    p.values.assign(1000, 2.0);
    WeightScheme scheme = WeightScheme::min_weight(1.0, 999);
    CHECK(iq_hat(p, scheme, 0.0, 0.0).value == 0.0);
}

TEST_CASE("closed-form variance of pre-averaged realized variance") {
    WeightScheme scheme = WeightScheme::min_weight_window(100, 1.0);
    WeightConstants c = weight_constants(scheme);
    CHECK(sigma_star_20_closed_form(1.0, c, 1.0, 1.0, 0.0) ==
          doctest::Approx(4.0 * kPhi22).epsilon(1e-9));
    CHECK(sigma_star_20_closed_form(1.0, c, 0.0, 0.0, 1.0) ==
          doctest::Approx(4.0 * kPhi11).epsilon(1e-9));
    // paper-style magnitudes: theta = 1, sigma^2 = 0.04, small noise
    double v = sigma_star_20_closed_form(1.0, c, 0.0016, 0.04, 4e-7);
    CHECK(v == doctest::Approx(4.0 * (kPhi22 * 0.0016 + 2.0 * kPhi12 * 0.04 * 4e-7 +
                                      kPhi11 * 16e-14)).epsilon(1e-9));
}

TEST_CASE("psi-n convergence across window sizes") {
    WeightScheme small = WeightScheme::min_weight_window(50, 1.0);
    WeightScheme big = WeightScheme::min_weight_window(100, 1.0);
    WeightConstants cs = weight_constants(small);
    WeightConstants cb = weight_constants(big);
    CHECK(std::abs(cb.psi2_n - cb.psi2) <= std::abs(cs.psi2_n - cs.psi2) + 1e-12);
    CHECK(std::abs(cb.psi1_n - cb.psi1) <= std::abs(cs.psi1_n - cs.psi1) + 1e-12);
}

TEST_CASE("hetero MA(1) design: estimator mean matches the stated limit") {
    // Brownian volatility with gamma-scaled MA(1) noise; limit uses the
    // serial-dependence adjustment of the noise variance.
    std::size_t n = 23400;
    double sigma2 = 1.6e-4, gamma = 0.5, zeta = -0.4;
    WeightScheme scheme = WeightScheme::min_weight(1.0, n);
    WeightConstants c = weight_constants(scheme);
    double te = scheme.theta_effective(n);
    double rho2 = gamma * gamma * sigma2 / n * (1.0 + 2.0 * zeta / (1.0 + zeta * zeta));
    double target = te * c.psi2_n * sigma2 + c.psi1_n * rho2 / te;

    std::vector<double> est;
    double sd_innov = std::sqrt(1.0 / (1.0 + zeta * zeta));
    for (std::size_t s = 0; s < 150; ++s) {
        Rng rng(2000 + s, 4);
        TickSeries p = testutil::brownian_path(n, std::sqrt(sigma2), rng);
        double prev = sd_innov * rng.normal();
        for (auto& v : p.values) {
            double cur = sd_innov * rng.normal();
            v += gamma * std::sqrt(sigma2 / n) * (cur + zeta * prev);
            prev = cur;
        }
        est.push_back(preavg_bipower(p, PowerSpec({2.0}, {0.0}), scheme).values[0]);
    }
    CHECK(testutil::mean(est) == doctest::Approx(target).epsilon(0.01));
}
