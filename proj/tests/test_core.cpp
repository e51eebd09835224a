#include <doctest.h>

#include <cmath>

#include "hfsub/moments.hpp"
#include "hfsub/series.hpp"
#include "test_util.hpp"

using namespace hfsub;

TEST_CASE("log_returns differences prices") {
    TickSeries p{{0.0, 0.01, 0.03}};
    ReturnSeries r = log_returns(p);
    REQUIRE(r.n() == 2);
    CHECK(r.values[0] == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(r.values[1] == doctest::Approx(0.02).epsilon(1e-15));
}

TEST_CASE("log_returns of a constant series is zero") {
    TickSeries p{{1.7, 1.7, 1.7}};
    ReturnSeries r = log_returns(p);
    CHECK(r.values[0] == 0.0);
    CHECK(r.values[1] == 0.0);
}

TEST_CASE("log_returns matches the one-second design size") {
    Rng rng(7, 0);
    TickSeries p = testutil::brownian_path(23400, 0.2, rng);
    REQUIRE(p.size() == 23401);
    CHECK(log_returns(p).n() == 23400);
}

TEST_CASE("log_returns rejects short series") {
    TickSeries p{{1.0}};
    CHECK_THROWS_AS(log_returns(p), Error);
    try {
        log_returns(p);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SeriesTooShort);
    }
}

TEST_CASE("cumulative sum of returns reconstructs prices exactly") {
    Rng rng(11, 0);
    TickSeries p = testutil::brownian_path(500, 1.0, rng);
    ReturnSeries r = log_returns(p);
    double level = p.values[0];
    for (std::size_t i = 0; i < r.n(); ++i) {
        level += r.values[i];
        CHECK(level == doctest::Approx(p.values[i + 1]).epsilon(1e-15));
    }
}

TEST_CASE("scale_returns multiplies by sqrt(n)") {
    ReturnSeries r{{0.5, 0.5, 0.5, 0.5}};
    ReturnSeries s = scale_returns(r, 4);
    for (double v : s.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

    ReturnSeries z{{0.0, 0.0}};
    ReturnSeries sz = scale_returns(z, 2);
    CHECK(sz.values[0] == 0.0);
    CHECK(sz.values[1] == 0.0);

    CHECK_THROWS_AS(scale_returns(r, 3), Error);
}

TEST_CASE("scale_returns equals direct multiplication on a long vector") {
    Rng rng(5, 0);
    ReturnSeries r = testutil::random_returns(23400, rng);
    ReturnSeries s = scale_returns(r, 23400);
    double f = std::sqrt(23400.0);
    for (std::size_t i = 0; i < r.n(); i += 997) CHECK(s.values[i] == f * r.values[i]);
}

TEST_CASE("gaussian absolute moments at integer orders") {
    CHECK(gaussian_abs_moment(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gaussian_abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gaussian_abs_moment(4.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(gaussian_abs_moment(1.0) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-14));
}

TEST_CASE("gaussian absolute moment matches quadrature") {
    // independent oracle: integral of |z|^q phi(z) over a wide interval
    auto oracle = [](double q) {
        return testutil::simpson(
            [q](double z) {
                return std::pow(std::abs(z), q) * std::exp(-0.5 * z * z) /
                       std::sqrt(2.0 * M_PI);
            },
            -12.0, 12.0, 1 << 16);
    };
    CHECK(gaussian_abs_moment(1.0) == doctest::Approx(oracle(1.0)).epsilon(1e-10));
    CHECK(gaussian_abs_moment(3.0) == doctest::Approx(oracle(3.0)).epsilon(1e-10));
    CHECK(gaussian_abs_moment(6.0) == doctest::Approx(15.0).epsilon(1e-10));
    CHECK(oracle(6.0) == doctest::Approx(15.0).epsilon(1e-10));
}

TEST_CASE("gaussian absolute moment is monotone for q >= 1") {
    double prev = gaussian_abs_moment(1.0);
    for (double q = 1.1; q <= 8.0; q += 0.1) {
        double cur = gaussian_abs_moment(q);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("gaussian absolute moment rejects negative order") {
    CHECK_THROWS_AS(gaussian_abs_moment(-0.5), Error);
}

TEST_CASE("operations are deterministic on identical input") {
    Rng a(3, 9);
    Rng b(3, 9);
    TickSeries pa = testutil::brownian_path(256, 0.3, a);
    TickSeries pb = testutil::brownian_path(256, 0.3, b);
    ReturnSeries ra = log_returns(pa);
    ReturnSeries rb = log_returns(pb);
    for (std::size_t i = 0; i < ra.n(); ++i) CHECK(ra.values[i] == rb.values[i]);
}
