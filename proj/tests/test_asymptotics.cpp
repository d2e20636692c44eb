#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sparre/asymptotics.hpp"
#include "sparre/sampling.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace sparre::asymptotics;

TEST_CASE("b_n branches") {
    SUBCASE("alpha in (0,1)") {
        const auto spec = AsymptoticsSpec::for_alpha(0.5, SlowlyVarying::constant(1.0));
        CHECK(b_n(spec, nullptr, 1e4) == doctest::Approx(100.0).epsilon(1e-12));
    }
    SUBCASE("alpha = 0 with ell = 1/log") {
        const auto spec = AsymptoticsSpec::for_alpha(
            0.0, SlowlyVarying::custom("1/log", [](double n) { return 1.0 / std::log(n); }));
        CHECK(b_n(spec, nullptr, std::exp(10.0)) == doctest::Approx(10.0).epsilon(1e-9));
    }
    SUBCASE("alpha = 1 with constant truncated mean") {
        const auto spec = AsymptoticsSpec::for_alpha(1.0, SlowlyVarying::constant(1.0));
        const std::vector<double> mu(2001, 4.0);
        CHECK(b_n(spec, &mu, 2000) == doctest::Approx(500.0).epsilon(1e-12));
        CHECK_THROWS_AS(b_n(spec, nullptr, 2000), std::invalid_argument);
        CHECK_THROWS_AS(b_n(spec, &mu, 5000), std::invalid_argument);
    }
    SUBCASE("regular variation: b_{2n}/b_n = 2^alpha for constant ell") {
        for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto spec = AsymptoticsSpec::for_alpha(alpha, SlowlyVarying::constant(2.5));
            for (double n : {100.0, 1000.0, 12345.0}) {
                CHECK(b_n(spec, nullptr, 2 * n) / b_n(spec, nullptr, n) ==
                      doctest::Approx(std::pow(2.0, alpha)).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("stable constants") {
    SUBCASE("boundary values are exact") {
        CHECK(c_alpha(0.0) == std::sqrt(std::numbers::pi));
        CHECK(c_alpha(1.0) == 1.0);
    }
    SUBCASE("closed form at alpha = 1/2") {
        // Gamma(1/2)^{1/2} Gamma(1/2) / Gamma(3/4)
        CHECK(c_alpha(0.5) == doctest::Approx(1.9256555648928348).epsilon(1e-12));
    }
    SUBCASE("continuity on the interior grid and toward alpha -> 0") {
        CHECK(std::abs(c_alpha(0.05) - std::sqrt(std::numbers::pi)) < 0.01);
        for (double a = 0.05; a <= 0.951; a += 0.05) {
            // Local continuity under refinement; the function blows up at
            // alpha -> 1, so absolute grid increments are not meaningful.
            const double c = c_alpha(a);
            CHECK(std::abs(c_alpha(a + 1e-6) - c) < 1e-4 * c);
            CHECK(std::abs(c_alpha(a - 1e-6) - c) < 1e-4 * c);
        }
    }
    SUBCASE("Monte-Carlo cross-check at alpha = 1/2 within 1%") {
        const sparre::sampling::RandomStream base(9001, 17);
        const double mc = std::sqrt(std::tgamma(0.5)) *
                          sparre::sampling::mc_fractional_moment(0.5, 0.25, 1000000, base);
        CHECK(std::abs(mc / c_alpha(0.5) - 1.0) < 0.01);
    }
    SUBCASE("c_prime range and value") {
        CHECK_THROWS_AS(c_prime_alpha(0.0), std::invalid_argument);
        CHECK_THROWS_AS(c_prime_alpha(1.0), std::invalid_argument);
        // alpha Gamma(1-alpha)^{-1/2} Gamma(3/2)/Gamma(1+alpha/2) at 1/2
        const double expected = 0.5 / std::sqrt(std::tgamma(0.5)) *
                                (std::tgamma(1.5) / std::tgamma(1.25));
        CHECK(c_prime_alpha(0.5) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("truncated means") {
    SUBCASE("degenerate tau = 2") {
        // tail = P(tau > k): 1, 1, 0, 0, ...
        const std::vector<double> tail = {1.0, 1.0, 0.0, 0.0, 0.0};
        CHECK(mu_truncated(tail, 1) == 0.0);
        CHECK(mu_truncated(tail, 2) == 2.0);
        CHECK(mu_truncated(tail, 4) == 2.0);
    }
    SUBCASE("geometric tau converges to the mean") {
        std::vector<double> tail(101);
        for (int k = 0; k <= 100; ++k) tail[static_cast<std::size_t>(k)] = std::pow(0.5, k);
        CHECK(mu_truncated(tail, 100) == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("range errors") {
        const std::vector<double> tail = {1.0, 0.5};
        CHECK_THROWS_AS(mu_truncated(tail, 2), std::invalid_argument);
    }
}

TEST_CASE("power-law fitting") {
    SUBCASE("exact exponent -1/4") {
        std::vector<std::array<double, 3>> pts;
        for (double n : {256.0, 512.0, 1024.0, 2048.0, 4096.0})
            pts.push_back({n, std::pow(n, -0.25), 0.0});
        const auto fit = fit_power_law(pts);
        CHECK(std::abs(fit.exponent - (-0.25)) < 1e-12);
        CHECK(fit.exponent_stderr < 1e-12);
        CHECK(std::abs(fit.intercept) < 1e-12);
    }
    SUBCASE("exact 3 n^{-3/4} and scale invariance of the exponent") {
        std::vector<std::array<double, 3>> pts, pts7;
        for (double n : {64.0, 128.0, 256.0, 512.0}) {
            pts.push_back({n, 3.0 * std::pow(n, -0.75), 0.0});
            pts7.push_back({n, 21.0 * std::pow(n, -0.75), 0.0});
        }
        const auto fit = fit_power_law(pts);
        CHECK(std::abs(fit.exponent - (-0.75)) < 1e-12);
        CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
        const auto fit7 = fit_power_law(pts7);
        CHECK(std::abs(fit7.exponent - fit.exponent) < 1e-12);
        CHECK(fit7.intercept == doctest::Approx(std::log(21.0)).epsilon(1e-12));
    }
    SUBCASE("weighted fit uses the half-widths") {
        std::vector<std::array<double, 3>> pts;
        for (double n : {256.0, 512.0, 1024.0, 2048.0})
            pts.push_back({n, std::pow(n, -0.5) * (1 + 0.01), 0.03 * std::pow(n, -0.5)});
        const auto fit = fit_power_law(pts);
        CHECK(std::abs(fit.exponent - (-0.5)) < 0.02);
        CHECK(fit.exponent_stderr < 0.05);
    }
    SUBCASE("rejections") {
        std::vector<std::array<double, 3>> few = {{10, 1, 0}, {20, 0.5, 0}, {40, 0.25, 0}};
        CHECK_THROWS_AS(fit_power_law(few), std::invalid_argument);
        std::vector<std::array<double, 3>> bad = {
            {10, 1, 0}, {20, 0.5, 0}, {40, 0.0, 0}, {80, 0.1, 0}};
        CHECK_THROWS_AS(fit_power_law(bad), std::invalid_argument);
    }
}

TEST_CASE("envelopes") {
    SUBCASE("persistence band scales like n^{-1/4} for alpha = 1/2") {
        const auto spec = AsymptoticsSpec::for_alpha(
            0.5, SlowlyVarying::constant(std::sqrt(2.0 / std::numbers::pi)));
        const auto band_n = envelope(spec, nullptr, 4096, EnvelopeKind::persistence);
        const auto band_2n = envelope(spec, nullptr, 8192, EnvelopeKind::persistence);
        CHECK(band_2n.upper / band_n.upper ==
              doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-9));
        CHECK(band_n.lower / band_n.upper == doctest::Approx(0.25).epsilon(1e-12));
        // [1/4, 1] c_alpha / sqrt(pi b_n)
        const double b = b_n(spec, nullptr, 4096);
        CHECK(band_n.upper ==
              doctest::Approx(c_alpha(0.5) / std::sqrt(std::numbers::pi * b)).epsilon(1e-12));
    }
    SUBCASE("positive-recurrent band degenerates to sqrt(E tau / (pi n))") {
        auto spec = AsymptoticsSpec::positive_recurrent();
        const double mean_return = 2.3;
        const std::vector<double> mu(10001, mean_return);
        const auto band = envelope(spec, &mu, 10000, EnvelopeKind::persistence, 0.35);
        const double expected = std::sqrt(mean_return / (std::numbers::pi * 10000.0));
        CHECK(band.upper == doctest::Approx(expected).epsilon(1e-12));
        CHECK(band.lower == doctest::Approx(0.35 * 0.65 * expected).epsilon(1e-12));
    }
    SUBCASE("bridge band at alpha = 0.8") {
        const auto spec = AsymptoticsSpec::for_alpha(0.8, SlowlyVarying::constant(1.0));
        const auto band = envelope(spec, nullptr, 10000, EnvelopeKind::bridge, 0.5);
        const double expected = c_prime_alpha(0.8) * std::pow(10000.0, 0.8 / 2 - 1.0) /
                                std::sqrt(std::numbers::pi);
        CHECK(band.upper == doctest::Approx(expected).epsilon(1e-12));
        CHECK(band.lower == doctest::Approx(0.5 * expected).epsilon(1e-12));
    }
    SUBCASE("bridge gate below alpha = 2/3") {
        const auto spec = AsymptoticsSpec::for_alpha(0.5, SlowlyVarying::constant(1.0));
        CHECK_THROWS_AS(envelope(spec, nullptr, 1024, EnvelopeKind::bridge), std::invalid_argument);
        CHECK_NOTHROW(envelope(spec, nullptr, 1024, EnvelopeKind::bridge, 0.5, 2, true));
        // The lattice factor enters the bridge center linearly.
        const auto b1 = envelope(spec, nullptr, 1024, EnvelopeKind::bridge, 0.5, 1, true);
        const auto b2 = envelope(spec, nullptr, 1024, EnvelopeKind::bridge, 0.5, 2, true);
        CHECK(b2.upper == doctest::Approx(2 * b1.upper).epsilon(1e-12));
    }
}
