#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sparre/chains.hpp"
#include "sparre/combinatorics.hpp"

#include <cmath>
#include <vector>

using namespace sparre;
using namespace sparre::chains;

namespace {

// Test-local walker mirroring the sampler's stepping rule, used to replay a
// path and inspect the full height profile.
std::vector<long> replay_path(const BirthDeathChain& chain, long n,
                              sampling::RandomStream& rng) {
    std::vector<long> xs(static_cast<std::size_t>(n) + 1, 0);
    for (long k = 1; k <= n; ++k) {
        const long x = xs[static_cast<std::size_t>(k - 1)];
        const double u = rng.next_double();
        long nx = x;
        if (x == 0) {
            if (u < chain.p0())
                nx = 1;
            else if (u < 2 * chain.p0())
                nx = -1;
        } else {
            const auto row = chain.at(std::abs(x));
            const long away = x > 0 ? 1 : -1;
            if (u < row.up)
                nx = x + away;
            else if (u < row.up + row.down)
                nx = x - away;
        }
        xs[static_cast<std::size_t>(k)] = nx;
    }
    return xs;
}

// Exact strict persistence of the f-integrated simple walk by enumerating
// all 2^n sign paths.
double integrated_srw_bruteforce(unsigned n, const OddFunctional& f) {
    std::uint64_t survivors = 0;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        long x = 0;
        double zeta = 0;
        bool ok = true;
        for (unsigned k = 0; k < n && ok; ++k) {
            x += (mask >> k) & 1 ? 1 : -1;
            zeta += f(x);
            ok = zeta > 0;
        }
        survivors += ok;
    }
    return static_cast<double>(survivors) / static_cast<double>(1ULL << n);
}

}  // namespace

TEST_CASE("Bessel-like kernel construction") {
    SUBCASE("delta = 0 is the simple walk") {
        const auto c = BirthDeathChain::simple_random_walk();
        CHECK(c.p0() == 0.5);
        CHECK_FALSE(c.aperiodic());
        for (long x : {1L, 2L, 50L, 100000L}) {
            CHECK(c.at(x).up == 0.5);
            CHECK(c.at(x).down == 0.5);
            CHECK(c.at(x).hold == 0.0);
        }
    }
    SUBCASE("delta = 2 clamps at x = 1 and evaluates exactly at x = 10") {
        const auto c = BirthDeathChain::bessel_like({2.0, EpsilonFn::zero(), 0.0}, 0.05);
        CHECK(c.at(1).up == 0.05);  // raw value 0 clamped to eta
        CHECK(c.clamp_count() >= 1);
        CHECK(c.at(10).up == doctest::Approx(0.45).epsilon(1e-15));
    }
    SUBCASE("laziness rescales jumps and keeps the embedded chain") {
        const auto plain = BirthDeathChain::bessel_like({1.0, EpsilonFn::zero(), 0.0}, 0.05);
        const auto lazy = BirthDeathChain::bessel_like({1.0, EpsilonFn::zero(), 0.4}, 0.05);
        CHECK(lazy.p0() == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(lazy.aperiodic());
        for (long x : {1L, 3L, 17L}) {
            CHECK(lazy.at(x).hold == doctest::Approx(0.4).epsilon(1e-15));
            CHECK(lazy.at(x).up == doctest::Approx(0.6 * plain.at(x).up).epsilon(1e-15));
            CHECK(lazy.at(x).up / lazy.at(x).down ==
                  doctest::Approx(plain.at(x).up / plain.at(x).down).epsilon(1e-12));
        }
    }
    SUBCASE("invalid parameters rejected") {
        CHECK_THROWS_AS(BirthDeathChain::bessel_like({0.0, EpsilonFn::zero(), 0.0}, 0.5),
                        std::invalid_argument);
        CHECK_THROWS_AS(BirthDeathChain::bessel_like({0.0, EpsilonFn::zero(), 1.0}, 0.05),
                        std::invalid_argument);
        CHECK_THROWS_AS(
            BirthDeathChain::bessel_like({0.0, EpsilonFn::table({std::nan("")}), 0.0}, 0.05),
            std::invalid_argument);
    }
    SUBCASE("epsilon decays") {
        const auto eps = EpsilonFn::power_decay(2.0, 0.5);
        CHECK(eps(4) == doctest::Approx(1.0));
        const auto c = BirthDeathChain::bessel_like({0.0, eps, 0.0}, 0.01, 100);
        CHECK(c.at(4).up == doctest::Approx(0.5 * (1.0 - 1.0 / 8.0)).epsilon(1e-14));
    }
}

TEST_CASE("odd functionals") {
    sampling::RandomStream rng(5, 5);
    const OddFunctional fs[] = {OddFunctional::identity(), OddFunctional::sign(),
                                OddFunctional::power(0.5), OddFunctional::power(2.0)};
    for (const auto& f : fs) {
        CHECK(f(0) == 0.0);
        for (int i = 0; i < 200; ++i) {
            const auto x = static_cast<long long>(rng.next_below(2000000)) - 1000000;
            CAPTURE(f.name());
            REQUIRE(f(-x) == -f(x));
            REQUIRE(x * f(x) >= 0);
        }
    }
    CHECK_THROWS_AS(OddFunctional::power(-1.0), std::invalid_argument);
}

TEST_CASE("path simulation") {
    const auto srw = BirthDeathChain::simple_random_walk();
    const auto f = OddFunctional::identity();

    SUBCASE("one step: strict persistence with probability 1/2") {
        sampling::RandomStream base(101, 1);
        int survived = 0;
        const int trials = 100000;
        for (int t = 0; t < trials; ++t) {
            auto rng = base.substream(static_cast<std::uint64_t>(t));
            survived += simulate_path(srw, f, 1, SimMode::strict, rng).strict_persisted;
        }
        CHECK(std::abs(survived / 1e5 - 0.5) < 3 * std::sqrt(0.25 / trials));
    }
    SUBCASE("empirical strict persistence matches the 2^n oracle at n = 12") {
        const double exact = integrated_srw_bruteforce(12, f);
        sampling::RandomStream base(102, 1);
        int survived = 0;
        const int trials = 200000;
        for (int t = 0; t < trials; ++t) {
            auto rng = base.substream(static_cast<std::uint64_t>(t));
            survived += simulate_path(srw, f, 12, SimMode::strict, rng).strict_persisted;
        }
        const double p = survived / static_cast<double>(trials);
        CHECK(std::abs(p - exact) < 3 * std::sqrt(exact * (1 - exact) / trials));
    }
    SUBCASE("fixed seed reproduces the summary") {
        sampling::RandomStream a(103, 2, 7), b(103, 2, 7);
        const auto pa = simulate_path(srw, f, 500, SimMode::bridge_full, a, true);
        const auto pb = simulate_path(srw, f, 500, SimMode::bridge_full, b, true);
        CHECK(pa.local_time == pb.local_time);
        CHECK(pa.endpoint == pb.endpoint);
        CHECK(pa.strict_persisted == pb.strict_persisted);
        CHECK(pa.first_failure == pb.first_failure);
        CHECK(*pa.return_times == *pb.return_times);
    }
    SUBCASE("strict mode and bridge_full mode agree on the strict verdict") {
        sampling::RandomStream base(104, 3);
        for (int t = 0; t < 5000; ++t) {
            auto r1 = base.substream(static_cast<std::uint64_t>(t));
            auto r2 = base.substream(static_cast<std::uint64_t>(t));
            const auto early = simulate_path(srw, f, 64, SimMode::strict, r1);
            const auto full = simulate_path(srw, f, 64, SimMode::bridge_full, r2);
            REQUIRE(early.strict_persisted == full.strict_persisted);
            if (!full.strict_persisted) REQUIRE(early.first_failure == full.first_failure);
        }
    }
    SUBCASE("local time equals the return-time count; excursions keep one sign") {
        const auto lazy = BirthDeathChain::bessel_like({0.5, EpsilonFn::zero(), 0.2}, 0.05);
        sampling::RandomStream base(105, 4);
        for (int t = 0; t < 300; ++t) {
            auto r1 = base.substream(static_cast<std::uint64_t>(t));
            auto r2 = base.substream(static_cast<std::uint64_t>(t));
            const auto summary = simulate_path(lazy, f, 256, SimMode::bridge_full, r1, true);
            const auto xs = replay_path(lazy, 256, r2);
            REQUIRE(summary.return_times->size() == static_cast<std::size_t>(summary.local_time));
            long visits = 0;
            for (long k = 1; k <= 256; ++k) visits += xs[static_cast<std::size_t>(k)] == 0;
            REQUIRE(visits == summary.local_time);
            REQUIRE(xs[256] == summary.endpoint);
            // Between consecutive zeros the height profile has a single sign.
            long prev = 0;
            for (const long tau : *summary.return_times) {
                int sign = 0;
                for (long k = prev + 1; k < tau; ++k) {
                    const long x = xs[static_cast<std::size_t>(k)];
                    if (x == 0) continue;  // lazy holds at zero only at excursion ends
                    const int s = x > 0 ? 1 : -1;
                    if (sign == 0) sign = s;
                    REQUIRE(s == sign);
                }
                prev = tau;
            }
        }
    }
    SUBCASE("path law is symmetric") {
        sampling::RandomStream base(106, 5);
        double sign_sum = 0;
        const int trials = 100000;
        for (int t = 0; t < trials; ++t) {
            auto rng = base.substream(static_cast<std::uint64_t>(t));
            const auto s = simulate_path(srw, f, 101, SimMode::bridge_full, rng);
            sign_sum += (s.endpoint > 0) - (s.endpoint < 0);
        }
        CHECK(std::abs(sign_sum / trials) < 3.0 / std::sqrt(static_cast<double>(trials)));
    }
}

TEST_CASE("recurrence classification") {
    SUBCASE("drift rule for Bessel-like chains") {
        const auto srw = BirthDeathChain::simple_random_walk();
        CHECK(classify_recurrence(srw, 10000).classification == RecurrenceClass::null_recurrent);
        const auto pos = BirthDeathChain::bessel_like({3.0, EpsilonFn::zero(), 0.0}, 0.05);
        CHECK(classify_recurrence(pos, 10000).classification ==
              RecurrenceClass::positive_recurrent);
        const auto trans = BirthDeathChain::bessel_like({-2.0, EpsilonFn::zero(), 0.0}, 0.05);
        CHECK(classify_recurrence(trans, 10000).classification == RecurrenceClass::transient);
        const auto crit1 = BirthDeathChain::bessel_like({1.0, EpsilonFn::zero(), 0.0}, 0.05);
        CHECK(classify_recurrence(crit1, 10000).classification ==
              RecurrenceClass::inconclusive);
        const auto critm1 = BirthDeathChain::bessel_like({-1.0, EpsilonFn::zero(), 0.0}, 0.05);
        CHECK(classify_recurrence(critm1, 10000).classification ==
              RecurrenceClass::inconclusive);
    }
    SUBCASE("numeric trend for explicit kernels") {
        // delta = 3 Bessel rows injected as an anonymous table.
        const auto bessel = BirthDeathChain::bessel_like({3.0, EpsilonFn::zero(), 0.0}, 0.05);
        std::vector<BirthDeathChain::Row> rows;
        for (long x = 1; x <= 20000; ++x) rows.push_back(bessel.at(x));
        const auto table = BirthDeathChain::from_table(0.5, rows, 0.05);
        const auto rep = classify_recurrence(table, 20000);
        CHECK(rep.rule == "numeric trend");
        CHECK(rep.classification == RecurrenceClass::positive_recurrent);
        CHECK(rep.lambda_log_slope == doctest::Approx(3.0).epsilon(0.05));

        std::vector<BirthDeathChain::Row> srw_rows(20000, {0.5, 0.5, 0.0});
        const auto srw_table = BirthDeathChain::from_table(0.5, srw_rows, 0.05);
        CHECK(classify_recurrence(srw_table, 20000).classification ==
              RecurrenceClass::null_recurrent);
    }
}

TEST_CASE("first-return-time DP") {
    SUBCASE("simple walk small values") {
        const auto tau = tau1_tail(BirthDeathChain::simple_random_walk(), 64);
        CHECK(tau.tail[0] == 1.0);
        CHECK(tau.tail[1] == 1.0);  // cannot return in one step without laziness
        CHECK(tau.pmf(2) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(tau.pmf(3) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(tau.pmf(4) == doctest::Approx(0.125).epsilon(1e-14));
    }
    SUBCASE("simple walk tail equals g(n/2) at even horizons") {
        const auto tau = tau1_tail(BirthDeathChain::simple_random_walk(), 2000);
        const auto g = combinatorics::g_float_table(1000);
        for (long n = 2; n <= 2000; n += 2) {
            CAPTURE(n);
            REQUIRE(tau.tail[static_cast<std::size_t>(n)] ==
                    doctest::Approx(g[static_cast<std::size_t>(n / 2)]).epsilon(1e-10));
        }
        CHECK(tau.lost_mass < 1e-12);
    }
    SUBCASE("fitted tail exponent for the simple walk is 1/2") {
        const auto tau = tau1_tail(BirthDeathChain::simple_random_walk(), 100000);
        CHECK(std::abs(tau.alpha_fit - 0.5) < 0.03);
    }
    SUBCASE("lazy walk returns at step one with the holding probability") {
        const auto lazy = BirthDeathChain::bessel_like({0.0, EpsilonFn::zero(), 0.3}, 0.05);
        const auto tau = tau1_tail(lazy, 32);
        CHECK(tau.tail[1] == doctest::Approx(0.7).epsilon(1e-14));
        CHECK(tau.mu[1] == doctest::Approx(0.3).epsilon(1e-14));
    }
    SUBCASE("positive-recurrent mean: DP route vs stationary (Kac) route") {
        const auto chain = BirthDeathChain::bessel_like({3.0, EpsilonFn::zero(), 0.3}, 0.05);
        const auto tau = tau1_tail(chain, 20000);
        const double kac = expected_return_time_stationary(chain);
        CHECK(tau.mean_estimate() == doctest::Approx(kac).epsilon(0.005));
        // Laziness must not move E[tau_1]: holds at 0 are instant returns
        // that exactly offset the slower excursions.
        const auto plain = BirthDeathChain::bessel_like({3.0, EpsilonFn::zero(), 0.0}, 0.05);
        CHECK(expected_return_time_stationary(plain) == doctest::Approx(kac).epsilon(1e-12));
    }
    SUBCASE("delta = 1.5: finite mean, truncated means converge") {
        const auto chain = BirthDeathChain::bessel_like({1.5, EpsilonFn::zero(), 0.2}, 0.05);
        const auto tau = tau1_tail(chain, 50000);
        const double mu_half = tau.mu[25000];
        const double mu_full = tau.mu[50000];
        CHECK(std::abs(mu_full - mu_half) < 0.01 * mu_full);
        CHECK(tau.mean_estimate() ==
              doctest::Approx(expected_return_time_stationary(chain)).epsilon(0.01));
    }
    SUBCASE("bounds and truncation accounting") {
        CHECK_THROWS_AS(tau1_tail(BirthDeathChain::simple_random_walk(), 0),
                        std::invalid_argument);
        // A tight height cap loses mass, reports it, and overstates the tail
        // by at most that amount (lost mass can never return).
        const auto tight = tau1_tail(BirthDeathChain::simple_random_walk(), 4096, 8);
        const auto loose = tau1_tail(BirthDeathChain::simple_random_walk(), 4096);
        CHECK(tight.lost_mass > 0.0);
        CHECK(loose.lost_mass < 1e-12);
        CHECK(tight.tail[4096] >= loose.tail[4096] - 1e-12);
        CHECK(tight.tail[4096] - loose.tail[4096] <= tight.lost_mass + 1e-12);
    }
}
