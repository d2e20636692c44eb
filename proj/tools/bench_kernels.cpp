// Timings of the OpenMP kernels against their serial counterparts:
//   - exact enumeration (Gray-code kernel, 1 thread vs all threads, plus the
//     naive rational reference at a smaller n)
//   - Monte-Carlo persistence estimation (chunked kernel, serial vs parallel)
// Results must be identical between the serial and parallel runs; the
// benchmark asserts that before reporting speedups.

#include "sparre/chains.hpp"
#include "sparre/exact_oracle.hpp"
#include "sparre/persistence.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

namespace {

double time_once(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    using namespace sparre;
    const int max_threads = omp_get_max_threads();
    std::printf("threads available: %d\n\n", max_threads);
    std::printf("%-42s %10s %10s %8s\n", "kernel", "serial[s]", "parallel[s]", "speedup");

    {
        const auto x = oracle::WeightVector::from_integers({3, 7, 19, 41, 97, 211, 431, 887});
        const auto law = oracle::SignPermutationLaw::independent_uniform(8);
        oracle::EnumerationOptions serial_opts{.cap = 8, .threads = 1};
        oracle::EnumerationOptions parallel_opts{.cap = 8, .threads = 0};
        oracle::ExactPersistenceResult serial_res, parallel_res;
        const double ts = time_once([&] { serial_res = enumerate_persistence(x, law, serial_opts); });
        const double tp =
            time_once([&] { parallel_res = enumerate_persistence(x, law, parallel_opts); });
        if (serial_res.p_strict != parallel_res.p_strict ||
            serial_res.p_weak != parallel_res.p_weak) {
            std::printf("enumeration results diverged between thread counts\n");
            return 1;
        }
        std::printf("%-42s %10.3f %10.3f %7.2fx\n", "enumerate_persistence n=8 (2^8*8!)", ts, tp,
                    ts / tp);
    }

    {
        const auto x = oracle::WeightVector::from_integers({3, 7, 19, 41, 97, 211});
        const auto law = oracle::SignPermutationLaw::independent_uniform(6);
        oracle::EnumerationOptions opts{.cap = 6, .threads = 0};
        oracle::ExactPersistenceResult fast_res, ref_res;
        const double tr =
            time_once([&] { ref_res = enumerate_persistence_reference(x, law, opts); });
        const double tf = time_once([&] { fast_res = enumerate_persistence(x, law, opts); });
        if (ref_res.p_strict != fast_res.p_strict) {
            std::printf("reference and Gray-code kernels diverged\n");
            return 1;
        }
        std::printf("%-42s %10.3f %10.3f %7.2fx\n", "naive reference vs Gray-code, n=6", tr, tf,
                    tr / tf);
    }

    {
        const auto chain = chains::BirthDeathChain::simple_random_walk();
        const auto f = chains::OddFunctional::identity();
        const sampling::RandomStream base(20240601, 1);
        persistence::McOptions opts;
        const long n = 4096;
        const std::uint64_t trials = 200000;
        persistence::PersistenceEstimate serial_est, parallel_est;
        const double ts = time_once([&] {
            serial_est = persistence::estimate_serial(chain, f, n, persistence::Target::strict,
                                                      trials, base, opts);
        });
        const double tp = time_once([&] {
            parallel_est =
                persistence::estimate(chain, f, n, persistence::Target::strict, trials, base, opts);
        });
        if (serial_est.point != parallel_est.point) {
            std::printf("MC estimates diverged between serial and parallel runs\n");
            return 1;
        }
        std::printf("%-42s %10.3f %10.3f %7.2fx\n", "MC strict persistence n=4096, 2e5 paths", ts,
                    tp, ts / tp);
    }

    {
        const auto chain = chains::BirthDeathChain::bessel_like(
            chains::BesselLikeSpec{3.0, chains::EpsilonFn::zero(), 0.3}, 0.05);
        const auto f = chains::OddFunctional::identity();
        const sampling::RandomStream base(20240601, 2);
        persistence::McOptions opts;
        const long n = 10000;
        const std::uint64_t trials = 100000;
        persistence::SandwichReport serial_rep, parallel_rep;
        persistence::McOptions serial_opts = opts;
        serial_opts.threads = 1;
        const double ts = time_once(
            [&] { serial_rep = persistence::sandwich_check(chain, f, n, trials, base, serial_opts); });
        const double tp = time_once(
            [&] { parallel_rep = persistence::sandwich_check(chain, f, n, trials, base, opts); });
        if (serial_rep.of(persistence::Target::eg_ln).point !=
            parallel_rep.of(persistence::Target::eg_ln).point) {
            std::printf("sandwich functionals diverged between thread counts\n");
            return 1;
        }
        std::printf("%-42s %10.3f %10.3f %7.2fx\n", "sandwich functionals n=1e4, 1e5 paths", ts,
                    tp, ts / tp);
    }

    return 0;
}
