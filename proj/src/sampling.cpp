#include "sparre/sampling.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sparre::sampling {

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
    // Lemire's multiply-and-reject method.
    std::uint64_t x = next_u64();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
        const std::uint64_t threshold = -bound % bound;
        while (lo < threshold) {
            x = next_u64();
            m = static_cast<unsigned __int128>(x) * bound;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RandomStream::next_gaussian() {
    if (has_gauss_spare_) {
        has_gauss_spare_ = false;
        return gauss_spare_;
    }
    double u;
    do {
        u = next_double();
    } while (u == 0.0);
    const double v = next_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * std::numbers::pi * v;
    gauss_spare_ = r * std::sin(theta);
    has_gauss_spare_ = true;
    return r * std::cos(theta);
}

std::vector<double> sample_exchangeable_sign_invariant(const std::vector<double>& magnitudes,
                                                       RandomStream& rng) {
    std::vector<double> out = magnitudes;
    const std::size_t n = out.size();
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(out[i - 1], out[j]);
    }
    for (double& v : out) {
        if (rng.next_u64() & 1ULL) v = -v;
    }
    return out;
}

double sample_one_sided_stable(double alpha, RandomStream& rng) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("sample_one_sided_stable: alpha must lie in (0,1)");
    double u;
    do {
        u = rng.next_double();
    } while (u == 0.0);
    double w;
    do {
        w = rng.next_double();
    } while (w == 0.0);
    const double e = -std::log(w);
    const double theta = std::numbers::pi * u;
    // Z = (a(theta)/E)^((1-alpha)/alpha) with
    // a(t) = [sin(alpha t)^alpha sin((1-alpha) t)^(1-alpha) / sin t]^(1/(1-alpha)).
    const double log_a_num = alpha * std::log(std::sin(alpha * theta)) +
                             (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * theta)) -
                             std::log(std::sin(theta));
    const double log_z = (log_a_num / alpha) - ((1.0 - alpha) / alpha) * std::log(e);
    return std::exp(log_z);
}

double fractional_moment(double alpha, double p) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("fractional_moment: alpha must lie in (0,1)");
    if (!(p < alpha))
        throw std::invalid_argument("fractional_moment: requires p < alpha (moment infinite)");
    return std::exp(std::lgamma(1.0 - p / alpha) - std::lgamma(1.0 - p));
}

double mc_fractional_moment(double alpha, double p, std::uint64_t draws, const RandomStream& base,
                            std::uint64_t chunk_size, int threads) {
    if (draws == 0) throw std::invalid_argument("mc_fractional_moment: draws must be positive");
    const std::uint64_t n_chunks = (draws + chunk_size - 1) / chunk_size;
    std::vector<double> partial(n_chunks, 0.0);
    const int n_threads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk_size;
        const std::uint64_t end = std::min(draws, begin + chunk_size);
        auto rng = base.substream(static_cast<std::uint64_t>(c));
        double sum = 0.0;
        for (std::uint64_t i = begin; i < end; ++i)
            sum += std::pow(sample_one_sided_stable(alpha, rng), p);
        partial[static_cast<std::size_t>(c)] = sum;
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total / static_cast<double>(draws);
}

double SymmetricIncrementLaw::sample(RandomStream& rng) const {
    switch (kind) {
        case Kind::gaussian:
            return param * rng.next_gaussian();
        case Kind::uniform:
            return param * (2.0 * rng.next_double() - 1.0);
        case Kind::rademacher:
            return (rng.next_u64() & 1ULL) ? 1.0 : -1.0;
        case Kind::symmetrized_exponential: {
            double u;
            do {
                u = rng.next_double();
            } while (u == 0.0);
            const double magnitude = -std::log(u) / param;
            return (rng.next_u64() & 1ULL) ? magnitude : -magnitude;
        }
    }
    return 0.0;
}

}  // namespace sparre::sampling
