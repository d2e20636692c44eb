#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace sparre::sampling {

namespace detail {

// Philox 4x64 round constants (Weyl keys and multipliers).
inline constexpr std::uint64_t kPhiloxMul0 = 0xD2E7470EE14C6C93ULL;
inline constexpr std::uint64_t kPhiloxMul1 = 0xCA5A826395121157ULL;
inline constexpr std::uint64_t kPhiloxWeyl0 = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kPhiloxWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

inline std::array<std::uint64_t, 4> philox_block(std::array<std::uint64_t, 4> c,
                                                 std::array<std::uint64_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxMul0, c[0], hi0, lo0);
        mulhilo(kPhiloxMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kPhiloxWeyl0;
        k[1] += kPhiloxWeyl1;
    }
    return c;
}

}  // namespace detail

// Counter-based pseudorandom stream: Philox 4x64 with 10 rounds, bit-exact
// with NumPy's Philox bit generator. The key is (seed, stream_id); counter
// word 1 holds the substream index and counter word 0 advances as values are
// drawn. Identical (seed, stream_id, substream) reproduce identical draws on
// every platform and for any thread count; distinct substreams never overlap
// (they live in disjoint counter ranges).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0,
                          std::uint64_t substream = 0)
        : key_{seed, stream_id}, counter_{0, substream, 0, 0}, substream_(substream) {}

    // Fresh stream with the same key and an untouched counter.
    RandomStream substream(std::uint64_t index) const {
        return RandomStream(key_[0], key_[1], index);
    }

    std::uint64_t next_u64() {
        if (available_ == 0) {
            ++counter_[0];  // never wraps in practice (2^64 blocks per substream)
            buffer_ = detail::philox_block(counter_, key_);
            available_ = 4;
        }
        return buffer_[static_cast<std::size_t>(4 - available_--)];
    }

    // Uniform on [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on {0, ..., bound-1} without modulo bias.
    std::uint64_t next_below(std::uint64_t bound);

    // Standard normal via Box-Muller (one value cached).
    double next_gaussian();

    std::uint64_t seed() const { return key_[0]; }
    std::uint64_t stream_id() const { return key_[1]; }
    std::uint64_t substream_id() const { return substream_; }

private:
    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> counter_;
    std::array<std::uint64_t, 4> buffer_{};
    std::uint64_t substream_ = 0;
    int available_ = 0;
    double gauss_spare_ = 0.0;
    bool has_gauss_spare_ = false;
};

// One draw of (eps_1 x_{sigma(1)}, ..., eps_n x_{sigma(n)}): sigma a uniform
// permutation (Fisher-Yates), eps i.i.d. uniform signs, independent.
std::vector<double> sample_exchangeable_sign_invariant(const std::vector<double>& magnitudes,
                                                       RandomStream& rng);

// One-sided alpha-stable variable with Laplace transform exp(-t^alpha),
// alpha in (0,1), by the Kanter integral representation (uniform angle +
// unit exponential). Throws std::invalid_argument outside (0,1).
double sample_one_sided_stable(double alpha, RandomStream& rng);

// E[Z_alpha^p] = Gamma(1 - p/alpha) / Gamma(1 - p) for p < alpha (Mellin
// transform of the positive stable law). Independent oracle for the sampler;
// p may be negative. Throws std::invalid_argument when p >= alpha.
double fractional_moment(double alpha, double p);

// Monte-Carlo mean of Z_alpha^p over `draws` stable samples, chunked into
// substreams of `base` exactly like the persistence estimators. Deterministic
// for fixed (base, chunk_size) regardless of thread count.
double mc_fractional_moment(double alpha, double p, std::uint64_t draws,
                            const RandomStream& base, std::uint64_t chunk_size = 65536,
                            int threads = 0);

// Symmetric step laws for i.i.d.-increment experiments.
struct SymmetricIncrementLaw {
    enum class Kind { gaussian, uniform, rademacher, symmetrized_exponential };

    Kind kind = Kind::gaussian;
    double param = 1.0;  // sigma / half-width / unused / rate

    double sample(RandomStream& rng) const;
    bool atomless() const { return kind != Kind::rademacher; }
    double atom_at_zero() const { return 0.0; }

    static SymmetricIncrementLaw gaussian(double sigma) { return {Kind::gaussian, sigma}; }
    static SymmetricIncrementLaw uniform(double half_width) { return {Kind::uniform, half_width}; }
    static SymmetricIncrementLaw rademacher() { return {Kind::rademacher, 1.0}; }
    static SymmetricIncrementLaw symmetrized_exponential(double rate) {
        return {Kind::symmetrized_exponential, rate};
    }
};

}  // namespace sparre::sampling
