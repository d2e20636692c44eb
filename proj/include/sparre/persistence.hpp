#pragma once

#include "sparre/chains.hpp"
#include "sparre/sampling.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparre::persistence {

enum class Target {
    strict,
    weak,
    strict_bridge,
    weak_bridge,
    eg_ln,
    eg_ln_minus1,
    eg_ln_bridge,
    eg_ln_minus1_bridge,
};

inline constexpr std::array<Target, 8> kAllTargets = {
    Target::strict,        Target::weak,         Target::strict_bridge,
    Target::weak_bridge,   Target::eg_ln,        Target::eg_ln_minus1,
    Target::eg_ln_bridge,  Target::eg_ln_minus1_bridge,
};

const char* target_name(Target t);
std::optional<Target> target_from_name(const std::string& name);

// Bridge targets estimate the joint probability with {X_n = 0}, never the
// conditional one.
inline bool is_bridge(Target t) {
    return t == Target::strict_bridge || t == Target::weak_bridge ||
           t == Target::eg_ln_bridge || t == Target::eg_ln_minus1_bridge;
}

struct PersistenceEstimate {
    Target target = Target::strict;
    long n = 0;
    std::uint64_t trials = 0;
    double point = 0.0;
    double half_width_3sigma = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string chain_id;
};

struct McOptions {
    // Trials are split into fixed substream chunks; the estimate depends on
    // (seed, stream, chunk_size) only, never on the thread count.
    std::uint64_t chunk_size = 16384;
    int threads = 0;  // 0 = OpenMP default
};

// Monte-Carlo estimate over `trials` paths. The g(L_n) functionals use the
// float g-table with g(m) = 0 for m < 0 and g(0) = 1. half_width is 3 sample
// standard errors. The base stream's substreams 0..ceil(trials/chunk)-1 are
// consumed.
PersistenceEstimate estimate(const chains::BirthDeathChain& chain, const chains::OddFunctional& f,
                             long n, Target target, std::uint64_t trials,
                             const sampling::RandomStream& base, const McOptions& opts = {});

// Chunk-sequential reference implementation; byte-identical results to
// estimate() by construction. Kept for tests and the kernel benchmark.
PersistenceEstimate estimate_serial(const chains::BirthDeathChain& chain,
                                    const chains::OddFunctional& f, long n, Target target,
                                    std::uint64_t trials, const sampling::RandomStream& base,
                                    const McOptions& opts = {});

struct SandwichCheck {
    std::string name;
    double bound = 0.0;     // the side that must not exceed the other
    double value = 0.0;
    double slack = 0.0;     // combined 3-sigma half-widths
    bool pass = false;
};

// All eight estimators evaluated on common trajectories, plus the
// lower <= middle <= upper verdicts for the persistence and bridge
// sandwiches and the weak-persistence lower bounds.
struct SandwichReport {
    long n = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string chain_id;
    double p0 = 0.5;
    std::array<PersistenceEstimate, 8> estimates;  // indexed by Target order
    std::vector<SandwichCheck> checks;
    bool pass = false;

    const PersistenceEstimate& of(Target t) const {
        return estimates[static_cast<std::size_t>(t)];
    }
};

SandwichReport sandwich_check(const chains::BirthDeathChain& chain,
                              const chains::OddFunctional& f, long n, std::uint64_t trials,
                              const sampling::RandomStream& base, const McOptions& opts = {});

}  // namespace sparre::persistence
