#include "sparre/persistence.hpp"

#include "sparre/combinatorics.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

namespace sparre::persistence {

const char* target_name(Target t) {
    switch (t) {
        case Target::strict: return "strict";
        case Target::weak: return "weak";
        case Target::strict_bridge: return "strict_bridge";
        case Target::weak_bridge: return "weak_bridge";
        case Target::eg_ln: return "Eg_Ln";
        case Target::eg_ln_minus1: return "Eg_Ln_minus1";
        case Target::eg_ln_bridge: return "Eg_Ln_bridge";
        case Target::eg_ln_minus1_bridge: return "Eg_Ln_minus1_bridge";
    }
    return "?";
}

std::optional<Target> target_from_name(const std::string& name) {
    for (Target t : kAllTargets)
        if (name == target_name(t)) return t;
    return std::nullopt;
}

namespace {

struct Welford {
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
    }
    void merge(const Welford& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
};

double half_width(const Welford& w, std::uint64_t trials) {
    if (trials < 2) return 0.0;
    const double mean = w.sum / static_cast<double>(trials);
    double var = (w.sum_sq - mean * w.sum) / static_cast<double>(trials - 1);
    if (var < 0.0) var = 0.0;
    return 3.0 * std::sqrt(var / static_cast<double>(trials));
}

chains::SimMode mode_for(Target t) {
    switch (t) {
        case Target::strict:
        case Target::strict_bridge:
            return chains::SimMode::strict;
        case Target::weak:
        case Target::weak_bridge:
            return chains::SimMode::weak;
        default:
            return chains::SimMode::bridge_full;
    }
}

bool needs_g_table(Target t) {
    return t == Target::eg_ln || t == Target::eg_ln_minus1 || t == Target::eg_ln_bridge ||
           t == Target::eg_ln_minus1_bridge;
}

double target_value(Target t, const chains::PathSummary& path, const std::vector<double>& g) {
    const bool at_zero = path.endpoint == 0 && path.steps_simulated == path.n;
    switch (t) {
        case Target::strict:
            return path.strict_persisted ? 1.0 : 0.0;
        case Target::weak:
            return path.weak_persisted ? 1.0 : 0.0;
        case Target::strict_bridge:
            return (path.strict_persisted && at_zero) ? 1.0 : 0.0;
        case Target::weak_bridge:
            return (path.weak_persisted && at_zero) ? 1.0 : 0.0;
        case Target::eg_ln:
            return g[static_cast<std::size_t>(path.local_time)];
        case Target::eg_ln_minus1:
            return path.local_time >= 1 ? g[static_cast<std::size_t>(path.local_time - 1)] : 0.0;
        case Target::eg_ln_bridge:
            return at_zero ? g[static_cast<std::size_t>(path.local_time)] : 0.0;
        case Target::eg_ln_minus1_bridge:
            return (at_zero && path.local_time >= 1)
                       ? g[static_cast<std::size_t>(path.local_time - 1)]
                       : 0.0;
    }
    return 0.0;
}

void validate_run(const chains::BirthDeathChain& chain, long n, Target target,
                  std::uint64_t trials) {
    if (n < 1) throw std::invalid_argument("estimate: horizon must be >= 1");
    if (trials < 1000) throw std::invalid_argument("estimate: trials must be >= 1000");
    if (is_bridge(target) && !chain.aperiodic() && n % 2 != 0)
        throw std::invalid_argument("estimate: bridge target at odd horizon on a periodic chain");
}

std::uint64_t chunk_count(std::uint64_t trials, std::uint64_t chunk_size) {
    return (trials + chunk_size - 1) / chunk_size;
}

PersistenceEstimate run_estimate(const chains::BirthDeathChain& chain,
                                 const chains::OddFunctional& f, long n, Target target,
                                 std::uint64_t trials, const sampling::RandomStream& base,
                                 const McOptions& opts, bool parallel) {
    validate_run(chain, n, target, trials);
    std::vector<double> g;
    if (needs_g_table(target)) g = combinatorics::g_float_table(static_cast<unsigned>(n));
    const chains::SimMode mode = mode_for(target);

    const std::uint64_t n_chunks = chunk_count(trials, opts.chunk_size);
    std::vector<Welford> partial(n_chunks);
    const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads) if (parallel)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * opts.chunk_size;
        const std::uint64_t end = std::min(trials, begin + opts.chunk_size);
        auto rng = base.substream(static_cast<std::uint64_t>(c));
        Welford w;
        for (std::uint64_t t = begin; t < end; ++t) {
            const auto path = chains::simulate_path(chain, f, n, mode, rng);
            w.add(target_value(target, path, g));
        }
        partial[static_cast<std::size_t>(c)] = w;
    }

    Welford total;
    for (const auto& w : partial) total.merge(w);

    PersistenceEstimate est;
    est.target = target;
    est.n = n;
    est.trials = trials;
    est.point = total.sum / static_cast<double>(trials);
    est.half_width_3sigma = half_width(total, trials);
    est.seed = base.seed();
    est.stream = base.stream_id();
    est.chain_id = chain.id();
    return est;
}

}  // namespace

PersistenceEstimate estimate(const chains::BirthDeathChain& chain, const chains::OddFunctional& f,
                             long n, Target target, std::uint64_t trials,
                             const sampling::RandomStream& base, const McOptions& opts) {
    return run_estimate(chain, f, n, target, trials, base, opts, true);
}

PersistenceEstimate estimate_serial(const chains::BirthDeathChain& chain,
                                    const chains::OddFunctional& f, long n, Target target,
                                    std::uint64_t trials, const sampling::RandomStream& base,
                                    const McOptions& opts) {
    return run_estimate(chain, f, n, target, trials, base, opts, false);
}

SandwichReport sandwich_check(const chains::BirthDeathChain& chain,
                              const chains::OddFunctional& f, long n, std::uint64_t trials,
                              const sampling::RandomStream& base, const McOptions& opts) {
    validate_run(chain, n, Target::strict_bridge, trials);
    const auto g = combinatorics::g_float_table(static_cast<unsigned>(n));

    constexpr std::size_t k = kAllTargets.size();
    const std::uint64_t n_chunks = chunk_count(trials, opts.chunk_size);
    std::vector<std::array<Welford, k>> partial(n_chunks);
    const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * opts.chunk_size;
        const std::uint64_t end = std::min(trials, begin + opts.chunk_size);
        auto rng = base.substream(static_cast<std::uint64_t>(c));
        std::array<Welford, k> w;
        for (std::uint64_t t = begin; t < end; ++t) {
            // One full trajectory feeds every functional.
            const auto path = chains::simulate_path(chain, f, n, chains::SimMode::bridge_full, rng);
            for (std::size_t i = 0; i < k; ++i) w[i].add(target_value(kAllTargets[i], path, g));
        }
        partial[static_cast<std::size_t>(c)] = w;
    }

    std::array<Welford, k> total;
    for (const auto& w : partial)
        for (std::size_t i = 0; i < k; ++i) total[i].merge(w[i]);

    SandwichReport report;
    report.n = n;
    report.trials = trials;
    report.seed = base.seed();
    report.stream = base.stream_id();
    report.chain_id = chain.id();
    report.p0 = chain.p0();
    for (std::size_t i = 0; i < k; ++i) {
        auto& est = report.estimates[i];
        est.target = kAllTargets[i];
        est.n = n;
        est.trials = trials;
        est.point = total[i].sum / static_cast<double>(trials);
        est.half_width_3sigma = half_width(total[i], trials);
        est.seed = report.seed;
        est.stream = report.stream;
        est.chain_id = report.chain_id;
    }

    const double p0 = report.p0;
    auto add_check = [&report](const std::string& name, double bound, double bound_hw,
                               double value, double value_hw) {
        SandwichCheck c;
        c.name = name;
        c.bound = bound;
        c.value = value;
        c.slack = bound_hw + value_hw;
        c.pass = bound - value <= c.slack;
        report.checks.push_back(c);
    };
    const auto& strict = report.of(Target::strict);
    const auto& weak = report.of(Target::weak);
    const auto& strict_b = report.of(Target::strict_bridge);
    const auto& weak_b = report.of(Target::weak_bridge);
    const auto& eg = report.of(Target::eg_ln);
    const auto& eg_m1 = report.of(Target::eg_ln_minus1);
    const auto& eg_b = report.of(Target::eg_ln_bridge);
    const auto& eg_m1_b = report.of(Target::eg_ln_minus1_bridge);

    add_check("p0(1-p0) E[g(Ln-1)] <= P(strict)", p0 * (1 - p0) * eg_m1.point,
              p0 * (1 - p0) * eg_m1.half_width_3sigma, strict.point, strict.half_width_3sigma);
    add_check("P(strict) <= E[g(Ln)]", strict.point, strict.half_width_3sigma, eg.point,
              eg.half_width_3sigma);
    add_check("p0 E[g(Ln-1); Xn=0] <= P(strict bridge)", p0 * eg_m1_b.point,
              p0 * eg_m1_b.half_width_3sigma, strict_b.point, strict_b.half_width_3sigma);
    add_check("P(strict bridge) <= E[g(Ln); Xn=0]", strict_b.point, strict_b.half_width_3sigma,
              eg_b.point, eg_b.half_width_3sigma);
    add_check("(1-p0) E[g(Ln)] <= P(weak)", (1 - p0) * eg.point,
              (1 - p0) * eg.half_width_3sigma, weak.point, weak.half_width_3sigma);
    add_check("(1-p0) E[g(Ln); Xn=0] <= P(weak bridge)", (1 - p0) * eg_b.point,
              (1 - p0) * eg_b.half_width_3sigma, weak_b.point, weak_b.half_width_3sigma);

    report.pass = true;
    for (const auto& c : report.checks) report.pass = report.pass && c.pass;
    return report;
}

}  // namespace sparre::persistence
