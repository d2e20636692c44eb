#include "sparre/exact_oracle.hpp"

#include "sparre/combinatorics.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace sparre::oracle {

namespace {

BigInt factorial(unsigned n) {
    BigInt r = 1;
    for (unsigned k = 2; k <= n; ++k) r *= k;
    return r;
}

std::uint64_t factorial_u64(unsigned n) {
    std::uint64_t r = 1;
    for (unsigned k = 2; k <= n; ++k) r *= k;
    return r;
}

// Common-denominator integer scaling of the magnitudes.
std::vector<BigInt> scaled_magnitudes(const WeightVector& x) {
    BigInt scale = 1;
    for (const auto& m : x.magnitudes) scale = boost::multiprecision::lcm(scale, rational_den(m));
    std::vector<BigInt> out;
    out.reserve(x.magnitudes.size());
    for (const auto& m : x.magnitudes) out.push_back(rational_num(m) * (scale / rational_den(m)));
    return out;
}

std::vector<unsigned> unrank_permutation(unsigned n, std::uint64_t rank) {
    std::vector<std::uint64_t> fact(n + 1, 1);
    for (unsigned k = 1; k <= n; ++k) fact[k] = fact[k - 1] * k;
    std::vector<unsigned> avail(n);
    std::iota(avail.begin(), avail.end(), 0u);
    std::vector<unsigned> perm(n);
    for (unsigned i = 0; i < n; ++i) {
        const std::uint64_t f = fact[n - 1 - i];
        const auto d = static_cast<std::size_t>(rank / f);
        rank %= f;
        perm[i] = avail[d];
        avail.erase(avail.begin() + static_cast<std::ptrdiff_t>(d));
    }
    return perm;
}

bool mask_allowed_constrained(std::uint32_t mask, unsigned n) {
    const auto minus = static_cast<unsigned>(std::popcount(mask));
    return minus == 1 || minus == n - 1;  // sum of signs in {n-2, 2-n}
}

struct CountingPartial {
    std::uint64_t outcomes = 0;
    std::uint64_t strict = 0;
    std::uint64_t weak = 0;
    std::uint64_t first_positive = 0;
    std::vector<std::uint64_t> w;

    explicit CountingPartial(unsigned n) : w(n + 1, 0) {}

    void merge(const CountingPartial& o) {
        outcomes += o.outcomes;
        strict += o.strict;
        weak += o.weak;
        first_positive += o.first_positive;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += o.w[i];
    }
};

template <typename Int>
void evaluate_outcome(const std::vector<Int>& prefix, const Int& first, unsigned n,
                      CountingPartial& out) {
    bool strict = true;
    bool weak = true;
    unsigned arg_max = 0;
    const Int* best = &prefix[0];  // S_0 = 0 participates in the argmax
    for (unsigned k = 1; k <= n; ++k) {
        const Int& s = prefix[k];
        if (s <= 0) {
            strict = false;
            if (s < 0) weak = false;
        }
        if (s > *best) {
            best = &s;
            arg_max = k;
        }
    }
    ++out.outcomes;
    out.strict += strict ? 1 : 0;
    out.weak += weak ? 1 : 0;
    out.first_positive += (first > 0) ? 1 : 0;
    ++out.w[arg_max];
}

// Enumerates sign vectors in Gray-code order (one flip per step, prefix sums
// updated in place) for `count` consecutive lexicographic permutations
// starting at `rank_begin`. Accumulates locally and writes the partial once,
// so concurrent blocks never share cache lines.
template <typename Int>
void run_counting_block(const std::vector<Int>& mag, unsigned n, bool constrained,
                        std::uint64_t rank_begin, std::uint64_t count, CountingPartial& out) {
    CountingPartial local(n);
    auto perm = unrank_permutation(n, rank_begin);
    std::vector<Int> y(n);
    std::vector<Int> prefix(n + 1);
    const std::uint32_t n_masks = 1u << n;
    std::vector<bool> allowed(n_masks, true);
    if (constrained)
        for (std::uint32_t m = 0; m < n_masks; ++m) allowed[m] = mask_allowed_constrained(m, n);

    for (std::uint64_t r = 0; r < count; ++r) {
        for (unsigned i = 0; i < n; ++i) y[i] = mag[perm[i]];
        prefix[0] = 0;
        for (unsigned i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + y[i];
        if (allowed[0]) evaluate_outcome(prefix, y[0], n, local);
        std::uint32_t mask = 0;
        for (std::uint32_t t = 1; t < n_masks; ++t) {
            const unsigned b = static_cast<unsigned>(std::countr_zero(t));
            y[b] = -y[b];
            Int change = y[b];
            change += y[b];  // new - old = 2 * new
            for (unsigned j = b + 1; j <= n; ++j) prefix[j] += change;
            mask ^= (1u << b);
            if (allowed[mask]) evaluate_outcome(prefix, y[0], n, local);
        }
        std::next_permutation(perm.begin(), perm.end());
    }
    out = std::move(local);
}

bool fits_int64(const std::vector<BigInt>& mag) {
    BigInt sum_abs = 0;
    for (const auto& v : mag) sum_abs += abs(v);
    return sum_abs < (BigInt(1) << 61);
}

ExactPersistenceResult counting_result(const CountingPartial& total_counts, unsigned n,
                                       const BigInt& mask_count) {
    ExactPersistenceResult res;
    res.n = n;
    res.strict_count = total_counts.strict;
    res.weak_count = total_counts.weak;
    res.total = factorial(n) * mask_count;
    res.p_strict = Rational(res.strict_count, res.total);
    res.p_weak = Rational(res.weak_count, res.total);
    res.p_first_positive = Rational(BigInt(total_counts.first_positive), res.total);
    res.w_distribution.resize(n + 1);
    for (unsigned l = 0; l <= n; ++l)
        res.w_distribution[l] = Rational(BigInt(total_counts.w[l]), res.total);
    return res;
}

ExactPersistenceResult enumerate_counting(const WeightVector& x, bool constrained,
                                          const EnumerationOptions& opts) {
    const unsigned n = x.size();
    const std::uint64_t n_perms = factorial_u64(n);
    const auto mag_big = scaled_magnitudes(x);

    const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
    const std::uint64_t n_blocks = std::min<std::uint64_t>(n_perms, 4u * static_cast<unsigned>(threads));
    std::vector<CountingPartial> partials(n_blocks, CountingPartial(n));

    const bool small = fits_int64(mag_big);
    std::vector<long long> mag_small;
    if (small)
        for (const auto& v : mag_big) mag_small.push_back(v.convert_to<long long>());

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
        const std::uint64_t begin = n_perms * static_cast<std::uint64_t>(b) / n_blocks;
        const std::uint64_t end = n_perms * static_cast<std::uint64_t>(b + 1) / n_blocks;
        if (small)
            run_counting_block(mag_small, n, constrained, begin, end - begin,
                               partials[static_cast<std::size_t>(b)]);
        else
            run_counting_block(mag_big, n, constrained, begin, end - begin,
                               partials[static_cast<std::size_t>(b)]);
    }

    CountingPartial total(n);
    for (const auto& p : partials) total.merge(p);
    const BigInt mask_count = constrained ? BigInt(n == 1 ? 2 : 2 * n) : (BigInt(1) << n);
    return counting_result(total, n, mask_count);
}

ExactPersistenceResult enumerate_weighted(const WeightVector& x, const SignPermutationLaw& law) {
    const unsigned n = x.size();
    const std::uint64_t n_perms = factorial_u64(n);
    const std::uint32_t n_masks = 1u << n;

    ExactPersistenceResult res;
    res.n = n;
    res.w_distribution.assign(n + 1, Rational(0));

    BigInt denom_scale = 1;
    for (const auto& row : law.joint_weights)
        for (const auto& wgt : row)
            denom_scale = boost::multiprecision::lcm(denom_scale, rational_den(wgt));

    std::vector<Rational> prefix(n + 1);
    std::vector<unsigned> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::uint64_t rank = 0; rank < n_perms; ++rank) {
        for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
            const Rational& weight = law.joint_weights[mask][rank];
            if (weight == 0) continue;
            prefix[0] = 0;
            for (unsigned i = 0; i < n; ++i) {
                Rational v = x.magnitudes[perm[i]];
                if (mask & (1u << i)) v = -v;
                prefix[i + 1] = prefix[i] + v;
            }
            bool strict = true;
            bool weak = true;
            unsigned arg_max = 0;
            for (unsigned k = 1; k <= n; ++k) {
                if (prefix[k] <= 0) {
                    strict = false;
                    if (prefix[k] < 0) weak = false;
                }
                if (prefix[k] > prefix[arg_max]) arg_max = k;
            }
            if (strict) res.p_strict += weight;
            if (weak) res.p_weak += weight;
            if (prefix[1] > 0) res.p_first_positive += weight;
            res.w_distribution[arg_max] += weight;
        }
        std::next_permutation(perm.begin(), perm.end());
    }

    res.total = denom_scale;
    res.strict_count = rational_num(res.p_strict) * (denom_scale / rational_den(res.p_strict));
    res.weak_count = rational_num(res.p_weak) * (denom_scale / rational_den(res.p_weak));
    return res;
}

void check_dimensions(const WeightVector& x, const SignPermutationLaw& law,
                      const EnumerationOptions& opts) {
    const unsigned n = x.size();
    if (n == 0) throw std::invalid_argument("enumerate_persistence: empty weight vector");
    if (law.n != n) throw std::invalid_argument("enumerate_persistence: law dimension mismatch");
    if (n > opts.cap) throw std::invalid_argument("enumerate_persistence: n exceeds enumeration cap");
    for (const auto& m : x.magnitudes)
        if (m < 0) throw std::invalid_argument("enumerate_persistence: magnitudes must be >= 0");
    law.validate();
}

}  // namespace

WeightVector WeightVector::from_integers(const std::vector<long long>& values) {
    WeightVector x;
    x.magnitudes.reserve(values.size());
    for (long long v : values) x.magnitudes.emplace_back(v);
    return x;
}

bool WeightVector::satisfies_distinct_subset_sums() const {
    const unsigned n = size();
    if (n > 20) throw std::invalid_argument("satisfies_distinct_subset_sums: n capped at 20");
    const auto mag = scaled_magnitudes(*this);
    if (fits_int64(mag)) {
        std::vector<long long> sums{0};
        sums.reserve(1ull << n);
        for (const auto& v : mag) {
            const long long add = v.convert_to<long long>();
            const std::size_t sz = sums.size();
            for (std::size_t i = 0; i < sz; ++i) sums.push_back(sums[i] + add);
        }
        std::sort(sums.begin(), sums.end());
        return std::adjacent_find(sums.begin(), sums.end()) == sums.end();
    }
    std::vector<BigInt> sums{0};
    sums.reserve(1ull << n);
    for (const auto& v : mag) {
        const std::size_t sz = sums.size();
        for (std::size_t i = 0; i < sz; ++i) sums.push_back(sums[i] + v);
    }
    std::sort(sums.begin(), sums.end());
    return std::adjacent_find(sums.begin(), sums.end()) == sums.end();
}

SignPermutationLaw SignPermutationLaw::independent_uniform(unsigned n) {
    SignPermutationLaw law;
    law.kind = Kind::independent_uniform;
    law.n = n;
    return law;
}

SignPermutationLaw SignPermutationLaw::constrained_signs(unsigned n) {
    SignPermutationLaw law;
    law.kind = Kind::constrained_signs;
    law.n = n;
    return law;
}

SignPermutationLaw SignPermutationLaw::dependent_joint(unsigned n,
                                                       std::vector<std::vector<Rational>> weights) {
    if (n > 6) throw std::invalid_argument("dependent_joint: explicit tables capped at n = 6");
    SignPermutationLaw law;
    law.kind = Kind::dependent_joint;
    law.n = n;
    law.joint_weights = std::move(weights);
    law.validate();
    return law;
}

void SignPermutationLaw::validate() const {
    if (kind != Kind::dependent_joint) return;
    const std::uint32_t n_masks = 1u << n;
    const std::uint64_t n_perms = factorial_u64(n);
    if (joint_weights.size() != n_masks)
        throw std::invalid_argument("SignPermutationLaw: joint table needs 2^n rows");
    Rational total = 0;
    for (const auto& row : joint_weights) {
        if (row.size() != n_perms)
            throw std::invalid_argument("SignPermutationLaw: joint table needs n! columns");
        for (const auto& w : row) {
            if (w < 0) throw std::invalid_argument("SignPermutationLaw: negative weight");
            total += w;
        }
    }
    if (total != 1) throw std::invalid_argument("SignPermutationLaw: weights must sum to 1");
}

std::vector<Rational> SignPermutationLaw::sign_marginal() const {
    const std::uint32_t n_masks = 1u << n;
    std::vector<Rational> marginal(n_masks, Rational(0));
    if (kind == Kind::dependent_joint) {
        for (std::uint32_t m = 0; m < n_masks; ++m)
            for (const auto& w : joint_weights[m]) marginal[m] += w;
    } else if (kind == Kind::independent_uniform) {
        for (auto& m : marginal) m = Rational(1, n_masks);
    } else {
        const unsigned count = n == 1 ? 2 : 2 * n;
        for (std::uint32_t m = 0; m < n_masks; ++m)
            if (mask_allowed_constrained(m, n)) marginal[m] = Rational(1, count);
    }
    return marginal;
}

ExactPersistenceResult enumerate_persistence(const WeightVector& x, const SignPermutationLaw& law,
                                             const EnumerationOptions& opts) {
    check_dimensions(x, law, opts);
    switch (law.kind) {
        case SignPermutationLaw::Kind::independent_uniform:
            return enumerate_counting(x, false, opts);
        case SignPermutationLaw::Kind::constrained_signs:
            return enumerate_counting(x, true, opts);
        case SignPermutationLaw::Kind::dependent_joint:
            return enumerate_weighted(x, law);
    }
    throw std::logic_error("enumerate_persistence: unknown law kind");
}

ExactPersistenceResult enumerate_persistence_reference(const WeightVector& x,
                                                       const SignPermutationLaw& law,
                                                       const EnumerationOptions& opts) {
    check_dimensions(x, law, opts);
    const unsigned n = x.size();
    const std::uint64_t n_perms = factorial_u64(n);
    const std::uint32_t n_masks = 1u << n;

    ExactPersistenceResult res;
    res.n = n;
    res.w_distribution.assign(n + 1, Rational(0));

    std::vector<unsigned> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    BigInt strict_count = 0, weak_count = 0;
    for (std::uint64_t rank = 0; rank < n_perms; ++rank) {
        for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
            Rational weight;
            switch (law.kind) {
                case SignPermutationLaw::Kind::independent_uniform:
                    weight = Rational(1, factorial(n) * (BigInt(1) << n));
                    break;
                case SignPermutationLaw::Kind::constrained_signs:
                    weight = mask_allowed_constrained(mask, n)
                                 ? Rational(1, factorial(n) * (n == 1 ? 2 : 2 * n))
                                 : Rational(0);
                    break;
                case SignPermutationLaw::Kind::dependent_joint:
                    weight = law.joint_weights[mask][rank];
                    break;
            }
            if (weight == 0) continue;
            Rational running = 0;
            Rational best = 0;
            unsigned arg_max = 0;
            bool strict = true, weak = true, first_positive = false;
            for (unsigned i = 0; i < n; ++i) {
                Rational v = x.magnitudes[perm[i]];
                if (mask & (1u << i)) v = -v;
                if (i == 0) first_positive = v > 0;
                running += v;
                if (running <= 0) {
                    strict = false;
                    if (running < 0) weak = false;
                }
                if (running > best) {
                    best = running;
                    arg_max = i + 1;
                }
            }
            if (strict) res.p_strict += weight;
            if (weak) res.p_weak += weight;
            if (first_positive) res.p_first_positive += weight;
            res.w_distribution[arg_max] += weight;
            if (law.kind != SignPermutationLaw::Kind::dependent_joint) {
                if (strict) ++strict_count;
                if (weak) ++weak_count;
            }
        }
        std::next_permutation(perm.begin(), perm.end());
    }

    if (law.kind == SignPermutationLaw::Kind::dependent_joint) {
        BigInt scale = 1;
        for (const auto& row : law.joint_weights)
            for (const auto& w : row) scale = boost::multiprecision::lcm(scale, rational_den(w));
        res.total = scale;
        res.strict_count = rational_num(res.p_strict) * (scale / rational_den(res.p_strict));
        res.weak_count = rational_num(res.p_weak) * (scale / rational_den(res.p_weak));
    } else {
        const BigInt mask_count = law.kind == SignPermutationLaw::Kind::constrained_signs
                                      ? BigInt(n == 1 ? 2 : 2 * n)
                                      : (BigInt(1) << n);
        res.total = factorial(n) * mask_count;
        res.strict_count = strict_count;
        res.weak_count = weak_count;
    }
    return res;
}

WDistributionCheck w_distribution_check(const WeightVector& x, const EnumerationOptions& opts) {
    if (!x.satisfies_distinct_subset_sums())
        throw std::invalid_argument("w_distribution_check: x must have distinct subset sums");
    const unsigned n = x.size();
    WDistributionCheck check;
    check.result = enumerate_persistence(x, SignPermutationLaw::independent_uniform(n), opts);
    check.residuals.resize(n + 1);
    check.pass = true;
    for (unsigned l = 0; l <= n; ++l) {
        check.residuals[l] = check.result.w_distribution[l] -
                             combinatorics::g_exact(l) * combinatorics::g_exact(n - l);
        if (check.residuals[l] != 0) check.pass = false;
    }
    return check;
}

std::vector<Rational> srw_persistence_dp_curve(unsigned n_steps, bool strict, unsigned cap) {
    if (n_steps == 0 || n_steps > cap)
        throw std::invalid_argument("srw_persistence_dp: n_steps outside (0, cap]");
    // counts[h] = number of +-1 paths of length k with all prefix sums in the
    // admissible region, ending at height h. Heights <= k + 1.
    std::vector<Rational> curve(n_steps + 1);
    curve[0] = 1;
    const unsigned h_max = n_steps + 1;
    std::vector<BigInt> counts(h_max + 2, BigInt(0));
    std::vector<BigInt> next(h_max + 2, BigInt(0));
    counts[1] = 1;  // step 1 must go up in both modes (0 fails strict, -1 fails weak)
    curve[1] = Rational(1, 2);
    const unsigned h_min = strict ? 1 : 0;
    for (unsigned k = 2; k <= n_steps; ++k) {
        const unsigned top = std::min(h_max, k + 1);
        for (unsigned h = h_min; h <= top; ++h) {
            BigInt v = 0;
            if (h >= 1) v += counts[h - 1];
            v += counts[h + 1];
            next[h] = std::move(v);
        }
        if (h_min == 1) next[0] = 0;
        for (unsigned h = top + 1; h < next.size(); ++h) next[h] = 0;
        std::swap(counts, next);
        BigInt survivors = 0;
        for (const auto& c : counts) survivors += c;
        curve[k] = Rational(survivors, BigInt(1) << k);
    }
    return curve;
}

Rational srw_persistence_dp(unsigned n_steps, bool strict, unsigned cap) {
    return srw_persistence_dp_curve(n_steps, strict, cap).back();
}

ExactPersistenceResult counterexample_a(const WeightVector& x, const EnumerationOptions& opts) {
    const unsigned n = x.size();
    for (unsigned i = 0; i < n; ++i) {
        if (x.magnitudes[i] <= 0)
            throw std::invalid_argument("counterexample_a: x must be strictly positive");
        if (i + 1 < n && x.magnitudes[i] < x.magnitudes[i + 1])
            throw std::invalid_argument("counterexample_a: x must be sorted in descending order");
    }
    return enumerate_persistence(x, SignPermutationLaw::constrained_signs(n), opts);
}

Rational counterexample_a_single_positive_value(const WeightVector& x) {
    const unsigned n = x.size();
    Rational rest = 0;
    for (unsigned i = 1; i < n; ++i) rest += x.magnitudes[i];
    if (x.magnitudes[0] > rest) return Rational(1, 2 * n * n);
    return Rational(0);
}

DependentLawSearch find_sign_dependent_law() {
    const unsigned n = 3;
    const std::uint64_t n_perms = 6;
    const std::uint32_t n_masks = 8;
    const auto x_separated = WeightVector::from_integers({5, 2, 1});  // x1 > x2 + x3
    const auto x_clustered = WeightVector::from_integers({4, 3, 2});  // x1 < x2 + x3

    // Masks with eps_1 = +1 whose sigma assignment can matter for strict
    // persistence (bit i set means eps_{i+1} = -1).
    const std::uint32_t searchable[] = {0b010, 0b100, 0b110};

    for (std::uint64_t r0 = 0; r0 < n_perms; ++r0)
        for (std::uint64_t r1 = 0; r1 < n_perms; ++r1)
            for (std::uint64_t r2 = 0; r2 < n_perms; ++r2) {
                std::vector<std::vector<Rational>> table(
                    n_masks, std::vector<Rational>(n_perms, Rational(0)));
                for (std::uint32_t m = 0; m < n_masks; ++m) table[m][0] = Rational(1, 8);
                const std::uint64_t choice[] = {r0, r1, r2};
                for (int i = 0; i < 3; ++i) {
                    table[searchable[i]][0] = 0;
                    table[searchable[i]][choice[i]] = Rational(1, 8);
                }
                auto law = SignPermutationLaw::dependent_joint(n, std::move(table));
                EnumerationOptions opts;
                const auto res_sep = enumerate_persistence(x_separated, law, opts);
                const auto res_clu = enumerate_persistence(x_clustered, law, opts);
                if (res_sep.p_strict != res_clu.p_strict) {
                    DependentLawSearch found;
                    found.law = std::move(law);
                    found.p_strict_separated = res_sep.p_strict;
                    found.p_strict_clustered = res_clu.p_strict;
                    return found;
                }
            }
    throw std::runtime_error(
        "find_sign_dependent_law: exhaustive search found no distinguishing law (defect)");
}

CounterexampleB counterexample_b_search(const WeightVector& x, const EnumerationOptions& opts) {
    if (x.size() != 3) throw std::invalid_argument("counterexample_b_search: requires n = 3");
    if (!(x.magnitudes[0] > x.magnitudes[1] && x.magnitudes[1] > x.magnitudes[2] &&
          x.magnitudes[2] > 0))
        throw std::invalid_argument("counterexample_b_search: requires x1 > x2 > x3 > 0");
    auto search = find_sign_dependent_law();
    CounterexampleB out;
    out.result = enumerate_persistence(x, search.law, opts);
    out.law = std::move(search.law);
    out.p_strict_separated = search.p_strict_separated;
    out.p_strict_clustered = search.p_strict_clustered;
    return out;
}

}  // namespace sparre::oracle
