#pragma once

#include "sparre/rational.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sparre::oracle {

// Nonnegative magnitudes x = (x_1, ..., x_n). All oracle arithmetic on these
// is exact rational.
struct WeightVector {
    std::vector<Rational> magnitudes;

    unsigned size() const { return static_cast<unsigned>(magnitudes.size()); }

    // Hypothesis (H): all 2^n subset sums pairwise distinct. Exact check by
    // sorting the subset sums; n is capped at 20.
    bool satisfies_distinct_subset_sums() const;

    static WeightVector from_integers(const std::vector<long long>& values);
};

// Joint law of the sign vector eps in {-1,1}^n and the permutation sigma.
// Masks encode signs bitwise: bit i set means eps_{i+1} = -1. Permutations
// are ranked lexicographically.
struct SignPermutationLaw {
    enum class Kind { independent_uniform, constrained_signs, dependent_joint };

    Kind kind = Kind::independent_uniform;
    unsigned n = 0;

    // dependent_joint only: joint_weights[mask][perm_rank], exact, summing
    // to 1 overall.
    std::vector<std::vector<Rational>> joint_weights;

    static SignPermutationLaw independent_uniform(unsigned n);

    // eps uniform on {sum of signs in {2-n, n-2}} (exactly one -1 or exactly
    // one +1), sigma uniform and independent.
    static SignPermutationLaw constrained_signs(unsigned n);

    static SignPermutationLaw dependent_joint(unsigned n,
                                              std::vector<std::vector<Rational>> weights);

    // Throws std::invalid_argument on negative weights or total != 1.
    void validate() const;

    // Marginal of the sign vector; used to confirm uniformity for searched laws.
    std::vector<Rational> sign_marginal() const;
};

struct ExactPersistenceResult {
    unsigned n = 0;
    BigInt strict_count = 0;       // outcomes with all prefix sums > 0
    BigInt weak_count = 0;         // outcomes with all prefix sums >= 0
    BigInt total = 0;              // 2^n n! for counting laws, else the common denominator
    Rational p_strict;
    Rational p_weak;
    Rational p_first_positive;     // P(xi_1 > 0), exact, for the g(n-1) lower bound
    std::vector<Rational> w_distribution;  // P(W = l), l = 0..n; W = first argmax of S_0..S_n
};

struct EnumerationOptions {
    unsigned cap = 8;      // hard cap on n for exhaustive enumeration
    int threads = 0;       // 0 = OpenMP default
};

// Exhaustive enumeration of all (sign, permutation) outcomes with exact
// arithmetic. Signs are visited in Gray-code order with running prefix sums;
// permutations in lexicographic order, partitioned into blocks across
// threads. The result is identical for any worker count.
ExactPersistenceResult enumerate_persistence(const WeightVector& x,
                                             const SignPermutationLaw& law,
                                             const EnumerationOptions& opts = {});

// Plain nested-loop implementation, no incremental updates, no threading.
// Kept as the independent reference the optimized kernel is tested and
// benchmarked against.
ExactPersistenceResult enumerate_persistence_reference(const WeightVector& x,
                                                       const SignPermutationLaw& law,
                                                       const EnumerationOptions& opts = {});

struct WDistributionCheck {
    bool pass = false;
    std::vector<Rational> residuals;  // P(W=l) - g(l) g(n-l), all must be 0
    ExactPersistenceResult result;
};

// Verifies P(W = l) = g(l) g(n-l) under the independent uniform law.
// Rejects vectors violating (H).
WDistributionCheck w_distribution_check(const WeightVector& x,
                                        const EnumerationOptions& opts = {});

// Exact persistence probability of the simple symmetric +-1 walk by dynamic
// programming on the height profile. strict: P(S_k > 0 for all k <= n_steps);
// weak: P(S_k >= 0 ...).
Rational srw_persistence_dp(unsigned n_steps, bool strict, unsigned cap = 10000);

// Whole survival curve in one DP pass: entry k is the persistence
// probability at horizon k, k = 0..n_steps.
std::vector<Rational> srw_persistence_dp_curve(unsigned n_steps, bool strict,
                                               unsigned cap = 10000);

// p_strict under the constrained-signs law. Requires x strictly positive and
// sorted in descending order.
ExactPersistenceResult counterexample_a(const WeightVector& x,
                                        const EnumerationOptions& opts = {});

// The closed-form value one gets by counting only the single-positive sign
// patterns: 1/(2n^2) if x_1 > x_2 + ... + x_n, else 0. Recorded in reports
// next to the oracle value; not asserted (the constrained law also admits
// survivors among single-negative patterns).
Rational counterexample_a_single_positive_value(const WeightVector& x);

struct DependentLawSearch {
    SignPermutationLaw law;
    Rational p_strict_separated;  // value at the reference vector with x1 > x2 + x3
    Rational p_strict_clustered;  // value at the reference vector with x1 < x2 + x3
};

// Searches (exhaustively, over deterministic sigma-given-eps assignments with
// uniform eps marginal) for a dependent joint law whose strict persistence
// probability distinguishes x1 > x2 + x3 from x1 < x2 + x3 at n = 3.
// Deterministic; throws std::runtime_error if no law is found.
DependentLawSearch find_sign_dependent_law();

struct CounterexampleB {
    SignPermutationLaw law;
    ExactPersistenceResult result;      // oracle value at the given x
    Rational p_strict_separated;
    Rational p_strict_clustered;
};

// Requires n = 3 and x1 > x2 > x3 > 0.
CounterexampleB counterexample_b_search(const WeightVector& x,
                                        const EnumerationOptions& opts = {});

}  // namespace sparre::oracle
