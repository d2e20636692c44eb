#pragma once

#include "sparre/rational.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace sparre::combinatorics {

// The universal persistence sequence
//   g(n) = binom(2n, n) / 4^n = (2n-1)!! / (2n)!! = prod_{k<=n} (1 - 1/(2k)),
// the exact survival probability of prefix sums of n exchangeable
// sign-invariant atomless random variables.

// g(n) as a reduced rational, via the binomial formula.
Rational g_exact(unsigned n);

// g(n) via the multiplicative recurrence g(n) = g(n-1) * (1 - 1/(2n)).
// Algebraically identical to g_exact; kept separate so tests can compare
// the two routes for exact equality.
Rational g_exact_recurrence(unsigned n);

// Float table g(0..n_max) by the same recurrence. Safe to large n_max:
// no factorials, error grows like n_max * eps.
std::vector<double> g_float_table(unsigned n_max);

// Single float value.
double g_float(unsigned n);

// (1/sqrt(pi*(n+1/2)), 1/sqrt(pi*n)); contains g(n) for every n >= 1.
// Throws std::invalid_argument for n = 0.
std::pair<double, double> g_bounds(unsigned n);

// max over 1 <= n <= n_max of |1 - sum_{l=0}^{n} g(l) g(n-l)|, exact.
// The convolution identity says this is exactly zero.
Rational convolution_identity_residual(unsigned n_max);

// P(T1 = n), n = 1..n_max, for the weak ladder epoch T1 of a symmetric
// atomless walk: Taylor coefficients of 1 - sqrt(1-s).
std::vector<Rational> ladder_epoch_pmf(unsigned n_max);

// Same law via the telescoping route P(T1 = n) = g(n-1) - g(n).
// Must agree with ladder_epoch_pmf term by term; a discrepancy is a defect.
std::vector<Rational> ladder_epoch_pmf_from_differences(unsigned n_max);

// Precomputed table of exact and float values. Immutable after build;
// safe for concurrent reads.
struct SparreSequence {
    unsigned n_max = 0;
    std::vector<Rational> values;       // g(0..n_max), exact
    std::vector<double> float_values;   // g(0..n_max), double recurrence

    static SparreSequence build(unsigned n_max);
};

// (2n-1)!! -- the exact count of surviving outcomes out of 2^n * n! in the
// enumeration oracle.
BigInt double_factorial_odd(unsigned n);

}  // namespace sparre::combinatorics
