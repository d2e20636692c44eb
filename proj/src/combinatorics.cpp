#include "sparre/combinatorics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sparre::combinatorics {

BigInt double_factorial_odd(unsigned n) {
    BigInt r = 1;
    for (unsigned k = 1; k <= n; ++k) r *= 2 * k - 1;
    return r;
}

static BigInt central_binomial(unsigned n) {
    // binom(2n, n) = prod_{i=1}^{n} (n+i)/i, every partial product exact.
    BigInt r = 1;
    for (unsigned i = 1; i <= n; ++i) {
        r *= n + i;
        r /= i;
    }
    return r;
}

Rational g_exact(unsigned n) {
    return Rational(central_binomial(n), BigInt(1) << (2 * n));
}

Rational g_exact_recurrence(unsigned n) {
    Rational g = 1;
    for (unsigned k = 1; k <= n; ++k) g *= Rational(2 * k - 1, 2 * k);
    return g;
}

std::vector<double> g_float_table(unsigned n_max) {
    std::vector<double> t(n_max + 1);
    t[0] = 1.0;
    for (unsigned k = 1; k <= n_max; ++k)
        t[k] = t[k - 1] * (1.0 - 0.5 / static_cast<double>(k));
    return t;
}

double g_float(unsigned n) {
    double g = 1.0;
    for (unsigned k = 1; k <= n; ++k) g *= 1.0 - 0.5 / static_cast<double>(k);
    return g;
}

std::pair<double, double> g_bounds(unsigned n) {
    if (n == 0) throw std::invalid_argument("g_bounds: n must be >= 1");
    const double pi = std::numbers::pi;
    return {1.0 / std::sqrt(pi * (n + 0.5)), 1.0 / std::sqrt(pi * n)};
}

Rational convolution_identity_residual(unsigned n_max) {
    if (n_max < 1) throw std::invalid_argument("convolution_identity_residual: n_max must be >= 1");
    // Work with the integer numerators B(l) = binom(2l, l); the common
    // denominator of sum_l g(l) g(n-l) is 4^n, so the identity reads
    // sum_l B(l) B(n-l) = 4^n.
    std::vector<BigInt> b(n_max + 1);
    b[0] = 1;
    for (unsigned l = 1; l <= n_max; ++l) {
        b[l] = b[l - 1] * 2 * (2 * l - 1);
        b[l] /= l;
    }
    Rational max_residual = 0;
    for (unsigned n = 1; n <= n_max; ++n) {
        BigInt s = 0;
        for (unsigned l = 0; l <= n; ++l) s += b[l] * b[n - l];
        BigInt diff = (BigInt(1) << (2 * n)) - s;
        if (diff < 0) diff = -diff;
        Rational residual(diff, BigInt(1) << (2 * n));
        if (residual > max_residual) max_residual = residual;
    }
    return max_residual;
}

std::vector<Rational> ladder_epoch_pmf(unsigned n_max) {
    if (n_max < 1) throw std::invalid_argument("ladder_epoch_pmf: n_max must be >= 1");
    // 1 - sqrt(1-s) = sum_{n>=1} a_n s^n with a_1 = 1/2 and
    // a_n = a_{n-1} * (2n-3)/(2n).
    std::vector<Rational> pmf(n_max + 1);  // pmf[0] unused, kept 0
    pmf[1] = Rational(1, 2);
    for (unsigned n = 2; n <= n_max; ++n)
        pmf[n] = pmf[n - 1] * Rational(2 * n - 3, 2 * n);
    pmf.erase(pmf.begin());
    return pmf;
}

std::vector<Rational> ladder_epoch_pmf_from_differences(unsigned n_max) {
    if (n_max < 1) throw std::invalid_argument("ladder_epoch_pmf_from_differences: n_max must be >= 1");
    std::vector<Rational> pmf(n_max);
    Rational prev = 1;  // g(0)
    Rational g = 1;
    for (unsigned n = 1; n <= n_max; ++n) {
        g *= Rational(2 * n - 1, 2 * n);
        pmf[n - 1] = prev - g;
        prev = g;
    }
    return pmf;
}

SparreSequence SparreSequence::build(unsigned n_max) {
    SparreSequence s;
    s.n_max = n_max;
    s.values.resize(n_max + 1);
    s.values[0] = 1;
    for (unsigned k = 1; k <= n_max; ++k)
        s.values[k] = s.values[k - 1] * Rational(2 * k - 1, 2 * k);
    s.float_values = g_float_table(n_max);
    return s;
}

}  // namespace sparre::combinatorics
