#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace sparre::asymptotics {

// Slowly varying modulation of the return-time tail, always an explicit
// input (formula id + parameters), never silently fitted.
struct SlowlyVarying {
    std::string id = "const(1)";
    std::function<double(double)> fn = [](double) { return 1.0; };

    double operator()(double n) const { return fn(n); }

    static SlowlyVarying constant(double c);
    static SlowlyVarying inverse_log(double c);  // c / log n
    static SlowlyVarying custom(std::string id, std::function<double(double)> fn);
};

enum class Regime { positive_recurrent, alpha_1, alpha_in_01, alpha_0 };

// Tail exponent alpha, slowly varying ell, and the matching regime for the
// normalization b_n and constants c_alpha, c'_alpha.
struct AsymptoticsSpec {
    double alpha = 0.5;
    SlowlyVarying ell;
    Regime regime = Regime::alpha_in_01;

    static AsymptoticsSpec for_alpha(double alpha, SlowlyVarying ell);
    static AsymptoticsSpec positive_recurrent();
};

// Normalization of the local time:
//   alpha = 1 (or positive recurrent)  ->  n / mu(n)   (mu table required)
//   alpha in (0,1)                     ->  n^alpha / ell(n)
//   alpha = 0                          ->  1 / ell(n)
double b_n(const AsymptoticsSpec& spec, const std::vector<double>* mu_table, double n);

// c_alpha = 1 at alpha = 1, sqrt(pi) at alpha = 0, else
// Gamma(1-alpha)^{1/2} E[Z_alpha^{alpha/2}] via the Mellin moment oracle.
double c_alpha(double alpha);

// c'_alpha = alpha Gamma(1-alpha)^{-1/2} E[Z_alpha^{-alpha/2}], alpha in (0,1).
double c_prime_alpha(double alpha);

// mu(n) = E[tau_1 1{tau_1 <= n}] from a tail table tail[k] = P(tau_1 > k).
double mu_truncated(const std::vector<double>& tail, long n);

struct PowerLawFit {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double intercept = 0.0;  // log-scale intercept
    int n_points = 0;
};

// Weighted least squares of log(value) on log(n); points are
// (n, value, half_width) with half-width at 3 sigma (0 = exact).
PowerLawFit fit_power_law(const std::vector<std::array<double, 3>>& points);

struct Band {
    double lower = 0.0;
    double upper = 0.0;
};

enum class EnvelopeKind { persistence, bridge };

// Predicted asymptotic band at horizon n.
//   persistence: [p0(1-p0), 1] * c_alpha / sqrt(pi b_n)
//   bridge:      [p0, 1] * K_alpha * period * sqrt(b_n) / (n sqrt(pi)),
//                K_alpha = c'_alpha for alpha in (0,1), 1 for alpha = 1 /
//                positive recurrent.
// `period` is the chain period (2 for the un-lazified walk; bridge values at
// even horizons carry the lattice factor). Bridge envelopes for
// alpha <= 2/3 are refused unless assert_local_tail is set (the caller
// vouches for P(tau_1 = n) <= C ell(n) n^{-(1+alpha)}).
Band envelope(const AsymptoticsSpec& spec, const std::vector<double>* mu_table, double n,
              EnvelopeKind kind, double p0 = 0.5, int period = 1,
              bool assert_local_tail = false);

}  // namespace sparre::asymptotics
