#pragma once

#include "sparre/sampling.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sparre::chains {

// Perturbation eps_x in the Bessel-like kernel; must vanish as x -> infinity.
struct EpsilonFn {
    enum class Kind { zero, power_decay, log_decay, table };

    Kind kind = Kind::zero;
    double c = 0.0;
    double p = 1.0;                // power_decay: eps_x = c * x^{-p}
    std::vector<double> values;    // table: eps_x = values[x-1], 0 beyond

    double operator()(long x) const;

    static EpsilonFn zero() { return {}; }
    static EpsilonFn power_decay(double c, double p) {
        return {Kind::power_decay, c, p, {}};
    }
    static EpsilonFn log_decay(double c) { return {Kind::log_decay, c, 1.0, {}}; }
    static EpsilonFn table(std::vector<double> values) {
        return {Kind::table, 0.0, 1.0, std::move(values)};
    }
};

struct BesselLikeSpec {
    double delta = 0.0;       // drift parameter
    EpsilonFn epsilon;        // vanishing perturbation
    double laziness = 0.0;    // holding probability in [0,1)
};

// Symmetric birth-death kernel on Z: from x >= 1 move to x+1 with p_x, to
// x-1 with q_x, hold with r_x; mirrored for x < 0; from 0 move to +-1 with
// p0 each. Immutable after construction.
class BirthDeathChain {
public:
    struct Row {
        double up = 0.5;
        double down = 0.5;
        double hold = 0.0;
    };

    // Eq-style Bessel-like kernel: p_x = (1 - (delta + eps_x)/(2x)) / 2 for
    // x >= 1, clamped into [eta, 1-eta], then lazified; p0 = (1-laziness)/2.
    static BirthDeathChain bessel_like(const BesselLikeSpec& spec, double eta,
                                       long x_cap = 1 << 16);

    static BirthDeathChain simple_random_walk(long x_cap = 1 << 16);

    // Explicit kernel rows for x = 1..table.size(); queries beyond the table
    // throw std::out_of_range.
    static BirthDeathChain from_table(double p0, std::vector<Row> rows, double eta);

    // Kernel row at |x| >= 1 (closed-form fallback past the cached range for
    // Bessel-like chains).
    Row at(long x) const;

    double p0() const { return p0_; }
    double eta() const { return eta_; }
    bool aperiodic() const { return aperiodic_; }
    long clamp_count() const { return clamp_count_; }

    bool has_bessel_spec() const { return has_spec_; }
    const BesselLikeSpec& bessel_spec() const { return spec_; }

    const std::string& id() const { return id_; }
    void set_id(std::string id) { id_ = std::move(id); }

private:
    Row formula_row(long x) const;

    std::vector<Row> table_;  // rows for x = 1..x_cap
    double p0_ = 0.5;
    double eta_ = 0.0;
    bool aperiodic_ = false;
    bool closed_form_ = false;
    bool has_spec_ = false;
    BesselLikeSpec spec_;
    long clamp_count_ = 0;
    std::string id_ = "chain";
};

// Odd sign-preserving functional f: identity, sign, or |x|^gamma sign(x)
// with gamma > -1.
struct OddFunctional {
    enum class Kind { identity, sign, power };

    Kind kind = Kind::identity;
    double gamma = 1.0;

    double operator()(long long x) const;
    std::string name() const;

    static OddFunctional identity() { return {Kind::identity, 1.0}; }
    static OddFunctional sign() { return {Kind::sign, 1.0}; }
    static OddFunctional power(double gamma);
};

enum class SimMode {
    strict,       // may stop at the first k with zeta_k <= 0
    weak,         // may stop at the first k with zeta_k < 0
    bridge_full,  // always runs to the horizon (needed for X_n = 0 events)
};

struct PathSummary {
    long n = 0;                 // horizon
    long steps_simulated = 0;   // < n when an early-exit mode stopped
    long local_time = 0;        // visits to 0 among steps 1..steps_simulated
    long endpoint = 0;          // X at the last simulated step
    bool strict_persisted = false;
    bool weak_persisted = false;
    std::optional<long> first_failure;  // first k with zeta_k <= 0
    std::optional<std::vector<long>> return_times;
};

PathSummary simulate_path(const BirthDeathChain& chain, const OddFunctional& f, long n,
                          SimMode mode, sampling::RandomStream& rng,
                          bool collect_returns = false);

enum class RecurrenceClass { transient, null_recurrent, positive_recurrent, inconclusive };

struct RecurrenceReport {
    RecurrenceClass classification = RecurrenceClass::inconclusive;
    double lambda_partial_sum = 0.0;   // sum_{x<=x_max} prod_{k<=x} q_k/p_k
    double pi_partial_sum = 0.0;       // invariant-measure partial sum (pi_0 = 1)
    double lambda_log_slope = 0.0;     // fitted d log(lambda_x) / d log(x)
    std::string rule;                  // which criterion decided
};

// Classifies by the drift rule for Bessel-like kernels (transient delta < -1,
// recurrent delta > -1, positive recurrent delta > 1; inconclusive at the
// critical values) and reports the numeric lambda/pi trends for any chain.
RecurrenceReport classify_recurrence(const BirthDeathChain& chain, long x_max);

struct Tau1Distribution {
    long n_max = 0;
    std::vector<double> tail;  // tail[k] = P(tau_1 > k), k = 0..n_max
    std::vector<double> mu;    // mu[k] = E[tau_1 1{tau_1 <= k}]
    double lost_mass = 0.0;    // probability truncated at the height cap
    long height_cap = 0;
    double alpha_fit = 0.0;        // fitted tail exponent on a log-log grid
    double alpha_fit_stderr = 0.0;

    double pmf(long k) const { return tail[k - 1] - tail[k]; }

    // mu(n_max) plus a tail-mass correction; accurate when the tail decays
    // faster than 1/n (finite mean).
    double mean_estimate() const;
};

// Exact (up to truncation at the height cap) law of the first return time to
// 0, by forward DP on the reflected chain killed at 0. height_cap <= 0 picks
// a diffusive default.
Tau1Distribution tau1_tail(const BirthDeathChain& chain, long n_max, long height_cap = 0);

// E[tau_1] = 1/pi_0 from the stationary distribution (Kac). Independent of
// the DP route; only meaningful for positive-recurrent chains. Sums until
// the increment falls below tol or x_max is hit.
double expected_return_time_stationary(const BirthDeathChain& chain, long x_max = 1 << 20,
                                       double tol = 1e-15);

}  // namespace sparre::chains
