#include "sparre/chains.hpp"

#include "sparre/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sparre::chains {

double EpsilonFn::operator()(long x) const {
    switch (kind) {
        case Kind::zero:
            return 0.0;
        case Kind::power_decay:
            return c * std::pow(static_cast<double>(x), -p);
        case Kind::log_decay:
            return c / std::log1p(static_cast<double>(x));
        case Kind::table:
            if (x >= 1 && static_cast<std::size_t>(x) <= values.size())
                return values[static_cast<std::size_t>(x - 1)];
            return 0.0;
    }
    return 0.0;
}

BirthDeathChain::Row BirthDeathChain::formula_row(long x) const {
    const double eps = spec_.epsilon(x);
    if (!std::isfinite(eps))
        throw std::invalid_argument("BirthDeathChain: epsilon function returned a non-finite value");
    double p = 0.5 * (1.0 - (spec_.delta + eps) / (2.0 * static_cast<double>(x)));
    p = std::clamp(p, eta_, 1.0 - eta_);
    const double r = spec_.laziness;
    return {(1.0 - r) * p, (1.0 - r) * (1.0 - p), r};
}

BirthDeathChain BirthDeathChain::bessel_like(const BesselLikeSpec& spec, double eta, long x_cap) {
    if (!(eta > 0.0 && eta < 0.5))
        throw std::invalid_argument("bessel_like: eta must lie in (0, 1/2)");
    if (!(spec.laziness >= 0.0 && spec.laziness < 1.0))
        throw std::invalid_argument("bessel_like: laziness must lie in [0, 1)");
    BirthDeathChain c;
    c.eta_ = eta;
    c.spec_ = spec;
    c.has_spec_ = true;
    c.closed_form_ = true;
    c.p0_ = 0.5 * (1.0 - spec.laziness);
    c.aperiodic_ = spec.laziness > 0.0;
    c.table_.reserve(static_cast<std::size_t>(x_cap));
    for (long x = 1; x <= x_cap; ++x) {
        const double eps = spec.epsilon(x);
        if (!std::isfinite(eps))
            throw std::invalid_argument("bessel_like: epsilon function returned a non-finite value");
        const double raw = 0.5 * (1.0 - (spec.delta + eps) / (2.0 * static_cast<double>(x)));
        const double p = std::clamp(raw, eta, 1.0 - eta);
        if (p != raw) ++c.clamp_count_;
        const double r = spec.laziness;
        c.table_.push_back({(1.0 - r) * p, (1.0 - r) * (1.0 - p), r});
    }
    return c;
}

BirthDeathChain BirthDeathChain::simple_random_walk(long x_cap) {
    BesselLikeSpec spec;  // delta = 0, eps = 0, laziness = 0
    auto c = bessel_like(spec, 0.25, x_cap);
    c.set_id("srw");
    return c;
}

BirthDeathChain BirthDeathChain::from_table(double p0, std::vector<Row> rows, double eta) {
    if (!(p0 > 0.0 && p0 <= 0.5))
        throw std::invalid_argument("from_table: p0 must lie in (0, 1/2]");
    BirthDeathChain c;
    c.p0_ = p0;
    c.eta_ = eta;
    c.aperiodic_ = p0 < 0.5;
    for (const auto& row : rows) {
        if (row.up < 0 || row.down < 0 || row.hold < 0 ||
            std::abs(row.up + row.down + row.hold - 1.0) > 1e-12)
            throw std::invalid_argument("from_table: rows must be nonnegative and sum to 1");
        if (row.hold > 0.0) c.aperiodic_ = true;
    }
    c.table_ = std::move(rows);
    return c;
}

BirthDeathChain::Row BirthDeathChain::at(long x) const {
    if (x < 1) throw std::out_of_range("BirthDeathChain::at: x must be >= 1");
    if (static_cast<std::size_t>(x) <= table_.size())
        return table_[static_cast<std::size_t>(x - 1)];
    if (closed_form_) return formula_row(x);
    throw std::out_of_range("BirthDeathChain::at: x beyond kernel table");
}

double OddFunctional::operator()(long long x) const {
    switch (kind) {
        case Kind::identity:
            return static_cast<double>(x);
        case Kind::sign:
            return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
        case Kind::power: {
            if (x == 0) return 0.0;
            const double mag = std::pow(static_cast<double>(x > 0 ? x : -x), gamma);
            return x > 0 ? mag : -mag;
        }
    }
    return 0.0;
}

std::string OddFunctional::name() const {
    switch (kind) {
        case Kind::identity:
            return "identity";
        case Kind::sign:
            return "sign";
        case Kind::power:
            return "power(" + std::to_string(gamma) + ")";
    }
    return "?";
}

OddFunctional OddFunctional::power(double gamma) {
    if (!(gamma > -1.0)) throw std::invalid_argument("OddFunctional::power: gamma must be > -1");
    return {Kind::power, gamma};
}

namespace {

inline long step_chain(const BirthDeathChain& chain, long x, double u) {
    if (x == 0) {
        const double p0 = chain.p0();
        if (u < p0) return 1;
        if (u < 2.0 * p0) return -1;
        return 0;
    }
    const auto row = chain.at(x > 0 ? x : -x);
    if (x > 0) {
        if (u < row.up) return x + 1;
        if (u < row.up + row.down) return x - 1;
        return x;
    }
    if (u < row.up) return x - 1;
    if (u < row.up + row.down) return x + 1;
    return x;
}

}  // namespace

PathSummary simulate_path(const BirthDeathChain& chain, const OddFunctional& f, long n,
                          SimMode mode, sampling::RandomStream& rng, bool collect_returns) {
    if (n < 1) throw std::invalid_argument("simulate_path: horizon must be >= 1");
    PathSummary out;
    out.n = n;
    out.strict_persisted = true;
    out.weak_persisted = true;
    if (collect_returns) out.return_times.emplace();

    long x = 0;
    double zeta = 0.0;
    for (long k = 1; k <= n; ++k) {
        x = step_chain(chain, x, rng.next_double());
        if (x == 0) {
            ++out.local_time;
            if (collect_returns) out.return_times->push_back(k);
        }
        zeta += f(x);
        if (out.strict_persisted && zeta <= 0.0) {
            out.strict_persisted = false;
            out.first_failure = k;
        }
        if (out.weak_persisted && zeta < 0.0) out.weak_persisted = false;
        out.steps_simulated = k;
        out.endpoint = x;
        if (mode == SimMode::strict && !out.strict_persisted) break;
        if (mode == SimMode::weak && !out.weak_persisted) break;
    }
    return out;
}

RecurrenceReport classify_recurrence(const BirthDeathChain& chain, long x_max) {
    RecurrenceReport rep;
    double log_lambda = 0.0;
    double lambda_sum = 0.0;
    double pi_term = 1.0;
    double pi_sum = 1.0;
    double prev_up = chain.p0();
    // Slope of log(lambda_x) vs log(x) over the second half of the range.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long fit_count = 0;
    for (long x = 1; x <= x_max; ++x) {
        const auto row = chain.at(x);
        log_lambda += std::log(row.down) - std::log(row.up);
        lambda_sum += std::exp(std::min(log_lambda, 700.0));
        pi_term *= prev_up / row.down;
        pi_sum += 2.0 * pi_term;
        prev_up = row.up;
        if (2 * x >= x_max) {
            const double lx = std::log(static_cast<double>(x));
            sx += lx;
            sy += log_lambda;
            sxx += lx * lx;
            sxy += lx * log_lambda;
            ++fit_count;
        }
    }
    rep.lambda_partial_sum = lambda_sum;
    rep.pi_partial_sum = pi_sum;
    if (fit_count >= 2 && sxx * fit_count - sx * sx > 0)
        rep.lambda_log_slope = (fit_count * sxy - sx * sy) / (fit_count * sxx - sx * sx);

    if (chain.has_bessel_spec()) {
        const double delta = chain.bessel_spec().delta;
        const double margin = 1e-9;
        rep.rule = "bessel drift rule";
        if (delta < -1.0 - margin)
            rep.classification = RecurrenceClass::transient;
        else if (delta > 1.0 + margin)
            rep.classification = RecurrenceClass::positive_recurrent;
        else if (delta > -1.0 + margin && delta < 1.0 - margin)
            rep.classification = RecurrenceClass::null_recurrent;
        else
            rep.classification = RecurrenceClass::inconclusive;  // critical delta in {-1, 1}
        return rep;
    }

    // Numeric trend for explicit kernels: recurrence iff sum lambda_x
    // diverges (lambda_x ~ x^s diverges for s > -1), positive recurrence iff
    // sum pi_x converges. Calls it only when the trends are unambiguous over
    // the window.
    rep.rule = "numeric trend";
    const bool lambda_diverging = rep.lambda_log_slope > -0.8;
    const bool lambda_converging = rep.lambda_log_slope < -1.2;
    const double pi_tail_estimate = pi_term * static_cast<double>(x_max);
    const bool pi_converging = pi_tail_estimate < 1e-6 * pi_sum;
    const bool pi_diverging = pi_tail_estimate > 1e-2 * pi_sum;
    if (lambda_converging)
        rep.classification = RecurrenceClass::transient;
    else if (lambda_diverging && pi_converging)
        rep.classification = RecurrenceClass::positive_recurrent;
    else if (lambda_diverging && pi_diverging)
        rep.classification = RecurrenceClass::null_recurrent;
    else
        rep.classification = RecurrenceClass::inconclusive;
    return rep;
}

Tau1Distribution tau1_tail(const BirthDeathChain& chain, long n_max, long height_cap) {
    if (n_max < 1 || n_max > 100000)
        throw std::invalid_argument("tau1_tail: n_max outside [1, 1e5]");
    if (height_cap <= 0)
        height_cap = std::min<long>(
            n_max + 1,
            std::max<long>(64, static_cast<long>(20.0 * std::sqrt(static_cast<double>(n_max)))));

    Tau1Distribution out;
    out.n_max = n_max;
    out.height_cap = height_cap;
    out.tail.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    out.mu.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    out.tail[0] = 1.0;

    const auto h = static_cast<std::size_t>(height_cap);
    std::vector<double> alive(h + 2, 0.0);
    std::vector<double> next(h + 2, 0.0);

    // Step 1 from the origin: hold = immediate return, otherwise |X_1| = 1.
    const double r0 = 1.0 - 2.0 * chain.p0();
    alive[1] = 2.0 * chain.p0();
    out.tail[1] = 1.0 - r0;
    out.mu[1] = r0;

    std::vector<BirthDeathChain::Row> rows(h + 1);
    for (std::size_t x = 1; x <= h; ++x) rows[x] = chain.at(static_cast<long>(x));

    for (long k = 2; k <= n_max; ++k) {
        const double returned = alive[1] * rows[1].down;
        out.lost_mass += alive[h] * rows[h].up;
        const std::size_t top = std::min<std::size_t>(h, static_cast<std::size_t>(k));
        for (std::size_t x = 1; x <= top; ++x) {
            double v = alive[x] * rows[x].hold;
            if (x >= 2) v += alive[x - 1] * rows[x - 1].up;
            if (x + 1 <= h) v += alive[x + 1] * rows[x + 1].down;
            next[x] = v;
        }
        for (std::size_t x = top + 1; x <= h; ++x) next[x] = 0.0;
        std::swap(alive, next);
        out.tail[k] = out.tail[k - 1] - returned;
        out.mu[k] = out.mu[k - 1] + static_cast<double>(k) * returned;
    }

    // Tail exponent on a geometric grid over the upper decades.
    if (n_max >= 64) {
        std::vector<std::array<double, 3>> pts;
        const long lo = std::max<long>(16, n_max / 256);
        for (double v = static_cast<double>(lo); v <= static_cast<double>(n_max); v *= 2.0) {
            const long k = std::min<long>(n_max, static_cast<long>(v));
            if (out.tail[k] > 0) pts.push_back({static_cast<double>(k), out.tail[k], 0.0});
        }
        if (pts.size() >= 4) {
            const auto fit = asymptotics::fit_power_law(pts);
            out.alpha_fit = -fit.exponent;
            out.alpha_fit_stderr = fit.exponent_stderr;
        }
    }
    return out;
}

double Tau1Distribution::mean_estimate() const {
    const double remaining = tail[static_cast<std::size_t>(n_max)];
    double correction = static_cast<double>(n_max) * remaining;
    if (alpha_fit > 1.0) correction *= alpha_fit / (alpha_fit - 1.0);
    return mu[static_cast<std::size_t>(n_max)] + correction;
}

double expected_return_time_stationary(const BirthDeathChain& chain, long x_max, double tol) {
    double term = 1.0;
    double sum = 1.0;
    double prev_up = chain.p0();
    for (long x = 1; x <= x_max; ++x) {
        const auto row = chain.at(x);
        term *= prev_up / row.down;
        sum += 2.0 * term;
        prev_up = row.up;
        if (term < tol * sum) break;
    }
    return sum;
}

}  // namespace sparre::chains
