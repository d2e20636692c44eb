#include "sparre/asymptotics.hpp"

#include "sparre/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sparre::asymptotics {

SlowlyVarying SlowlyVarying::constant(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("SlowlyVarying::constant: c must be > 0");
    return {"const(" + std::to_string(c) + ")", [c](double) { return c; }};
}

SlowlyVarying SlowlyVarying::inverse_log(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("SlowlyVarying::inverse_log: c must be > 0");
    return {"inverse_log(" + std::to_string(c) + ")",
            [c](double n) { return c / std::log(n); }};
}

SlowlyVarying SlowlyVarying::custom(std::string id, std::function<double(double)> fn) {
    return {std::move(id), std::move(fn)};
}

AsymptoticsSpec AsymptoticsSpec::for_alpha(double alpha, SlowlyVarying ell) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("AsymptoticsSpec: alpha must lie in [0, 1]");
    AsymptoticsSpec spec;
    spec.alpha = alpha;
    spec.ell = std::move(ell);
    if (alpha == 0.0)
        spec.regime = Regime::alpha_0;
    else if (alpha == 1.0)
        spec.regime = Regime::alpha_1;
    else
        spec.regime = Regime::alpha_in_01;
    return spec;
}

AsymptoticsSpec AsymptoticsSpec::positive_recurrent() {
    AsymptoticsSpec spec;
    spec.alpha = 1.0;
    spec.regime = Regime::positive_recurrent;
    return spec;
}

double b_n(const AsymptoticsSpec& spec, const std::vector<double>* mu_table, double n) {
    if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0))
        throw std::invalid_argument("b_n: alpha must lie in [0, 1]");
    switch (spec.regime) {
        case Regime::positive_recurrent:
        case Regime::alpha_1: {
            if (mu_table == nullptr)
                throw std::invalid_argument("b_n: alpha = 1 requires a truncated-mean table");
            const auto idx = static_cast<std::size_t>(n);
            if (idx >= mu_table->size())
                throw std::invalid_argument("b_n: truncated-mean table does not cover n");
            return n / (*mu_table)[idx];
        }
        case Regime::alpha_in_01:
            return std::pow(n, spec.alpha) / spec.ell(n);
        case Regime::alpha_0:
            return 1.0 / spec.ell(n);
    }
    throw std::logic_error("b_n: unknown regime");
}

double c_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("c_alpha: alpha must lie in [0, 1]");
    if (alpha == 0.0) return std::sqrt(std::numbers::pi);
    if (alpha == 1.0) return 1.0;
    return std::sqrt(std::tgamma(1.0 - alpha)) * sampling::fractional_moment(alpha, alpha / 2.0);
}

double c_prime_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("c_prime_alpha: alpha must lie in (0, 1)");
    return alpha / std::sqrt(std::tgamma(1.0 - alpha)) *
           sampling::fractional_moment(alpha, -alpha / 2.0);
}

double mu_truncated(const std::vector<double>& tail, long n) {
    if (n < 1 || static_cast<std::size_t>(n) >= tail.size())
        throw std::invalid_argument("mu_truncated: tail table does not cover [1, n]");
    double mu = 0.0;
    for (long k = 1; k <= n; ++k)
        mu += static_cast<double>(k) *
              (tail[static_cast<std::size_t>(k - 1)] - tail[static_cast<std::size_t>(k)]);
    return mu;
}

PowerLawFit fit_power_law(const std::vector<std::array<double, 3>>& points) {
    if (points.size() < 4)
        throw std::invalid_argument("fit_power_law: need at least 4 points");
    const std::size_t m = points.size();
    std::vector<double> x(m), y(m), w(m);
    bool any_width = false;
    for (std::size_t i = 0; i < m; ++i) {
        const auto [n, value, half_width] = points[i];
        if (!(n > 0.0) || !(value > 0.0))
            throw std::invalid_argument("fit_power_law: n and value must be positive");
        x[i] = std::log(n);
        y[i] = std::log(value);
        const double sigma_log = half_width / (3.0 * value);
        w[i] = sigma_log > 0.0 ? 1.0 / (sigma_log * sigma_log) : -1.0;
        if (sigma_log > 0.0) any_width = true;
    }
    if (any_width) {
        // Exact points among noisy ones get the largest finite weight seen.
        double w_max = 0.0;
        for (double v : w)
            if (v > w_max) w_max = v;
        for (double& v : w)
            if (v < 0.0) v = w_max;
    } else {
        for (double& v : w) v = 1.0;
    }

    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    if (det <= 0) throw std::invalid_argument("fit_power_law: degenerate abscissae");
    PowerLawFit fit;
    fit.n_points = static_cast<int>(m);
    fit.exponent = (sw * swxy - swx * swy) / det;
    fit.intercept = (swy - fit.exponent * swx) / sw;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = y[i] - fit.intercept - fit.exponent * x[i];
        rss += w[i] * r * r;
    }
    const double dof = static_cast<double>(m) - 2.0;
    const double s2 = rss / dof;
    fit.exponent_stderr = std::sqrt(s2 * sw / det);
    return fit;
}

Band envelope(const AsymptoticsSpec& spec, const std::vector<double>* mu_table, double n,
              EnvelopeKind kind, double p0, int period, bool assert_local_tail) {
    if (!(p0 > 0.0 && p0 <= 0.5)) throw std::invalid_argument("envelope: p0 must lie in (0, 1/2]");
    const double b = b_n(spec, mu_table, n);
    const double pi = std::numbers::pi;
    if (kind == EnvelopeKind::persistence) {
        const double upper = c_alpha(spec.regime == Regime::positive_recurrent ? 1.0 : spec.alpha) /
                             std::sqrt(pi * b);
        return {p0 * (1.0 - p0) * upper, upper};
    }
    double k_alpha = 1.0;
    switch (spec.regime) {
        case Regime::positive_recurrent:
        case Regime::alpha_1:
            k_alpha = 1.0;
            break;
        case Regime::alpha_in_01:
            if (spec.alpha <= 2.0 / 3.0 && !assert_local_tail)
                throw std::invalid_argument(
                    "envelope: bridge asymptotics for alpha <= 2/3 need the local-tail "
                    "condition asserted by the caller");
            k_alpha = c_prime_alpha(spec.alpha);
            break;
        case Regime::alpha_0:
            throw std::invalid_argument("envelope: no bridge asymptotics at alpha = 0");
    }
    const double upper =
        k_alpha * static_cast<double>(period) * std::sqrt(b) / (n * std::sqrt(pi));
    return {p0 * upper, upper};
}

}  // namespace sparre::asymptotics
