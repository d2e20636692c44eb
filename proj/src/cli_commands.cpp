#include "sparre/cli_commands.hpp"

#include "sparre/asymptotics.hpp"
#include "sparre/combinatorics.hpp"
#include "sparre/exact_oracle.hpp"
#include "sparre/persistence.hpp"
#include "sparre/sampling.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sparre::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ordered_json rational_to_json(const Rational& r) {
    return ordered_json{{"num", rational_num(r).str()}, {"den", rational_den(r).str()}};
}

void write_text_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

fs::path out_path(const ExperimentConfig& cfg, const std::string& name) {
    return fs::path(cfg.out_dir) / name;
}

// ------------------------------- verify -----------------------------------

oracle::WeightVector random_h_vector(unsigned n, sampling::RandomStream& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<long long> values(n);
        for (auto& v : values) v = static_cast<long long>(rng.next_below(100000)) + 1;
        auto x = oracle::WeightVector::from_integers(values);
        if (x.satisfies_distinct_subset_sums()) return x;
    }
    throw std::runtime_error("random_h_vector: rejection sampling failed");
}

oracle::WeightVector random_h_violating(unsigned n, sampling::RandomStream& rng) {
    std::vector<long long> values(n);
    for (auto& v : values) v = static_cast<long long>(rng.next_below(1000)) + 1;
    // A repeated entry makes two singleton subset sums collide.
    const auto i = static_cast<std::size_t>(rng.next_below(n));
    auto j = static_cast<std::size_t>(rng.next_below(n));
    if (j == i) j = (i + 1) % n;
    values[j] = values[i];
    return oracle::WeightVector::from_integers(values);
}

struct SuiteResult {
    std::string name;
    std::string status;  // exact-pass | fail | skipped(...) | error(...)
    std::string detail;
    double seconds = 0.0;
};

class SuiteRunner {
public:
    explicit SuiteRunner(std::ostream& log) : log_(log) {}

    void run(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
        SuiteResult r;
        r.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            auto [pass, detail] = body();
            r.status = pass ? "exact-pass" : "fail";
            r.detail = detail;
        } catch (const std::invalid_argument& e) {
            r.status = std::string("error(") + e.what() + ")";
        } catch (const std::runtime_error& e) {
            r.status = std::string("error(") + e.what() + ")";
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r.status != "exact-pass") all_pass_ = false;
        log_ << "[" << r.status << "] " << r.name;
        if (!r.detail.empty()) log_ << " -- " << r.detail;
        char buf[32];
        std::snprintf(buf, sizeof buf, " (%.2fs)", r.seconds);
        log_ << buf << '\n';
        results_.push_back(std::move(r));
    }

    bool all_pass() const { return all_pass_; }
    const std::vector<SuiteResult>& results() const { return results_; }

private:
    std::ostream& log_;
    std::vector<SuiteResult> results_;
    bool all_pass_ = true;
};

}  // namespace

int cmd_verify(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& v = cfg.verify;
    SuiteRunner suites(log);

    suites.run("g two routes (recurrence vs binomial)", [&]() -> std::pair<bool, std::string> {
        const auto seq = combinatorics::SparreSequence::build(v.g_cross_check_n_max);
        for (unsigned n = 0; n <= v.g_cross_check_n_max; ++n)
            if (seq.values[n] != combinatorics::g_exact(n))
                return {false, "mismatch at n=" + std::to_string(n)};
        return {true, "n <= " + std::to_string(v.g_cross_check_n_max)};
    });

    suites.run("g bounds and asymptotics", [&]() -> std::pair<bool, std::string> {
        const auto g = combinatorics::g_float_table(v.g_cross_check_n_max);
        for (unsigned n = 1; n <= v.g_cross_check_n_max; ++n) {
            const auto [lo, hi] = combinatorics::g_bounds(n);
            if (!(lo <= g[n] && g[n] <= hi))
                return {false, "bounds violated at n=" + std::to_string(n)};
            if (g[n] >= g[n - 1]) return {false, "monotonicity violated at n=" + std::to_string(n)};
            if (n >= 10) {
                const double dev = std::abs(g[n] * std::sqrt(std::numbers::pi * n) - 1.0);
                if (!(dev < 0.25 / n))
                    return {false, "sqrt(pi n) normalization off at n=" + std::to_string(n)};
            }
        }
        return {true, "n <= " + std::to_string(v.g_cross_check_n_max)};
    });

    suites.run("convolution identity", [&]() -> std::pair<bool, std::string> {
        const auto residual = combinatorics::convolution_identity_residual(v.convolution_n_max);
        return {residual == 0,
                "max residual " + rational_str(residual) + " up to n=" +
                    std::to_string(v.convolution_n_max)};
    });

    suites.run("ladder-epoch pmf two routes", [&]() -> std::pair<bool, std::string> {
        const auto series = combinatorics::ladder_epoch_pmf(v.ladder_n_max);
        const auto diffs = combinatorics::ladder_epoch_pmf_from_differences(v.ladder_n_max);
        if (series != diffs) return {false, "series and g-difference routes disagree"};
        Rational sum = 0;
        for (const auto& p : series) sum += p;
        if (sum != 1 - combinatorics::g_exact(v.ladder_n_max))
            return {false, "telescoping sum mismatch"};
        return {true, "n <= " + std::to_string(v.ladder_n_max)};
    });

    oracle::EnumerationOptions opts;
    opts.cap = std::max(10u, v.enumeration_cap);
    opts.threads = cfg.threads;

    suites.run("exchangeable sign-invariant identity ((H) vectors)",
               [&]() -> std::pair<bool, std::string> {
                   if (v.enumeration_cap > 10) throw std::invalid_argument("enumeration cap > 10");
                   sampling::RandomStream rng(cfg.seed, 101);
                   for (unsigned n = 1; n <= v.enumeration_cap; ++n) {
                       const auto g = combinatorics::g_exact(n);
                       const auto expected_count = combinatorics::double_factorial_odd(n);
                       for (unsigned i = 0; i < v.vectors_per_n; ++i) {
                           const auto x = random_h_vector(n, rng);
                           const auto law = oracle::SignPermutationLaw::independent_uniform(n);
                           const auto res = oracle::enumerate_persistence(x, law, opts);
                           if (res.p_strict != g || res.p_weak != g)
                               return {false, "probability mismatch at n=" + std::to_string(n)};
                           if (res.strict_count != expected_count)
                               return {false, "count mismatch at n=" + std::to_string(n)};
                       }
                   }
                   return {true, std::to_string(v.vectors_per_n) + " vectors per n <= " +
                                     std::to_string(v.enumeration_cap)};
               });

    suites.run("general inequality ((H)-violating vectors)",
               [&]() -> std::pair<bool, std::string> {
                   sampling::RandomStream rng(cfg.seed, 102);
                   for (unsigned n = 2; n <= v.enumeration_cap; ++n) {
                       const auto g = combinatorics::g_exact(n);
                       const auto g_prev = combinatorics::g_exact(n - 1);
                       for (unsigned i = 0; i < v.vectors_per_n; ++i) {
                           const auto x = random_h_violating(n, rng);
                           const auto law = oracle::SignPermutationLaw::independent_uniform(n);
                           const auto res = oracle::enumerate_persistence(x, law, opts);
                           if (!(res.p_strict <= g && g <= res.p_weak))
                               return {false, "sandwich violated at n=" + std::to_string(n)};
                           if (res.p_strict < res.p_first_positive * g_prev)
                               return {false, "first-step lower bound violated at n=" +
                                                  std::to_string(n)};
                       }
                   }
                   return {true, std::to_string(v.vectors_per_n) + " vectors per n <= " +
                                     std::to_string(v.enumeration_cap)};
               });

    suites.run("argmax location law", [&]() -> std::pair<bool, std::string> {
        sampling::RandomStream rng(cfg.seed, 103);
        for (unsigned n = 1; n <= v.w_law_n_max; ++n) {
            for (unsigned i = 0; i < v.w_law_vectors_per_n; ++i) {
                const auto x = random_h_vector(n, rng);
                const auto check = oracle::w_distribution_check(x, opts);
                if (!check.pass) return {false, "residual nonzero at n=" + std::to_string(n)};
                if (check.result.w_distribution[n] != check.result.p_strict)
                    return {false, "P(W=n) != p_strict at n=" + std::to_string(n)};
                if (check.result.w_distribution[0] != check.result.p_weak)
                    return {false, "P(W=0) != p_weak at n=" + std::to_string(n)};
            }
        }
        return {true, "n <= " + std::to_string(v.w_law_n_max)};
    });

    suites.run("simple-walk DP closed forms", [&]() -> std::pair<bool, std::string> {
        const unsigned steps = v.srw_dp_step_max;
        const auto strict_curve = oracle::srw_persistence_dp_curve(steps, true);
        const auto weak_curve = oracle::srw_persistence_dp_curve(steps, false);
        const auto seq = combinatorics::SparreSequence::build(steps / 2);
        for (unsigned m = 1; 2 * m <= steps; ++m) {
            if (strict_curve[2 * m] != seq.values[m] / 2)
                return {false, "strict != g(m)/2 at m=" + std::to_string(m)};
            if (weak_curve[2 * m] != seq.values[m])
                return {false, "weak != g(m) at m=" + std::to_string(m)};
        }
        return {true, "even horizons up to " + std::to_string(steps)};
    });

    Rational cex_a_first, cex_a_second;
    suites.run("constrained-sign law depends on x", [&]() -> std::pair<bool, std::string> {
        const auto x1 = oracle::WeightVector::from_integers({5, 2, 1});
        const auto x2 = oracle::WeightVector::from_integers({10, 1, 1});
        const auto r1 = oracle::counterexample_a(x1, opts);
        const auto r2 = oracle::counterexample_a(x2, opts);
        cex_a_first = r1.p_strict;
        cex_a_second = r2.p_strict;
        std::string detail = "p(5,2,1)=" + rational_str(r1.p_strict) +
                             " p(10,1,1)=" + rational_str(r2.p_strict) +
                             " single-positive claims " +
                             rational_str(oracle::counterexample_a_single_positive_value(x1)) +
                             ", " +
                             rational_str(oracle::counterexample_a_single_positive_value(x2));
        return {r1.p_strict != r2.p_strict, detail};
    });

    Rational cex_b_above, cex_b_below;
    suites.run("sign-permutation dependence law (search)", [&]() -> std::pair<bool, std::string> {
        const auto found = oracle::find_sign_dependent_law();
        cex_b_above = found.p_strict_separated;
        cex_b_below = found.p_strict_clustered;
        const auto marginal = found.law.sign_marginal();
        for (const auto& m : marginal)
            if (m != Rational(1, 8)) return {false, "sign marginal not uniform"};
        return {found.p_strict_separated != found.p_strict_clustered,
                "p(x1>x2+x3)=" + rational_str(found.p_strict_separated) +
                    " p(x1<x2+x3)=" + rational_str(found.p_strict_clustered)};
    });

    ordered_json report;
    report["command"] = "verify";
    report["seed"] = cfg.seed;
    report["suites"] = ordered_json::array();
    for (const auto& r : suites.results())
        report["suites"].push_back(ordered_json{{"name", r.name},
                                                {"status", r.status},
                                                {"detail", r.detail}});
    report["counterexample_a"] = ordered_json{{"p_strict(5,2,1)", rational_str(cex_a_first)},
                                              {"p_strict(10,1,1)", rational_str(cex_a_second)}};
    report["counterexample_b"] = ordered_json{{"p_strict_separated", rational_str(cex_b_above)},
                                              {"p_strict_clustered", rational_str(cex_b_below)}};
    report["status"] = suites.all_pass() ? "pass" : "fail";
    write_text_file(out_path(cfg, "verify_report.json"), report.dump(2) + "\n");
    log << (suites.all_pass() ? "verify: all identity suites exact-pass\n"
                              : "verify: FAILURES present\n");
    return suites.all_pass() ? 0 : 1;
}

// ------------------------------ enumerate ---------------------------------

int cmd_enumerate(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& ec = cfg.enumerate;
    oracle::WeightVector x;
    for (const auto& text : ec.magnitudes) x.magnitudes.push_back(rational_parse(text));
    const unsigned n = x.size();
    if (n == 0) throw ConfigError("/enumerate/magnitudes: empty");

    oracle::EnumerationOptions opts;
    opts.cap = ec.cap;
    opts.threads = cfg.threads;

    oracle::SignPermutationLaw law = oracle::SignPermutationLaw::independent_uniform(n);
    ordered_json extra;
    if (ec.law == "independent_uniform") {
        // default
    } else if (ec.law == "constrained_signs") {
        law = oracle::SignPermutationLaw::constrained_signs(n);
    } else if (ec.law == "dependent_searched") {
        if (n != 3) throw ConfigError("/enumerate/law: dependent_searched requires n = 3");
        auto found = oracle::find_sign_dependent_law();
        extra["search"] = ordered_json{
            {"p_strict_separated", rational_to_json(found.p_strict_separated)},
            {"p_strict_clustered", rational_to_json(found.p_strict_clustered)}};
        law = std::move(found.law);
    } else {
        throw ConfigError("/enumerate/law: unknown '" + ec.law + "'");
    }

    const auto res = oracle::enumerate_persistence(x, law, opts);

    ordered_json j;
    j["command"] = "enumerate";
    j["n"] = n;
    j["magnitudes"] = ec.magnitudes;
    j["law"] = ec.law;
    j["satisfies_distinct_subset_sums"] = x.satisfies_distinct_subset_sums();
    j["strict_count"] = res.strict_count.str();
    j["weak_count"] = res.weak_count.str();
    j["total"] = res.total.str();
    j["p_strict"] = rational_to_json(res.p_strict);
    j["p_weak"] = rational_to_json(res.p_weak);
    j["p_first_positive"] = rational_to_json(res.p_first_positive);
    j["w_distribution"] = ordered_json::array();
    for (const auto& w : res.w_distribution) j["w_distribution"].push_back(rational_to_json(w));
    if (ec.law == "constrained_signs")
        j["single_positive_value"] =
            rational_to_json(oracle::counterexample_a_single_positive_value(x));
    if (!extra.empty()) j.update(extra);
    write_text_file(out_path(cfg, "enumeration.json"), j.dump(2) + "\n");

    log << "enumerate: n=" << n << " p_strict=" << rational_str(res.p_strict)
        << " p_weak=" << rational_str(res.p_weak) << '\n';
    return 0;
}

// ------------------------------- simulate ---------------------------------

namespace {

std::string estimates_csv(const std::vector<persistence::PersistenceEstimate>& rows) {
    std::ostringstream os;
    os << "chain_id,target,n,point,half_width,trials,seed\n";
    for (const auto& e : rows)
        os << e.chain_id << ',' << persistence::target_name(e.target) << ',' << e.n << ','
           << fmt(e.point) << ',' << fmt(e.half_width_3sigma) << ',' << e.trials << ',' << e.seed
           << '\n';
    return os.str();
}

ordered_json estimate_to_json(const persistence::PersistenceEstimate& e) {
    return ordered_json{{"chain_id", e.chain_id},
                        {"target", persistence::target_name(e.target)},
                        {"n", e.n},
                        {"point", e.point},
                        {"half_width", e.half_width_3sigma},
                        {"trials", e.trials},
                        {"seed", e.seed},
                        {"stream", e.stream}};
}

void write_estimates(const ExperimentConfig& cfg, const std::string& stem,
                     const std::vector<persistence::PersistenceEstimate>& rows) {
    if (cfg.format == "csv") {
        write_text_file(out_path(cfg, stem + ".csv"), estimates_csv(rows));
    } else {
        ordered_json j = ordered_json::array();
        for (const auto& e : rows) j.push_back(estimate_to_json(e));
        write_text_file(out_path(cfg, stem + ".json"), j.dump(2) + "\n");
    }
}

ordered_json sandwich_to_json(const persistence::SandwichReport& rep) {
    ordered_json j;
    j["chain_id"] = rep.chain_id;
    j["n"] = rep.n;
    j["trials"] = rep.trials;
    j["seed"] = rep.seed;
    j["p0"] = rep.p0;
    j["estimates"] = ordered_json::object();
    for (const auto& e : rep.estimates)
        j["estimates"][persistence::target_name(e.target)] =
            ordered_json{{"point", e.point}, {"half_width", e.half_width_3sigma}};
    j["checks"] = ordered_json::array();
    for (const auto& c : rep.checks)
        j["checks"].push_back(ordered_json{{"name", c.name},
                                           {"bound", c.bound},
                                           {"value", c.value},
                                           {"slack", c.slack},
                                           {"pass", c.pass}});
    j["pass"] = rep.pass;
    return j;
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& sc = cfg.simulate;
    const auto chain = sc.chain.build();
    const auto f = sc.f.build();
    persistence::McOptions mc;
    mc.chunk_size = cfg.chunk_size;
    mc.threads = cfg.threads;

    std::vector<persistence::PersistenceEstimate> rows;
    std::uint64_t stream = 0;
    for (const auto& name : sc.targets) {
        const auto target = persistence::target_from_name(name);
        if (!target) throw ConfigError("/simulate/targets: unknown target '" + name + "'");
        sampling::RandomStream base(cfg.seed, ++stream);
        rows.push_back(
            persistence::estimate(chain, f, sc.horizon, *target, sc.trials, base, mc));
        log << "simulate: " << name << " n=" << sc.horizon << " -> " << fmt(rows.back().point)
            << " +- " << fmt(rows.back().half_width_3sigma) << '\n';
    }
    write_estimates(cfg, "estimates", rows);

    bool pass = true;
    if (sc.sandwich) {
        sampling::RandomStream base(cfg.seed, 999);
        const auto rep = persistence::sandwich_check(chain, f, sc.horizon, sc.trials, base, mc);
        write_text_file(out_path(cfg, "sandwich.json"), sandwich_to_json(rep).dump(2) + "\n");
        for (const auto& c : rep.checks)
            log << (c.pass ? "[pass] " : "[FAIL] ") << c.name << " (bound " << fmt(c.bound)
                << " vs " << fmt(c.value) << ", slack " << fmt(c.slack) << ")\n";
        pass = rep.pass;
    }
    return pass ? 0 : 1;
}

// -------------------------------- scaling ---------------------------------

namespace {

struct EnvelopeSetup {
    asymptotics::AsymptoticsSpec spec;
    std::vector<double> mu_table;  // filled for the positive-recurrent branch
    bool have = false;
    int period = 1;
};

// Derives the asymptotic regime from the drift of a Bessel-like chain and
// fits the scale of ell(n) = c L(sqrt n) on the exact tau_1 tail.
EnvelopeSetup make_envelope_setup(const chains::BirthDeathChain& chain,
                                  const chains::Tau1Distribution& tau, std::ostream& log) {
    EnvelopeSetup setup;
    if (!chain.has_bessel_spec()) {
        log << "scaling: explicit-table chain, envelopes skipped (no drift rule)\n";
        return setup;
    }
    const auto& spec = chain.bessel_spec();
    setup.period = chain.aperiodic() ? 1 : 2;
    if (spec.delta > 1.0) {
        setup.spec = asymptotics::AsymptoticsSpec::positive_recurrent();
        setup.mu_table = tau.mu;
        setup.have = true;
        return setup;
    }
    if (spec.delta <= -1.0) {
        log << "scaling: delta <= -1 (transient or boundary), envelopes skipped\n";
        return setup;
    }
    const double alpha = (1.0 + spec.delta) / 2.0;
    // L(sqrt n) from the epsilon sums; scale c fitted on the DP tail.
    const auto eps = spec.epsilon;
    auto big_l = [eps](double x) {
        double s = 0.0;
        const long top = static_cast<long>(x);
        for (long k = 1; k <= top; ++k) s += eps(k) / static_cast<double>(k);
        return std::exp(s);
    };
    double scale_sum = 0.0;
    int scale_count = 0;
    const long step = chain.aperiodic() ? 1 : 2;
    for (long k = tau.n_max / 2; k <= tau.n_max; k += std::max<long>(1, tau.n_max / 16)) {
        long n = k - (k % step);  // stay on the lattice of return times
        if (n < 1 || tau.tail[static_cast<std::size_t>(n)] <= 0) continue;
        scale_sum += tau.tail[static_cast<std::size_t>(n)] *
                     std::pow(static_cast<double>(n), alpha) / big_l(std::sqrt(n));
        ++scale_count;
    }
    if (scale_count == 0) {
        log << "scaling: tau tail vanished before the fit window, envelopes skipped\n";
        return setup;
    }
    const double c = scale_sum / scale_count;
    auto ell = asymptotics::SlowlyVarying::custom(
        "fit(" + fmt(c) + ")*L(sqrt(n))",
        [c, big_l](double n) { return c * big_l(std::sqrt(n)); });
    setup.spec = asymptotics::AsymptoticsSpec::for_alpha(alpha, std::move(ell));
    setup.have = true;
    return setup;
}

}  // namespace

int cmd_scaling(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& sc = cfg.scaling;
    if (sc.horizons.size() < 4) throw ConfigError("/scaling/horizons: need at least 4 horizons");
    for (std::size_t i = 2; i < sc.horizons.size(); ++i) {
        const double r0 = static_cast<double>(sc.horizons[1]) / sc.horizons[0];
        const double ri = static_cast<double>(sc.horizons[i]) / sc.horizons[i - 1];
        if (std::abs(ri - r0) > 0.02 * r0)
            throw ConfigError("/scaling/horizons: must form a geometric grid");
    }
    const long n_max = *std::max_element(sc.horizons.begin(), sc.horizons.end());
    if (sc.tail_n_max < n_max)
        throw ConfigError("/scaling/tail_n_max: must cover the largest horizon");

    const auto chain = sc.chain.build();
    const auto f = sc.f.build();
    persistence::McOptions mc;
    mc.chunk_size = cfg.chunk_size;
    mc.threads = cfg.threads;

    std::vector<persistence::Target> targets;
    for (const auto& name : sc.targets) {
        const auto t = persistence::target_from_name(name);
        if (!t) throw ConfigError("/scaling/targets: unknown target '" + name + "'");
        if (persistence::is_bridge(*t) && !chain.aperiodic())
            for (long h : sc.horizons)
                if (h % 2 != 0)
                    throw ConfigError(
                        "/scaling/horizons: bridge target on a periodic chain needs even "
                        "horizons");
        targets.push_back(*t);
    }

    log << "scaling: exact tau_1 DP to n=" << sc.tail_n_max << "...\n";
    const auto tau = chains::tau1_tail(chain, sc.tail_n_max);
    auto setup = make_envelope_setup(chain, tau, log);
    const bool need_bridge_env = std::any_of(targets.begin(), targets.end(),
                                             [](auto t) { return persistence::is_bridge(t); });
    if (setup.have && need_bridge_env && setup.spec.regime == asymptotics::Regime::alpha_in_01 &&
        setup.spec.alpha <= 2.0 / 3.0 && !sc.assert_local_tail)
        throw ConfigError(
            "/scaling/assert_local_tail: bridge envelopes for alpha <= 2/3 need the local-tail "
            "condition asserted");

    std::vector<persistence::PersistenceEstimate> rows;
    std::vector<std::array<double, 3>> fit_points;
    ordered_json fits = ordered_json::object();
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        fit_points.clear();
        for (std::size_t hi = 0; hi < sc.horizons.size(); ++hi) {
            sampling::RandomStream base(cfg.seed, 1024 * (ti + 1) + hi);
            const auto est = persistence::estimate(chain, f, sc.horizons[hi], targets[ti],
                                                   sc.trials, base, mc);
            rows.push_back(est);
            log << "scaling: " << persistence::target_name(targets[ti]) << " n=" << est.n
                << " -> " << fmt(est.point) << " +- " << fmt(est.half_width_3sigma) << '\n';
            if (est.point > 0.0)
                fit_points.push_back({static_cast<double>(est.n), est.point,
                                      est.half_width_3sigma});
        }
        if (fit_points.size() >= 4) {
            const auto fit = asymptotics::fit_power_law(fit_points);
            fits[persistence::target_name(targets[ti])] =
                ordered_json{{"exponent", fit.exponent},
                             {"stderr", fit.exponent_stderr},
                             {"intercept", fit.intercept},
                             {"points", fit.n_points}};
            log << "scaling: fit " << persistence::target_name(targets[ti]) << " exponent "
                << fmt(fit.exponent) << " +- " << fmt(fit.exponent_stderr) << '\n';
        }
    }
    write_estimates(cfg, "estimates", rows);
    write_text_file(out_path(cfg, "fits.json"), fits.dump(2) + "\n");

    std::ostringstream env;
    env << "chain_id,kind,n,lower,upper\n";
    if (setup.have) {
        const auto* mu = setup.mu_table.empty() ? nullptr : &setup.mu_table;
        for (long h : sc.horizons) {
            const auto band =
                asymptotics::envelope(setup.spec, mu, static_cast<double>(h),
                                      asymptotics::EnvelopeKind::persistence, chain.p0());
            env << chain.id() << ",persistence," << h << ',' << fmt(band.lower) << ','
                << fmt(band.upper) << '\n';
        }
        if (need_bridge_env) {
            for (long h : sc.horizons) {
                const auto band = asymptotics::envelope(
                    setup.spec, mu, static_cast<double>(h), asymptotics::EnvelopeKind::bridge,
                    chain.p0(), setup.period, sc.assert_local_tail);
                env << chain.id() << ",bridge," << h << ',' << fmt(band.lower) << ','
                    << fmt(band.upper) << '\n';
            }
        }
    }
    write_text_file(out_path(cfg, "envelopes.csv"), env.str());
    return 0;
}

// ------------------------------- constants --------------------------------

int cmd_constants(const ExperimentConfig& cfg, std::ostream& log) {
    const auto& cc = cfg.constants;
    persistence::McOptions mc;  // reuse chunking defaults for stable draws
    mc.chunk_size = cfg.chunk_size;
    mc.threads = cfg.threads;

    std::ostringstream csv;
    csv << "alpha,c_alpha,c_alpha_mc,c_alpha_rel_delta,c_prime,c_prime_mc,c_prime_rel_delta,"
           "flagged\n";
    ordered_json rows = ordered_json::array();
    bool any_flagged = false;
    std::uint64_t stream = 5000;
    for (double alpha : cc.alphas) {
        ordered_json row{{"alpha", alpha}};
        const double c = asymptotics::c_alpha(alpha);
        row["c_alpha"] = c;
        bool flagged = false;
        const bool interior = alpha > 0.0 && alpha < 1.0;
        double cp = 0, c_mc = 0, cp_mc = 0, rd_c = 0, rd_cp = 0;
        if (interior) {
            cp = asymptotics::c_prime_alpha(alpha);
            sampling::RandomStream base(cfg.seed, ++stream);
            const double m_pos = sampling::mc_fractional_moment(alpha, alpha / 2.0, cc.draws,
                                                                base, mc.chunk_size, mc.threads);
            sampling::RandomStream base2(cfg.seed, ++stream);
            const double m_neg = sampling::mc_fractional_moment(alpha, -alpha / 2.0, cc.draws,
                                                                base2, mc.chunk_size, mc.threads);
            c_mc = std::sqrt(std::tgamma(1.0 - alpha)) * m_pos;
            cp_mc = alpha / std::sqrt(std::tgamma(1.0 - alpha)) * m_neg;
            rd_c = std::abs(c_mc / c - 1.0);
            rd_cp = std::abs(cp_mc / cp - 1.0);
            flagged = rd_c > 0.01 || rd_cp > 0.01;
            row["c_prime"] = cp;
            row["c_alpha_mc"] = c_mc;
            row["c_prime_mc"] = cp_mc;
            row["c_alpha_rel_delta"] = rd_c;
            row["c_prime_rel_delta"] = rd_cp;
        }
        row["flagged"] = flagged;
        any_flagged = any_flagged || flagged;
        if (interior) {
            csv << fmt(alpha) << ',' << fmt(c) << ',' << fmt(c_mc) << ',' << fmt(rd_c) << ','
                << fmt(cp) << ',' << fmt(cp_mc) << ',' << fmt(rd_cp) << ','
                << (flagged ? "yes" : "no") << '\n';
            char line[160];
            std::snprintf(line, sizeof line,
                          "constants: alpha=%-4g c=%.6f (mc %.6f) c'=%.6f (mc %.6f)%s\n", alpha, c,
                          c_mc, cp, cp_mc, flagged ? " FLAGGED" : "");
            log << line;
        } else {
            csv << fmt(alpha) << ',' << fmt(c) << ",n/a,n/a,n/a,n/a,n/a,no\n";
            char line[96];
            std::snprintf(line, sizeof line, "constants: alpha=%-4g c=%.6f (boundary, mc n/a)\n",
                          alpha, c);
            log << line;
        }
        rows.push_back(row);
    }
    write_text_file(out_path(cfg, "constants.csv"), csv.str());
    write_text_file(out_path(cfg, "constants.json"), rows.dump(2) + "\n");
    return any_flagged ? 1 : 0;
}

}  // namespace sparre::cli
