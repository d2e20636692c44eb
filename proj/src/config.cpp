#include "sparre/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace sparre::cli {

using nlohmann::ordered_json;

chains::BirthDeathChain ChainConfig::build() const {
    if (kind == "srw") {
        auto c = chains::BirthDeathChain::simple_random_walk(x_cap);
        return c;
    }
    if (kind == "bessel") {
        chains::EpsilonFn eps;
        if (epsilon_kind == "zero")
            eps = chains::EpsilonFn::zero();
        else if (epsilon_kind == "power_decay")
            eps = chains::EpsilonFn::power_decay(epsilon_c, epsilon_p);
        else if (epsilon_kind == "log_decay")
            eps = chains::EpsilonFn::log_decay(epsilon_c);
        else if (epsilon_kind == "table")
            eps = chains::EpsilonFn::table(epsilon_values);
        else
            throw ConfigError("chain.epsilon.kind: unknown '" + epsilon_kind + "'");
        chains::BesselLikeSpec spec{delta, eps, laziness};
        auto c = chains::BirthDeathChain::bessel_like(spec, eta, x_cap);
        c.set_id(display_id());
        return c;
    }
    if (kind == "table") {
        auto c = chains::BirthDeathChain::from_table(p0, rows, eta);
        c.set_id(display_id());
        return c;
    }
    throw ConfigError("chain.kind: unknown '" + kind + "'");
}

std::string ChainConfig::display_id() const {
    if (kind == "srw") return "srw";
    if (kind == "table") return "table";
    std::ostringstream os;
    os << "bessel(delta=" << delta;
    if (laziness > 0) os << ",lazy=" << laziness;
    if (epsilon_kind != "zero") os << ",eps=" << epsilon_kind;
    os << ")";
    return os.str();
}

chains::OddFunctional FunctionalConfig::build() const {
    if (kind == "identity") return chains::OddFunctional::identity();
    if (kind == "sign") return chains::OddFunctional::sign();
    if (kind == "power") return chains::OddFunctional::power(gamma);
    throw ConfigError("f.kind: unknown '" + kind + "'");
}

namespace {

// Fetch with type checking and a json-pointer-ish location in error messages.
template <typename T>
void load(const ordered_json& j, const std::string& where, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + "/" + key + ": " + e.what());
    }
}

void load_chain(const ordered_json& j, const std::string& where, ChainConfig& out) {
    auto it = j.find("chain");
    if (it == j.end()) return;
    const auto& cj = *it;
    const std::string cw = where + "/chain";
    load(cj, cw, "kind", out.kind);
    load(cj, cw, "delta", out.delta);
    load(cj, cw, "laziness", out.laziness);
    load(cj, cw, "eta", out.eta);
    load(cj, cw, "x_cap", out.x_cap);
    load(cj, cw, "p0", out.p0);
    if (auto ej = cj.find("epsilon"); ej != cj.end()) {
        load(*ej, cw + "/epsilon", "kind", out.epsilon_kind);
        load(*ej, cw + "/epsilon", "c", out.epsilon_c);
        load(*ej, cw + "/epsilon", "p", out.epsilon_p);
        load(*ej, cw + "/epsilon", "values", out.epsilon_values);
    }
    if (auto rj = cj.find("rows"); rj != cj.end()) {
        if (!rj->is_array()) throw ConfigError(cw + "/rows: expected an array of [p,q,r]");
        out.rows.clear();
        for (const auto& row : *rj) {
            if (!row.is_array() || row.size() != 3)
                throw ConfigError(cw + "/rows: each row must be [p,q,r]");
            out.rows.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
        }
    }
}

void load_functional(const ordered_json& j, const std::string& where, FunctionalConfig& out) {
    auto it = j.find("f");
    if (it == j.end()) return;
    load(*it, where + "/f", "kind", out.kind);
    load(*it, where + "/f", "gamma", out.gamma);
}

ordered_json chain_to_json(const ChainConfig& c) {
    ordered_json j{{"kind", c.kind}};
    if (c.kind == "bessel") {
        j["delta"] = c.delta;
        j["laziness"] = c.laziness;
        j["eta"] = c.eta;
        j["x_cap"] = c.x_cap;
        ordered_json ej{{"kind", c.epsilon_kind}};
        if (c.epsilon_kind == "power_decay") {
            ej["c"] = c.epsilon_c;
            ej["p"] = c.epsilon_p;
        } else if (c.epsilon_kind == "log_decay") {
            ej["c"] = c.epsilon_c;
        } else if (c.epsilon_kind == "table") {
            ej["values"] = c.epsilon_values;
        }
        j["epsilon"] = ej;
    } else if (c.kind == "table") {
        j["p0"] = c.p0;
        j["eta"] = c.eta;
        ordered_json rows = ordered_json::array();
        for (const auto& r : c.rows) rows.push_back({r.up, r.down, r.hold});
        j["rows"] = rows;
    } else {
        j["x_cap"] = c.x_cap;
    }
    return j;
}

ordered_json functional_to_json(const FunctionalConfig& f) {
    ordered_json j{{"kind", f.kind}};
    if (f.kind == "power") j["gamma"] = f.gamma;
    return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig cfg;
    load(j, "", "seed", cfg.seed);
    load(j, "", "threads", cfg.threads);
    load(j, "", "chunk_size", cfg.chunk_size);
    load(j, "", "out_dir", cfg.out_dir);
    load(j, "", "format", cfg.format);
    if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("/format: must be 'csv' or 'json'");
    if (cfg.chunk_size == 0) throw ConfigError("/chunk_size: must be positive");

    if (auto it = j.find("verify"); it != j.end()) {
        auto& v = cfg.verify;
        load(*it, "/verify", "enumeration_cap", v.enumeration_cap);
        load(*it, "/verify", "vectors_per_n", v.vectors_per_n);
        load(*it, "/verify", "w_law_n_max", v.w_law_n_max);
        load(*it, "/verify", "w_law_vectors_per_n", v.w_law_vectors_per_n);
        load(*it, "/verify", "convolution_n_max", v.convolution_n_max);
        load(*it, "/verify", "ladder_n_max", v.ladder_n_max);
        load(*it, "/verify", "g_cross_check_n_max", v.g_cross_check_n_max);
        load(*it, "/verify", "srw_dp_step_max", v.srw_dp_step_max);
    }
    if (auto it = j.find("enumerate"); it != j.end()) {
        load(*it, "/enumerate", "magnitudes", cfg.enumerate.magnitudes);
        load(*it, "/enumerate", "law", cfg.enumerate.law);
        load(*it, "/enumerate", "cap", cfg.enumerate.cap);
    }
    if (auto it = j.find("simulate"); it != j.end()) {
        load_chain(*it, "/simulate", cfg.simulate.chain);
        load_functional(*it, "/simulate", cfg.simulate.f);
        load(*it, "/simulate", "horizon", cfg.simulate.horizon);
        load(*it, "/simulate", "trials", cfg.simulate.trials);
        load(*it, "/simulate", "targets", cfg.simulate.targets);
        load(*it, "/simulate", "sandwich", cfg.simulate.sandwich);
    }
    if (auto it = j.find("scaling"); it != j.end()) {
        load_chain(*it, "/scaling", cfg.scaling.chain);
        load_functional(*it, "/scaling", cfg.scaling.f);
        load(*it, "/scaling", "targets", cfg.scaling.targets);
        load(*it, "/scaling", "horizons", cfg.scaling.horizons);
        load(*it, "/scaling", "trials", cfg.scaling.trials);
        load(*it, "/scaling", "tail_n_max", cfg.scaling.tail_n_max);
        load(*it, "/scaling", "assert_local_tail", cfg.scaling.assert_local_tail);
    }
    if (auto it = j.find("constants"); it != j.end()) {
        load(*it, "/constants", "alphas", cfg.constants.alphas);
        load(*it, "/constants", "draws", cfg.constants.draws);
    }
    return cfg;
}

std::string ExperimentConfig::to_json_text() const {
    ordered_json j;
    j["seed"] = seed;
    j["threads"] = threads;
    j["chunk_size"] = chunk_size;
    j["out_dir"] = out_dir;
    j["format"] = format;
    j["verify"] = {{"enumeration_cap", verify.enumeration_cap},
                   {"vectors_per_n", verify.vectors_per_n},
                   {"w_law_n_max", verify.w_law_n_max},
                   {"w_law_vectors_per_n", verify.w_law_vectors_per_n},
                   {"convolution_n_max", verify.convolution_n_max},
                   {"ladder_n_max", verify.ladder_n_max},
                   {"g_cross_check_n_max", verify.g_cross_check_n_max},
                   {"srw_dp_step_max", verify.srw_dp_step_max}};
    j["enumerate"] = {{"magnitudes", enumerate.magnitudes},
                      {"law", enumerate.law},
                      {"cap", enumerate.cap}};
    j["simulate"] = {{"chain", chain_to_json(simulate.chain)},
                     {"f", functional_to_json(simulate.f)},
                     {"horizon", simulate.horizon},
                     {"trials", simulate.trials},
                     {"targets", simulate.targets},
                     {"sandwich", simulate.sandwich}};
    j["scaling"] = {{"chain", chain_to_json(scaling.chain)},
                    {"f", functional_to_json(scaling.f)},
                    {"targets", scaling.targets},
                    {"horizons", scaling.horizons},
                    {"trials", scaling.trials},
                    {"tail_n_max", scaling.tail_n_max},
                    {"assert_local_tail", scaling.assert_local_tail}};
    j["constants"] = {{"alphas", constants.alphas}, {"draws", constants.draws}};
    return j.dump(2) + "\n";
}

}  // namespace sparre::cli
