#pragma once

#include <fstream>
#include <json.hpp>

#include "qbethe/bethe.hpp"
#include "qbethe/roots.hpp"

// JSON schemas (versioned via a "schema" field):
//
//   qbethe.state/1   a chain state: nonzero amplitudes as (index, num, den)
//                    triples in exact mode or (index, re, im) in float mode;
//                    index = sum_k digit_k N^{k-1}, site 1 least significant.
//   qbethe.config/1  run configuration: chain, parameter sets or sampling
//                    request, mode, solver options.
//   qbethe.report/1  check results: one entry per check, deterministic
//                    ordering, no timestamps.
//
// Rational scalars are decimal strings "num" or "num/den"; complex values
// are [re, im] pairs of doubles.

namespace qbethe {

using Json = nlohmann::json;

inline Json rat_to_json(const Rat& r) { return r.str(); }

inline Rat rat_from_json(const Json& j) {
    if (j.is_number_integer()) return Rat(static_cast<long>(j.get<int64_t>()));
    if (j.is_string()) return Rat::from_string(j.get<std::string>());
    throw ConfigError("expected rational as string or integer");
}

inline Json sets_to_json(const ColoredSets<Rat>& sets) {
    Json out = Json::array();
    for (const auto& color : sets) {
        Json c = Json::array();
        for (const auto& v : color) c.push_back(rat_to_json(v));
        out.push_back(std::move(c));
    }
    return out;
}

inline ColoredSets<Rat> sets_from_json(const Json& j) {
    if (!j.is_array()) throw ConfigError("parameter sets must be an array of arrays");
    ColoredSets<Rat> sets;
    for (const auto& c : j) {
        if (!c.is_array()) throw ConfigError("each color must be an array");
        ParamSet<Rat> color;
        for (const auto& v : c) color.push_back(rat_from_json(v));
        sets.push_back(std::move(color));
    }
    return sets;
}

inline Json chain_to_json(const ChainSpec<Rat>& c) {
    Json j;
    j["rank"] = c.rank;
    j["length"] = c.length;
    j["q"] = rat_to_json(c.q);
    Json xi = Json::array(), tw = Json::array();
    for (const auto& x : c.xi) xi.push_back(rat_to_json(x));
    for (const auto& d : c.twist) tw.push_back(rat_to_json(d));
    j["inhomogeneities"] = std::move(xi);
    j["twist"] = std::move(tw);
    return j;
}

inline ChainSpec<Rat> chain_from_json(const Json& j) {
    ChainSpec<Rat> c;
    try {
        c.rank = j.at("rank").get<int>();
        c.length = j.at("length").get<int>();
        c.q = rat_from_json(j.at("q"));
        for (const auto& x : j.at("inhomogeneities")) c.xi.push_back(rat_from_json(x));
        for (const auto& d : j.at("twist")) c.twist.push_back(rat_from_json(d));
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed chain: ") + e.what());
    }
    validate(c);
    return c;
}

inline ChainSpec<Cplx> to_float_chain(const ChainSpec<Rat>& c) {
    ChainSpec<Cplx> f;
    f.rank = c.rank;
    f.length = c.length;
    f.q = ScalarTraits<Cplx>::from_rat(c.q);
    for (const auto& x : c.xi) f.xi.push_back(ScalarTraits<Cplx>::from_rat(x));
    for (const auto& d : c.twist) f.twist.push_back(ScalarTraits<Cplx>::from_rat(d));
    return f;
}

inline ColoredSets<Cplx> to_float_sets(const ColoredSets<Rat>& sets) {
    ColoredSets<Cplx> out(sets.size());
    for (size_t c = 0; c < sets.size(); ++c)
        for (const auto& v : sets[c]) out[c].push_back(ScalarTraits<Cplx>::from_rat(v));
    return out;
}

// ---- states ----

inline Json state_to_json(const ChainSpec<Rat>& chain, const Vector<Rat>& v) {
    Json j;
    j["schema"] = "qbethe.state/1";
    j["rank"] = chain.rank;
    j["length"] = chain.length;
    j["mode"] = "exact";
    Json amps = Json::array();
    for (long k = 0; k < v.size(); ++k) {
        if (v(k).is_zero()) continue;
        amps.push_back(Json::array({k, v(k).num_str(), v(k).den_str()}));
    }
    j["amplitudes"] = std::move(amps);
    return j;
}

inline Json state_to_json(const ChainSpec<Cplx>& chain, const Vector<Cplx>& v) {
    Json j;
    j["schema"] = "qbethe.state/1";
    j["rank"] = chain.rank;
    j["length"] = chain.length;
    j["mode"] = "float";
    Json amps = Json::array();
    for (long k = 0; k < v.size(); ++k) {
        if (v(k) == 0.0) continue;
        amps.push_back(Json::array({k, v(k).real(), v(k).imag()}));
    }
    j["amplitudes"] = std::move(amps);
    return j;
}

inline Vector<Rat> state_from_json(const Json& j, const ChainSpec<Rat>& chain) {
    try {
        if (j.at("schema").get<std::string>() != "qbethe.state/1")
            throw ConfigError("unknown state schema");
        if (j.at("rank").get<int>() != chain.rank ||
            j.at("length").get<int>() != chain.length)
            throw ConfigError("state dimensions do not match the chain");
        if (j.at("mode").get<std::string>() != "exact")
            throw ConfigError("expected an exact-mode state");
        Vector<Rat> v = Vector<Rat>::Zero(chain.dim());
        for (const auto& a : j.at("amplitudes")) {
            long idx = a.at(0).get<long>();
            if (idx < 0 || idx >= chain.dim()) throw ConfigError("amplitude index out of range");
            v(idx) = Rat::from_string(a.at(1).get<std::string>() + "/" +
                                      a.at(2).get<std::string>());
        }
        return v;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed state: ") + e.what());
    }
}

// Bethe vector with its construction metadata embedded.
inline Json bethe_state_to_json(const ChainSpec<Rat>& chain, const ColoredSets<Rat>& sets,
                                const Vector<Rat>& v) {
    Json j = state_to_json(chain, v);
    j["bethe"] = Json{{"chain", chain_to_json(chain)}, {"sets", sets_to_json(sets)}};
    return j;
}

// ---- run configuration ----

struct RunConfig {
    ChainSpec<Rat> chain;
    std::vector<int> cardinalities;      // used when sets are sampled
    ColoredSets<Rat> t_sets, u_sets;     // explicit sets (may be empty)
    bool has_t = false, has_u = false;
    uint64_t seed = 42;
    long magnitude = 16;
    int count = 3;                       // sample count for randomized checks
    std::string mode = "exact";
    SolveOptions solver;
    ColoredSets<Cplx> solver_guess;      // optional starting point
    std::vector<std::tuple<std::string, ColoredSets<Rat>, ColoredSets<Rat>>> hc_queries;
};

inline RunConfig default_config() {
    RunConfig cfg;
    cfg.chain = ChainSpec<Rat>{2, 3, Rat(3, 2), {Rat(2), Rat(3), Rat(5)},
                               {Rat(1), Rat(7, 4)}};
    cfg.cardinalities = {1};
    return cfg;
}

inline RunConfig config_from_json(const Json& j) {
    RunConfig cfg = default_config();
    try {
        if (j.contains("schema") && j.at("schema").get<std::string>() != "qbethe.config/1")
            throw ConfigError("unknown config schema");
        if (j.contains("chain")) cfg.chain = chain_from_json(j.at("chain"));
        if (j.contains("cardinalities")) {
            cfg.cardinalities.clear();
            for (const auto& r : j.at("cardinalities")) {
                int v = r.get<int>();
                if (v < 0) throw ConfigError("cardinalities must be >= 0");
                cfg.cardinalities.push_back(v);
            }
        } else {
            cfg.cardinalities.assign(cfg.chain.rank - 1, 0);
            cfg.cardinalities[0] = 1;
        }
        if (static_cast<int>(cfg.cardinalities.size()) != cfg.chain.rank - 1)
            throw ConfigError("need rank-1 cardinalities");
        if (j.contains("sets")) {
            const auto& s = j.at("sets");
            if (s.contains("t")) { cfg.t_sets = sets_from_json(s.at("t")); cfg.has_t = true; }
            if (s.contains("u")) { cfg.u_sets = sets_from_json(s.at("u")); cfg.has_u = true; }
        }
        if (j.contains("sampling")) {
            const auto& s = j.at("sampling");
            if (s.contains("seed")) cfg.seed = s.at("seed").get<uint64_t>();
            if (s.contains("magnitude")) cfg.magnitude = s.at("magnitude").get<long>();
            if (s.contains("count")) cfg.count = s.at("count").get<int>();
            if (cfg.magnitude < 2) throw ConfigError("sampling magnitude too small");
            if (cfg.count < 1) throw ConfigError("sampling count must be >= 1");
        }
        if (j.contains("mode")) {
            cfg.mode = j.at("mode").get<std::string>();
            if (cfg.mode != "exact" && cfg.mode != "float")
                throw ConfigError("mode must be 'exact' or 'float'");
        }
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            if (s.contains("tolerance")) cfg.solver.tolerance = s.at("tolerance").get<double>();
            if (s.contains("max_iterations"))
                cfg.solver.max_iterations = s.at("max_iterations").get<int>();
            if (s.contains("restarts")) cfg.solver.restarts = s.at("restarts").get<int>();
            if (cfg.solver.tolerance <= 0) throw ConfigError("solver tolerance must be > 0");
            if (s.contains("guess")) {
                // per color: arrays of [re, im] pairs
                for (const auto& color : s.at("guess")) {
                    ParamSet<Cplx> g;
                    for (const auto& v : color) {
                        if (!v.is_array() || v.size() != 2)
                            throw ConfigError("guess entries must be [re, im] pairs");
                        g.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
                    }
                    cfg.solver_guess.push_back(std::move(g));
                }
                if (cfg.solver_guess.size() != cfg.cardinalities.size())
                    throw ConfigError("guess needs one array per color");
                for (size_t c = 0; c < cfg.solver_guess.size(); ++c)
                    if (static_cast<int>(cfg.solver_guess[c].size()) != cfg.cardinalities[c])
                        throw ConfigError("guess sizes must match the cardinalities");
            }
        }
        if (j.contains("hc_queries")) {
            for (const auto& qj : j.at("hc_queries")) {
                std::string kind = qj.at("kind").get<std::string>();
                if (kind != "Z" && kind != "Zbar")
                    throw ConfigError("hc query kind must be 'Z' or 'Zbar'");
                cfg.hc_queries.emplace_back(kind, sets_from_json(qj.at("u")),
                                            sets_from_json(qj.at("t")));
            }
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

// ---- check results and reports ----

struct CheckResult {
    std::string name;
    bool pass = false;
    Json details;  // witnesses on failure, values of interest on success
};

inline Json report_to_json(const std::string& command, const RunConfig& cfg,
                           const std::vector<CheckResult>& checks) {
    Json j;
    j["schema"] = "qbethe.report/1";
    j["command"] = command;
    j["mode"] = cfg.mode;
    j["seed"] = cfg.seed;
    j["chain"] = chain_to_json(cfg.chain);
    Json arr = Json::array();
    int passed = 0;
    for (const auto& c : checks) {
        Json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        if (!c.details.is_null()) cj["details"] = c.details;
        arr.push_back(std::move(cj));
        if (c.pass) ++passed;
    }
    j["checks"] = std::move(arr);
    j["summary"] = Json{{"total", checks.size()},
                        {"passed", passed},
                        {"failed", checks.size() - passed}};
    bool all = passed == static_cast<int>(checks.size());
    j["pass"] = all;
    return j;
}

}  // namespace qbethe
