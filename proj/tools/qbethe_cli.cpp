// Command-line verification driver: builds Bethe vectors, checks the
// operator identities and action formulas on explicit chains, evaluates
// scalar products and highest coefficients, and solves Bethe equations.
// Reports are JSON with a deterministic layout; with a fixed seed two runs
// produce byte-identical output.

#include <CLI11.hpp>
#include <atomic>
#include <fstream>
#include <iostream>
#include <thread>

#include "qbethe/actions.hpp"
#include "qbethe/roots.hpp"
#include "qbethe/sampling.hpp"
#include "qbethe/scalar_product.hpp"
#include "qbethe/serialization.hpp"

namespace qb = qbethe;
using qb::CheckResult;
using qb::ColoredSets;
using qb::Json;
using qb::Rat;
using qb::RunConfig;
using qb::Vector;

namespace {

struct Task {
    std::string name;
    std::function<CheckResult()> run;
};

std::vector<CheckResult> run_tasks(const std::vector<Task>& tasks, int jobs) {
    std::vector<CheckResult> results(tasks.size());
    if (jobs < 2) {
        for (size_t i = 0; i < tasks.size(); ++i) {
            try {
                results[i] = tasks[i].run();
            } catch (const std::exception& e) {
                results[i] = {tasks[i].name, false, Json{{"error", e.what()}}};
            }
        }
        return results;
    }
    std::atomic<size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                results[i] = tasks[i].run();
            } catch (const std::exception& e) {
                results[i] = {tasks[i].name, false, Json{{"error", e.what()}}};
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

qb::RationalSampler make_sampler(const RunConfig& cfg) {
    qb::RationalSampler samp(cfg.seed, cfg.magnitude);
    samp.set_q(cfg.chain.q);
    samp.reserve(cfg.chain.xi);
    return samp;
}

ColoredSets<Rat> sampled_sets(qb::RationalSampler& samp, const std::vector<int>& cards) {
    ColoredSets<Rat> sets(cards.size());
    for (size_t c = 0; c < cards.size(); ++c)
        for (int k = 0; k < cards[c]; ++k) sets[c].push_back(samp.next());
    return sets;
}

ColoredSets<Rat> config_t_sets(const RunConfig& cfg, qb::RationalSampler& samp) {
    if (cfg.has_t) return cfg.t_sets;
    return sampled_sets(samp, cfg.cardinalities);
}

ColoredSets<Rat> config_u_sets(const RunConfig& cfg, qb::RationalSampler& samp) {
    if (cfg.has_u) return cfg.u_sets;
    return sampled_sets(samp, cfg.cardinalities);
}

Vector<Rat> random_state(qb::RationalSampler& samp, long dim) {
    Vector<Rat> v(dim);
    for (long k = 0; k < dim; ++k) v(k) = samp.raw();
    return v;
}

bool is_zero_vec(const Vector<Rat>& v) {
    for (long k = 0; k < v.size(); ++k)
        if (!v(k).is_zero()) return false;
    return true;
}

Json partition_labels_json(const qb::PartitionAssignment& a) {
    return Json{{"first", a.first}, {"third", a.third}};
}

Json action_terms_json(const std::vector<qb::ActionTerm<Rat>>& terms) {
    Json arr = Json::array();
    for (const auto& t : terms)
        arr.push_back(Json{{"coefficient", t.coeff.str()},
                           {"partition", partition_labels_json(t.assignment)},
                           {"result_sets", qb::sets_to_json(t.result)}});
    return arr;
}

// ---- check families ----

std::vector<Task> yang_baxter_checks(const RunConfig& cfg) {
    auto samp = make_sampler(cfg);
    std::vector<Task> tasks;
    int trials = std::max(cfg.count, 3);
    for (int k = 0; k < trials; ++k) {
        Rat u = samp.next(), v = samp.next(), w = samp.next();
        std::string name = "yang-baxter rank=" + std::to_string(cfg.chain.rank) +
                           " triple#" + std::to_string(k);
        Rat q = cfg.chain.q;
        int n = cfg.chain.rank;
        tasks.push_back({name, [=]() -> CheckResult {
                             auto res = qb::yang_baxter_residual<Rat>(q, u, v, w, n);
                             bool zero = true;
                             for (int a = 0; a < res.rows() && zero; ++a)
                                 for (int b = 0; b < res.cols() && zero; ++b)
                                     if (!res(a, b).is_zero()) zero = false;
                             Json d{{"u", u.str()}, {"v", v.str()}, {"w", w.str()}};
                             return {name, zero, d};
                         }});
    }
    return tasks;
}

std::vector<Task> rll_checks(const RunConfig& cfg) {
    auto samp = make_sampler(cfg);
    std::vector<Task> tasks;
    const auto chain = cfg.chain;
    for (int k = 0; k < cfg.count; ++k) {
        Rat u = samp.next(), v = samp.next();
        Vector<Rat> s = random_state(samp, chain.dim());
        std::string name = "rll pair#" + std::to_string(k);
        tasks.push_back({name, [=]() -> CheckResult {
            const Rat& q = chain.q;
            for (int i = 1; i <= chain.rank; ++i)
                for (int j = 1; j <= chain.rank; ++j)
                    for (int a = 1; a <= chain.rank; ++a)
                        for (int b = 1; b <= chain.rank; ++b) {
                            Vector<Rat> lhs =
                                qb::apply_entry(chain, i, j, u, qb::apply_entry(chain, a, b, v, s)) -
                                qb::apply_entry(chain, a, b, v, qb::apply_entry(chain, i, j, u, s));
                            Vector<Rat> rhs =
                                qb::p_coeff(q, b, j, u, v) *
                                    qb::apply_entry(chain, a, j, v, qb::apply_entry(chain, i, b, u, s)) -
                                qb::p_coeff(q, i, a, u, v) *
                                    qb::apply_entry(chain, a, j, u, qb::apply_entry(chain, i, b, v, s));
                            if (!is_zero_vec(lhs - rhs))
                                return {name, false,
                                        Json{{"i", i}, {"j", j}, {"k", a}, {"l", b},
                                             {"u", u.str()}, {"v", v.str()}}};
                        }
            return {name, true, Json{{"u", u.str()}, {"v", v.str()}}};
        }});
    }
    return tasks;
}

std::vector<Task> vacuum_checks(const RunConfig& cfg) {
    auto samp = make_sampler(cfg);
    std::vector<Task> tasks;
    const auto chain = cfg.chain;
    int trials = std::max(cfg.count, 5);
    for (int k = 0; k < trials; ++k) {
        Rat z = samp.next();
        std::string name = "vacuum structure z#" + std::to_string(k);
        tasks.push_back({name, [=]() -> CheckResult {
            Vector<Rat> vac = qb::vacuum(chain);
            for (int i = 1; i <= chain.rank; ++i)
                for (int j = 1; j <= chain.rank; ++j) {
                    Vector<Rat> lv = qb::apply_entry(chain, i, j, z, vac);
                    Vector<Rat> rv = qb::apply_entry_dual(chain, i, j, z, vac);
                    if (i > j && !is_zero_vec(lv))
                        return {name, false, Json{{"entry", {i, j}}, {"side", "state"}}};
                    if (i < j && !is_zero_vec(rv))
                        return {name, false, Json{{"entry", {i, j}}, {"side", "costate"}}};
                    if (i == j) {
                        // eigenvector on both sides with the same eigenvalue
                        Rat lam = qb::lambda_eval(chain, i, z);
                        Vector<Rat> want = lam * vac;
                        if (!is_zero_vec(lv - want) || !is_zero_vec(rv - want))
                            return {name, false, Json{{"entry", {i, j}}}};
                    }
                }
            return {name, true, Json{{"z", z.str()}}};
        }});
    }
    return tasks;
}

std::vector<Task> zero_mode_checks(const RunConfig& cfg) {
    auto samp = make_sampler(cfg);
    std::vector<Task> tasks;
    const auto chain = cfg.chain;
    const Rat q = cfg.chain.q;
    const Rat qgap = q - Rat(1) / q;

    for (int k = 0; k < cfg.count; ++k) {
        Rat z = samp.next();
        Vector<Rat> s = random_state(samp, chain.dim());
        std::string name = "zero-mode commutation z#" + std::to_string(k);
        tasks.push_back({name, [=]() -> CheckResult {
            qb::ZeroModes<Rat> zm(chain);
            const int n = chain.rank;
            for (int i = 1; i <= n - 1; ++i)
                for (int j = 1; j <= n; ++j) {
                    Rat qd = (i == j) ? q : Rat(1);
                    Vector<Rat> lhs = qb::apply_entry(chain, i, j, z, zm.lower(i, s)) -
                                      qd * zm.lower(i, qb::apply_entry(chain, i, j, z, s));
                    Vector<Rat> rhs = Vector<Rat>::Zero(chain.dim());
                    if (i == j - 1)
                        rhs += qgap * zm.diag(j, qb::apply_entry(chain, i, i, z, s));
                    rhs -= qgap * qb::apply_entry(chain, i + 1, j, z, zm.diag(i, s));
                    if (!is_zero_vec(lhs - rhs))
                        return {name, false, Json{{"relation", "lower-left"}, {"i", i}, {"j", j}}};
                }
            for (int j = 2; j <= n; ++j)
                for (int i = 1; i <= n; ++i) {
                    Rat qd = (i == j) ? Rat(1) / q : Rat(1);
                    Vector<Rat> lhs = qd * zm.lower(j - 1, qb::apply_entry(chain, i, j, z, s)) -
                                      qb::apply_entry(chain, i, j, z, zm.lower(j - 1, s));
                    Vector<Rat> rhs = Vector<Rat>::Zero(chain.dim());
                    if (i == j - 1)
                        rhs += qgap * zm.diag(i, qb::apply_entry(chain, j, j, z, s));
                    rhs -= qgap * qb::apply_entry(chain, i, j - 1, z, zm.diag(j, s));
                    if (!is_zero_vec(lhs - rhs))
                        return {name, false, Json{{"relation", "lower-right"}, {"i", i}, {"j", j}}};
                }
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j)
                    for (int l = 1; l <= n; ++l) {
                        Rat qa = (l == i) ? q : Rat(1);
                        Rat qb_ = (l == j) ? q : Rat(1);
                        Vector<Rat> lhs = qa * qb::apply_entry(chain, i, j, z, zm.diag(l, s));
                        Vector<Rat> rhs = qb_ * zm.diag(l, qb::apply_entry(chain, i, j, z, s));
                        if (!is_zero_vec(lhs - rhs))
                            return {name, false,
                                    Json{{"relation", "diagonal"}, {"i", i}, {"j", j}, {"l", l}}};
                    }
            return {name, true, Json{{"z", z.str()}}};
        }});
    }

    ColoredSets<Rat> ts = [&] {
        auto s2 = make_sampler(cfg);
        return config_t_sets(cfg, s2);
    }();
    tasks.push_back({"zero-mode action on Bethe vector", [=]() -> CheckResult {
        qb::BetheBuilder<Rat> bb(chain);
        for (int i = 1; i <= chain.rank - 1; ++i) {
            auto chk = qb::verify_zero_mode_action(bb, i, ts);
            if (!chk.pass)
                return {"zero-mode action on Bethe vector", false,
                        Json{{"i", i}, {"mismatch_index", chk.mismatch_index}}};
        }
        return {"zero-mode action on Bethe vector", true,
                Json{{"sets", qb::sets_to_json(ts)}}};
    }});
    tasks.push_back({"diagonal zero-mode eigenvalue", [=]() -> CheckResult {
        qb::BetheBuilder<Rat> bb(chain);
        auto& zm = bb.zero_modes();
        Vector<Rat> b = bb.bethe(ts);
        auto r_of = [&](int p) -> long {
            if (p < 1 || p > chain.rank - 1) return 0;
            return static_cast<long>(ts[p - 1].size());
        };
        for (int i = 1; i <= chain.rank; ++i) {
            Vector<Rat> got = zm.diag(i, b);
            Vector<Rat> want = zm.kappa(i) * qb::pow_int(q, r_of(i) - r_of(i - 1)) * b;
            if (!is_zero_vec(got - want))
                return {"diagonal zero-mode eigenvalue", false, Json{{"i", i}}};
        }
        return {"diagonal zero-mode eigenvalue", true, Json{{"sets", qb::sets_to_json(ts)}}};
    }});
    return tasks;
}

std::vector<Task> action_checks(const RunConfig& cfg, long perturb) {
    auto samp = make_sampler(cfg);
    ColoredSets<Rat> ts = config_t_sets(cfg, samp);
    std::vector<Task> tasks;
    const auto chain = cfg.chain;
    for (int k = 0; k < cfg.count; ++k) {
        Rat z = samp.next();
        for (int i = 1; i <= chain.rank; ++i)
            for (int j = 1; j <= chain.rank; ++j) {
                std::string name = "action T_{" + std::to_string(i) + "," +
                                   std::to_string(j) + "} z#" + std::to_string(k);
                bool wiggle = perturb >= 0 && k == 0 && i == 1 && j == 1;
                tasks.push_back({name, [=]() -> CheckResult {
                    qb::BetheBuilder<Rat> bb(chain);
                    auto chk = qb::verify_single_action(bb, i, j, z,
                                                        ts, wiggle ? perturb : -1);
                    Json d{{"z", z.str()}, {"terms", chk.term_count}};
                    if (!chk.pass) {
                        d["mismatch_index"] = chk.mismatch_index;
                        auto terms = qb::single_action(bb, i, j, z, ts);
                        if (wiggle && perturb < static_cast<long>(terms.size()))
                            d["perturbed_term"] =
                                Json{{"index", perturb},
                                     {"coefficient", terms[perturb].coeff.str()},
                                     {"partition",
                                      partition_labels_json(terms[perturb].assignment)},
                                     {"result_sets", qb::sets_to_json(terms[perturb].result)}};
                        else
                            d["terms_detail"] = action_terms_json(terms);
                    }
                    return {name, chk.pass, d};
                }});
            }
    }
    return tasks;
}

std::vector<Task> multi_action_checks(const RunConfig& cfg) {
    auto samp = make_sampler(cfg);
    ColoredSets<Rat> ts = config_t_sets(cfg, samp);
    Rat z1 = samp.next(), z2 = samp.next();
    std::vector<Task> tasks;
    const auto chain = cfg.chain;
    for (int i = 1; i <= chain.rank; ++i)
        for (int j = 1; j <= chain.rank; ++j) {
            std::string name = "multiple action T_{" + std::to_string(i) + "," +
                               std::to_string(j) + "} r=2";
            tasks.push_back({name, [=]() -> CheckResult {
                qb::BetheBuilder<Rat> bb(chain);
                auto chk = qb::verify_multi_action(bb, i, j, {z1, z2}, ts);
                return {name, chk.pass,
                        Json{{"z", {z1.str(), z2.str()}}, {"terms", chk.term_count}}};
            }});
            std::string name1 = "multiple action T_{" + std::to_string(i) + "," +
                                std::to_string(j) + "} r=1 reduction";
            tasks.push_back({name1, [=]() -> CheckResult {
                qb::BetheBuilder<Rat> bb(chain);
                auto a = qb::single_action(bb, i, j, z1, ts);
                auto b = qb::multi_action(bb, i, j, {z1}, ts);
                bool same = a.size() == b.size();
                for (size_t k = 0; same && k < a.size(); ++k)
                    same = a[k].coeff == b[k].coeff && a[k].result == b[k].result;
                return {name1, same, Json{{"terms", a.size()}}};
            }});
        }
    return tasks;
}

std::vector<Task> recurrence_checks(const RunConfig& cfg) {
    auto samp = make_sampler(cfg);
    ColoredSets<Rat> ts = config_t_sets(cfg, samp);
    std::vector<Task> tasks;
    const auto chain = cfg.chain;
    tasks.push_back({"recurrence route independence", [=]() -> CheckResult {
        qb::BetheBuilder<Rat> bb(chain);
        Vector<Rat> canon = bb.bethe(ts);
        for (int ell = 1; ell <= chain.rank - 1; ++ell)
            for (int pos = 0; pos < static_cast<int>(ts[ell - 1].size()); ++pos) {
                Vector<Rat> via = bb.bethe_route(ts, ell, pos);
                if (!is_zero_vec(via - canon))
                    return {"recurrence route independence", false,
                            Json{{"ell", ell}, {"pos", pos}}};
            }
        return {"recurrence route independence", true,
                Json{{"sets", qb::sets_to_json(ts)}}};
    }});
    tasks.push_back({"dual recurrence route independence", [=]() -> CheckResult {
        qb::BetheBuilder<Rat> bb(chain);
        Vector<Rat> canon = bb.dual(ts);
        for (int ell = 1; ell <= chain.rank - 1; ++ell)
            for (int pos = 0; pos < static_cast<int>(ts[ell - 1].size()); ++pos) {
                Vector<Rat> via = bb.dual_route(ts, ell, pos);
                if (!is_zero_vec(via - canon))
                    return {"dual recurrence route independence", false,
                            Json{{"ell", ell}, {"pos", pos}}};
            }
        return {"dual recurrence route independence", true,
                Json{{"sets", qb::sets_to_json(ts)}}};
    }});
    return tasks;
}

std::vector<Task> scalar_product_checks(const RunConfig& cfg) {
    auto samp = make_sampler(cfg);
    ColoredSets<Rat> ts = config_t_sets(cfg, samp);
    ColoredSets<Rat> us = config_u_sets(cfg, samp);
    std::vector<Task> tasks;
    const auto chain = cfg.chain;
    tasks.push_back({"scalar product cross-oracle", [=]() -> CheckResult {
        qb::BetheBuilder<Rat> bb(chain);
        qb::HighestCoefficients<Rat> hc(chain.q);
        Rat direct = qb::scalar_product_direct(bb, us, ts);
        Rat part = qb::scalar_product_partition_sum(bb, hc, us, ts);
        return {"scalar product cross-oracle", direct == part,
                Json{{"direct", direct.str()},
                     {"partition_sum", part.str()},
                     {"u", qb::sets_to_json(us)},
                     {"t", qb::sets_to_json(ts)}}};
    }});
    return tasks;
}

// Batch queries from a grid file: a JSON array of {kind, u, t} entries.
std::vector<std::tuple<std::string, ColoredSets<Rat>, ColoredSets<Rat>>> load_hc_grid(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qb::ConfigError("cannot open grid file " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw qb::ConfigError(std::string("grid file is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw qb::ConfigError("grid file must be a JSON array");
    std::vector<std::tuple<std::string, ColoredSets<Rat>, ColoredSets<Rat>>> out;
    for (const auto& entry : j) {
        try {
            std::string kind = entry.at("kind").get<std::string>();
            if (kind != "Z" && kind != "Zbar")
                throw qb::ConfigError("grid entry kind must be 'Z' or 'Zbar'");
            out.emplace_back(kind, qb::sets_from_json(entry.at("u")),
                             qb::sets_from_json(entry.at("t")));
        } catch (const Json::exception& e) {
            throw qb::ConfigError(std::string("malformed grid entry: ") + e.what());
        }
    }
    return out;
}

std::vector<Task> hc_checks(const RunConfig& cfg) {
    auto samp = make_sampler(cfg);
    ColoredSets<Rat> ts = config_t_sets(cfg, samp);
    ColoredSets<Rat> us = config_u_sets(cfg, samp);
    std::vector<Task> tasks;
    const Rat q = cfg.chain.q;

    tasks.push_back({"highest coefficient color independence", [=]() -> CheckResult {
        qb::HighestCoefficients<Rat> hc(q);
        Rat zref = hc.z(us, ts), zbref = hc.zbar(us, ts);
        for (int ell = 1; ell <= static_cast<int>(us.size()); ++ell) {
            if (us[ell - 1].empty()) continue;
            if (hc.z_via(ell, us, ts) != zref)
                return {"highest coefficient color independence", false,
                        Json{{"kind", "Z"}, {"ell", ell}}};
            if (hc.zbar_via(ell, us, ts) != zbref)
                return {"highest coefficient color independence", false,
                        Json{{"kind", "Zbar"}, {"ell", ell}}};
        }
        return {"highest coefficient color independence", true,
                Json{{"Z", zref.str()}, {"Zbar", zbref.str()}}};
    }});
    tasks.push_back({"highest coefficient twisted symmetry", [=]() -> CheckResult {
        qb::HighestCoefficients<Rat> hc(q);
        qb::HighestCoefficients<Rat> hc_inv(q.inverse());
        auto invert = [](const ColoredSets<Rat>& s) {
            ColoredSets<Rat> r(s.size());
            for (size_t c = 0; c < s.size(); ++c)
                for (const auto& v : s[c]) r[c].push_back(v.inverse());
            return r;
        };
        Rat lhs = hc.zbar(us, ts);
        Rat rhs = hc_inv.z(invert(ts), invert(us));
        return {"highest coefficient twisted symmetry", lhs == rhs,
                Json{{"Zbar_q", lhs.str()}, {"Z_qinv_inverted", rhs.str()}}};
    }});
    tasks.push_back({"highest coefficient extreme-case term sets", [=]() -> CheckResult {
        qb::HighestCoefficients<Rat> hc(q);
        auto key_of = [](const qb::HcTerm<Rat>& t) {
            return t.coeff.str() + "#" + qb::canonical_key(t.us_child) + "#" +
                   qb::canonical_key(t.ts_child);
        };
        auto keys = [&](std::vector<qb::HcTerm<Rat>> terms) {
            std::vector<std::string> k;
            for (const auto& t : terms) k.push_back(key_of(t));
            std::sort(k.begin(), k.end());
            return k;
        };
        if (!us.front().empty()) {
            if (keys(hc.z_terms(1, us, ts)) != keys(hc.z_terms_extreme_low(us, ts)))
                return {"highest coefficient extreme-case term sets", false,
                        Json{{"kind", "Z"}}};
        }
        if (!us.back().empty()) {
            int ell = static_cast<int>(us.size());
            if (keys(hc.zbar_terms(ell, us, ts)) != keys(hc.zbar_terms_extreme_high(us, ts)))
                return {"highest coefficient extreme-case term sets", false,
                        Json{{"kind", "Zbar"}}};
        }
        return {"highest coefficient extreme-case term sets", true, Json{}};
    }});
    for (size_t k = 0; k < cfg.hc_queries.size(); ++k) {
        const auto& [kind, qu, qt] = cfg.hc_queries[k];
        std::string name = "hc query#" + std::to_string(k) + " " + kind;
        tasks.push_back({name, [=]() -> CheckResult {
            qb::HighestCoefficients<Rat> hc(q);
            Rat val = kind == "Z" ? hc.z(qu, qt) : hc.zbar(qu, qt);
            return {name, true,
                    Json{{"kind", kind}, {"u", qb::sets_to_json(qu)},
                         {"t", qb::sets_to_json(qt)}, {"value", val.str()}}};
        }});
    }
    return tasks;
}

std::vector<Task> solve_checks(const RunConfig& cfg) {
    std::vector<Task> tasks;
    const auto chain = qb::to_float_chain(cfg.chain);
    const auto cards = cfg.cardinalities;
    const auto opts = [&] {
        qb::SolveOptions o = cfg.solver;
        o.seed = cfg.seed;
        return o;
    }();
    const auto guess = cfg.solver_guess;
    tasks.push_back({"bethe roots + eigenvalue", [=]() -> CheckResult {
        qb::BetheBuilder<qb::Cplx> bb(chain);
        qb::RootProblem prob{chain, cards, guess, opts};
        auto rep = qb::solve_bethe(bb, prob);
        Json d;
        d["converged"] = rep.converged;
        d["iterations"] = rep.iterations;
        d["restarts"] = rep.restarts_used;
        d["residual"] = rep.residual_norm;
        d["residual_trace"] = rep.residual_trace;
        if (!rep.converged) {
            d["failure"] = rep.failure;
            return {"bethe roots + eigenvalue", false, d};
        }
        Json roots = Json::array();
        for (const auto& color : rep.roots) {
            Json c = Json::array();
            for (const auto& v : color) c.push_back(Json::array({v.real(), v.imag()}));
            roots.push_back(std::move(c));
        }
        d["roots"] = std::move(roots);
        qb::ParamSet<qb::Cplx> zs;
        std::mt19937_64 rng(opts.seed + 1);
        std::uniform_real_distribution<double> unit(-2.0, 2.0);
        for (int k = 0; k < 5; ++k) zs.push_back(qb::Cplx(unit(rng), unit(rng)));
        double dev = qb::eigen_check(bb, rep.roots, zs);
        d["eigen_deviation"] = dev;
        bool pass = rep.residual_norm < opts.tolerance && dev < 1e3 * opts.tolerance;
        return {"bethe roots + eigenvalue", pass, d};
    }});
    return tasks;
}

void append(std::vector<Task>& all, std::vector<Task> more) {
    for (auto& t : more) all.push_back(std::move(t));
}

int emit_report(const std::string& command, const RunConfig& cfg,
                const std::vector<CheckResult>& results, const std::string& out_path) {
    Json rep = qb::report_to_json(command, cfg, results);
    if (out_path.empty()) {
        std::cout << rep.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return 2;
        }
        out << rep.dump(2) << "\n";
    }
    return rep["pass"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact verification engine for trigonometric gl(N) Bethe vectors"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string config_path, out_path, mode;
    uint64_t seed = 0;
    int jobs = 1;
    long perturb_term = -1;

    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_path, "report output path (default stdout)");
    app.add_option("--mode", mode, "exact|float (overrides config)");
    auto* seed_opt = app.add_option("--seed", seed, "sampling seed (overrides config)");
    app.add_option("--jobs", jobs, "parallel check execution")->check(CLI::Range(1, 256));

    auto* yb = app.add_subcommand("check-yang-baxter", "R-matrix Yang-Baxter identity");
    auto* rll = app.add_subcommand("check-rll", "entrywise exchange relations");
    auto* zm = app.add_subcommand("check-zero-modes", "zero-mode relations and actions");
    auto* bv = app.add_subcommand("build-bv", "construct a Bethe vector and emit it");
    auto* act = app.add_subcommand("check-action", "single-entry action formula");
    act->add_option("--perturb-term", perturb_term,
                    "negative control: damage one term coefficient");
    auto* mact = app.add_subcommand("check-multi-action", "multiple action formula");
    auto* rec = app.add_subcommand("check-recurrence", "recurrence route independence");
    auto* sp = app.add_subcommand("scalar-product", "scalar product both ways");
    auto* hc = app.add_subcommand("check-hc", "highest-coefficient recursions");
    std::string grid_path;
    hc->add_option("--grid", grid_path, "batch query file: JSON array of {kind,u,t}");
    auto* slv = app.add_subcommand("solve-bethe", "solve Bethe equations numerically");
    double solver_tol = -1.0;
    int solver_iters = -1, solver_restarts = -1;
    slv->add_option("--tolerance", solver_tol, "residual max-norm target");
    slv->add_option("--max-iterations", solver_iters, "Newton iteration cap");
    slv->add_option("--restarts", solver_restarts, "random restarts after failures");
    auto* suite = app.add_subcommand("suite", "run the whole verification battery");

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        cfg = config_path.empty() ? qb::default_config() : qb::load_config(config_path);
        if (seed_opt->count() > 0) cfg.seed = seed;
        if (!mode.empty()) {
            if (mode != "exact" && mode != "float") throw qb::ConfigError("bad --mode");
            cfg.mode = mode;
        }
    } catch (const qb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (bv->parsed()) {
            auto samp = make_sampler(cfg);
            ColoredSets<Rat> ts = config_t_sets(cfg, samp);
            Json out;
            if (cfg.mode == "float") {
                auto chain = qb::to_float_chain(cfg.chain);
                qb::BetheBuilder<qb::Cplx> bb(chain);
                out = qb::state_to_json(chain, bb.bethe(qb::to_float_sets(ts)));
            } else {
                qb::BetheBuilder<Rat> bb(cfg.chain);
                out = qb::bethe_state_to_json(cfg.chain, ts, bb.bethe(ts));
            }
            if (out_path.empty()) {
                std::cout << out.dump(2) << "\n";
            } else {
                std::ofstream o(out_path);
                if (!o) { std::cerr << "cannot write " << out_path << "\n"; return 2; }
                o << out.dump(2) << "\n";
            }
            return 0;
        }

        std::vector<Task> tasks;
        std::string command;
        if (yb->parsed()) { command = "check-yang-baxter"; tasks = yang_baxter_checks(cfg); }
        else if (rll->parsed()) { command = "check-rll"; tasks = rll_checks(cfg); }
        else if (zm->parsed()) { command = "check-zero-modes"; tasks = zero_mode_checks(cfg); }
        else if (act->parsed()) { command = "check-action"; tasks = action_checks(cfg, perturb_term); }
        else if (mact->parsed()) { command = "check-multi-action"; tasks = multi_action_checks(cfg); }
        else if (rec->parsed()) { command = "check-recurrence"; tasks = recurrence_checks(cfg); }
        else if (sp->parsed()) { command = "scalar-product"; tasks = scalar_product_checks(cfg); }
        else if (hc->parsed()) {
            command = "check-hc";
            if (!grid_path.empty())
                for (auto& query : load_hc_grid(grid_path))
                    cfg.hc_queries.push_back(std::move(query));
            tasks = hc_checks(cfg);
        }
        else if (slv->parsed()) {
            command = "solve-bethe";
            if (solver_tol > 0) cfg.solver.tolerance = solver_tol;
            if (solver_iters > 0) cfg.solver.max_iterations = solver_iters;
            if (solver_restarts >= 0) cfg.solver.restarts = solver_restarts;
            tasks = solve_checks(cfg);
        }
        else if (suite->parsed()) {
            command = "suite";
            append(tasks, yang_baxter_checks(cfg));
            append(tasks, rll_checks(cfg));
            append(tasks, vacuum_checks(cfg));
            append(tasks, zero_mode_checks(cfg));
            append(tasks, action_checks(cfg, -1));
            append(tasks, multi_action_checks(cfg));
            append(tasks, recurrence_checks(cfg));
            append(tasks, scalar_product_checks(cfg));
            append(tasks, hc_checks(cfg));
            append(tasks, solve_checks(cfg));
        }
        auto results = run_tasks(tasks, jobs);
        return emit_report(command, cfg, results, out_path);
    } catch (const qb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
