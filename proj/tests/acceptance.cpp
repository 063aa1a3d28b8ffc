// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "csma/chain.hpp"
#include "csma/csma.h"
#include "csma/protocol.hpp"
#include "csma/sim.hpp"
#include "csma/tree.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace csma;
namespace fs = std::filesystem;
using Rational = boost::multiprecision::cpp_rational;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Instance {
    InterferenceGraph graph;
    std::vector<double> w;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 50 random graphs on 1..5 nodes with weights in [1, 10]. Graphs with more
// than 20 independent sets are redrawn so the conductance brute force applies.
const std::vector<Instance> &random_instances() {
    static const std::vector<Instance> instances = [] {
        std::mt19937_64 rng(20240601);
        std::uniform_int_distribution<int> nd(1, 5);
        std::uniform_real_distribution<double> wd(1.0, 10.0);
        std::bernoulli_distribution edge(0.5);
        std::vector<Instance> out;
        while (out.size() < 50) {
            const int n = nd(rng);
            InterferenceGraph g(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (edge(rng))
                        g.add_edge(i, j);
            if (enumerate_independent_sets(g).size() > kMaxConductanceStates)
                continue;
            std::vector<double> w(static_cast<std::size_t>(n));
            for (double &v : w)
                v = wd(rng);
            out.push_back({std::move(g), std::move(w)});
        }
        return out;
    }();
    return instances;
}

Outcome criterion1() {
    Outcome o;
    double worst_entry = 0.0;
    double worst_tv = 0.0;

    const InterferenceGraph single(1);
    const double ws = 3.0;
    const auto p1 = build_protocol_chain(single, std::vector{ws});
    const double exp1[2][2] = {{0.5, 0.5}, {1.0 / 6.0, 5.0 / 6.0}};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            worst_entry = std::max(worst_entry, std::abs(p1.p(a, b) - exp1[a][b]));

    const auto k2 = InterferenceGraph::complete(2);
    const std::vector<double> wk{2.0, 4.0};
    const auto pk = build_protocol_chain(k2, wk);
    const std::map<std::pair<Mask, Mask>, Rational> exp2 = {
        {{0, 0}, Rational(1, 2)}, {{0, 1}, Rational(1, 4)}, {{0, 2}, Rational(1, 4)},
        {{1, 0}, Rational(1, 4)}, {{1, 1}, Rational(3, 4)}, {{1, 2}, Rational(0)},
        {{2, 0}, Rational(1, 8)}, {{2, 1}, Rational(0)},    {{2, 2}, Rational(7, 8)},
    };
    bool exact = true;
    for (const auto &[key, value] : exp2)
        exact = exact && Rational(pk.at(key.first, key.second)) == value;

    const std::uint64_t draws = 1000000;
    CoinBlock coins;
    const auto mc = [&](const InterferenceGraph &g, const std::vector<double> &w,
                        const TransitionMatrix &p) {
        for (std::size_t a = 0; a < p.size(); ++a) {
            std::map<Mask, std::uint64_t> hits;
            const auto from = NodeSet::from_mask(g.size(), p.states[a]);
            for (std::uint64_t t = 0; t < draws; ++t) {
                coins.fill(977 + a, t, g.size());
                ++hits[slot_transition(g, from, w, coins).schedule.to_mask()];
            }
            double tv = 0.0;
            for (std::size_t b = 0; b < p.size(); ++b)
                tv += std::abs(static_cast<double>(hits[p.states[b]]) / draws -
                               p.p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
            worst_tv = std::max(worst_tv, tv / 2);
        }
    };
    mc(single, {ws}, p1);
    mc(k2, wk, pk);

    o.pass = exact && worst_entry <= 1e-15 && worst_tv <= 0.005;
    o.detail = fmt("K2 exact=%s, single-node max |err|=%.1e, max row TV=%.4f over 1e6 slots",
                   exact ? "yes" : "no", worst_entry, worst_tv);
    return o;
}

Outcome criterion2() {
    double worst_db = 0.0;
    double worst_cf = 0.0;
    for (const auto &inst : random_instances()) {
        const auto q = build_comparison_chain(inst.graph, inst.w);
        const auto pi_hat = closed_form_reversible_stationary(inst.graph, inst.w);
        worst_db = std::max(worst_db, detailed_balance_residual(q, pi_hat));
        worst_cf = std::max(worst_cf, (stationary(q).mass - pi_hat.mass).cwiseAbs().maxCoeff());
    }
    return {worst_db < 1e-12 && worst_cf <= 1e-10,
            fmt("50 instances: max detailed-balance residual %.1e, max |pi_hat - pi(Q)| %.1e",
                worst_db, worst_cf)};
}

Outcome criterion3() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> wd(1.0, 10.0);
    double worst = 0.0;
    int chains = 0;
    bool enum_match = true;
    int enum_chains = 0;
    // Every labelled graph on 1..3 nodes.
    for (int n = 1; n <= 3; ++n) {
        std::vector<Edge> pairs;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                pairs.emplace_back(i, j);
        for (unsigned pick = 0; pick < (1U << pairs.size()); ++pick) {
            std::vector<Edge> edges;
            for (std::size_t e = 0; e < pairs.size(); ++e)
                if ((pick >> e) & 1U)
                    edges.push_back(pairs[e]);
            const InterferenceGraph g(static_cast<std::size_t>(n), edges);
            for (int rep = 0; rep < 20; ++rep) {
                std::vector<double> w(static_cast<std::size_t>(n));
                for (double &v : w)
                    v = wd(rng);
                for (const auto &m : {build_protocol_chain(g, w), build_comparison_chain(g, w)}) {
                    worst = std::max(worst,
                                     (tree_stationary(m).mass - stationary(m).mass).cwiseAbs().maxCoeff());
                    ++chains;
                    if (m.size() <= 5) {
                        DenseRows<Rational> rows(m.size(), std::vector<Rational>(m.size()));
                        for (std::size_t a = 0; a < m.size(); ++a)
                            for (std::size_t b = 0; b < m.size(); ++b)
                                rows[a][b] = Rational(m.p(static_cast<Eigen::Index>(a),
                                                          static_cast<Eigen::Index>(b)));
                        enum_match = enum_match &&
                                     tree_weights_determinant(rows) == tree_weights_enumeration(rows);
                        ++enum_chains;
                    }
                }
            }
        }
    }
    return {worst <= 1e-10 && enum_match,
            fmt("%d chains: max |tree - solve| %.1e; exact determinant == enumeration on %d "
                "chains: %s",
                chains, worst, enum_chains, enum_match ? "yes" : "no")};
}

Outcome criterion4() {
    bool ok = true;
    std::string failing;
    for (const auto &inst : random_instances()) {
        const auto rep = verify_lemma_bounds(inst.graph, inst.w);
        for (const char *name : {"lemma1_gap", "ratio_lower", "ratio_upper", "min_pi_lower"})
            if (!rep.find(name).pass) {
                ok = false;
                failing = name;
            }
    }
    // Concentration: with uniform w = c, E_pi[weight] / max weight rises to 1.
    std::string conc;
    for (const auto &[label, g] : {std::pair{"path-3", InterferenceGraph::path(3)},
                                   std::pair{"star-4", InterferenceGraph::star(4)}}) {
        double prev = 0.0;
        bool monotone = true;
        double last = 0.0;
        for (double logc : {1.0, 2.0, 5.0, 10.0}) {
            const std::vector<double> w(g.size(), std::exp(logc));
            const auto pi = stationary(build_protocol_chain(g, w));
            double mean = 0.0;
            double best = 0.0;
            for (std::size_t a = 0; a < pi.states.size(); ++a) {
                const double weight = logc * popcount(pi.states[a]);
                mean += pi.mass(static_cast<Eigen::Index>(a)) * weight;
                best = std::max(best, weight);
            }
            last = mean / best;
            monotone = monotone && last >= prev;
            prev = last;
        }
        ok = ok && monotone && last >= 0.9;
        conc += fmt(" %s %.4f%s", label, last, monotone ? "" : " (not monotone)");
    }
    return {ok, "50 instances: gap, ratio and min-pi bounds " +
                    std::string(failing.empty() ? "hold" : "fail at " + failing) +
                    "; concentration at w=e^10:" + conc};
}

Outcome criterion5() {
    bool ok = true;
    std::string failing;
    double worst_var = 0.0;
    double max_norm = 0.0;
    for (const auto &inst : random_instances()) {
        const auto rep = verify_lemma_bounds(inst.graph, inst.w);
        for (const char *name : {"lambda_min_lower", "cheeger", "adjoint_norm_contracting",
                                 "adjoint_norm_bound", "variational_norm_agreement"})
            if (!rep.find(name).pass) {
                ok = false;
                failing = name;
            }
        worst_var = std::max(worst_var, rep.find("variational_norm_agreement").lhs);
        max_norm = std::max(max_norm, rep.find("adjoint_norm_contracting").lhs);
    }
    return {ok, fmt("50 instances: lambda_min, Cheeger, norm bounds %s; max ||P*|| %.6f; "
                    "max |variational - spectral| %.1e",
                    failing.empty() ? "hold" : ("fail at " + failing).c_str(), max_norm,
                    worst_var)};
}

Outcome criterion6() {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> sz(2, 64);
    std::uniform_real_distribution<double> td(0.0, 10.0);
    int passed = 0;
    double worst_gain = -1e300;
    for (int k = 0; k < 20; ++k) {
        std::vector<double> t(static_cast<std::size_t>(sz(rng)));
        for (double &v : t)
            v = td(rng);
        const auto r = gibbs_check(t, static_cast<std::uint64_t>(k + 1), 100);
        passed += r.bound_holds && r.maximal;
        worst_gain = std::max(worst_gain, r.worst_perturbation_gain);
    }
    return {passed == 20, fmt("%d/20 problems pass bound and maximality; worst perturbation "
                              "gain %.2e",
                              passed, worst_gain)};
}

Outcome criterion7() {
    const std::uint64_t slots = 2000000;
    struct Case {
        const char *label;
        InterferenceGraph g;
        std::vector<double> lambda;
        bool expect_stable;
    };
    const std::vector<Case> cases = {
        {"K2 (0.3,0.3)", InterferenceGraph::complete(2), {0.3, 0.3}, true},
        {"path-3 (0.3,0.2,0.3)", InterferenceGraph::path(3), {0.3, 0.2, 0.3}, true},
        {"cycle-5 0.25", InterferenceGraph::cycle(5), std::vector<double>(5, 0.25), true},
        {"K2 (0.6,0.6)", InterferenceGraph::complete(2), {0.6, 0.6}, false},
    };
    bool ok = true;
    std::string detail;
    for (const auto &c : cases) {
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            SimConfig cfg;
            cfg.graph = c.g;
            cfg.lambda = c.lambda;
            cfg.slots = slots;
            cfg.seed = seed;
            cfg.trace_stride = 100;
            const auto trace = run_simulation(cfg);
            const auto v = stability_verdict(trace);
            if (c.expect_stable)
                hits += v.stable;
            else
                hits += !v.stable && trace.summary.final_qmax >= slots / 100;
        }
        const bool pass = c.expect_stable ? hits >= 4 : hits == 5;
        ok = ok && pass;
        detail += fmt("%s%s %s %d/5", detail.empty() ? "" : "; ", c.label,
                      c.expect_stable ? "stable" : "unstable", hits);
    }
    return {ok, detail};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// Writes every artifact the library produces for `json` into `dir`.
bool produce(const char *json, const fs::path &dir) {
    fs::create_directories(dir);
    csma_config *cfg = nullptr;
    if (csma_config_parse(json, &cfg) != CSMA_OK)
        return false;
    bool ok = true;
    const auto save = [&](const char *name, char *text) {
        std::ofstream(dir / name, std::ios::binary) << (text ? text : "");
        csma_string_free(text);
    };
    csma_trace *trace = nullptr;
    ok = ok && csma_simulate(cfg, &trace) == CSMA_OK;
    ok = ok && csma_trace_write_csv(trace, (dir / "trace.csv").string().c_str()) == CSMA_OK;
    char *text = nullptr;
    ok = ok && csma_trace_summary_json(trace, &text) == CSMA_OK;
    save("summary.json", text);
    csma_trace_free(trace);
    text = nullptr;
    ok = ok && csma_manifest_json(cfg, "simulate", &text) == CSMA_OK;
    save("manifest.json", text);
    text = nullptr;
    ok = ok && csma_analyze(cfg, (dir / "analysis").string().c_str(), &text) == CSMA_OK;
    csma_string_free(text);
    text = nullptr;
    char *failed = nullptr;
    int all_pass = 0;
    ok = ok && csma_verify(cfg, &text, &failed, &all_pass) == CSMA_OK;
    save("verify.json", text);
    csma_string_free(failed);
    text = nullptr;
    ok = ok && csma_capacity(cfg, &text) == CSMA_OK;
    save("capacity.json", text);
    csma_config_free(cfg);
    return ok;
}

Outcome criterion8() {
    const char *configs[] = {
        R"({"n": 3, "edges": [[0,1],[1,2]], "lambda": [0.3, 0.2, 0.3], "slots": 20000, "seed": 11})",
        R"({"n": 5, "edges": [[0,1],[1,2],[2,3],[3,4],[4,0]], "lambda": [0.25,0.25,0.25,0.25,0.25],
            "slots": 20000, "seed": 3, "qmax_lag": 5, "trace_stride": 3, "f": "loglog"})",
        R"({"n": 2, "edges": [[0,1]], "lambda": [0.6, 0.6], "slots": 20000, "w_override": [2, 3]})",
    };
    const fs::path root = fs::temp_directory_path() / "csma_acceptance_determinism";
    fs::remove_all(root);
    int files = 0;
    bool ok = true;
    for (int c = 0; c < 3; ++c) {
        const fs::path a = root / std::to_string(c) / "a";
        const fs::path b = root / std::to_string(c) / "b";
        ok = ok && produce(configs[c], a) && produce(configs[c], b);
        for (const auto &entry : fs::recursive_directory_iterator(a)) {
            if (!entry.is_regular_file())
                continue;
            const auto rel = fs::relative(entry.path(), a);
            ok = ok && slurp(entry.path()) == slurp(b / rel);
            ++files;
        }
    }
    fs::remove_all(root);
    return {ok && files > 0, fmt("%d artifacts compared byte-for-byte across reruns", files)};
}

} // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"chain construction matches hand-derived matrices and Monte Carlo", criterion1},
        {"comparison chain is reversible with the closed-form law", criterion2},
        {"tree theorem reproduces the stationary law", criterion3},
        {"stationary-law bounds and concentration", criterion4},
        {"spectral and conductance bounds", criterion5},
        {"Gibbs variational principle", criterion6},
        {"queue stability verdicts", criterion7},
        {"deterministic artifacts", criterion8},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::printf("criterion %zu %s: %s [%.1f s] %s\n", k + 1, o.pass ? "PASS" : "FAIL",
                    criteria[k].first, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
