#include "csma/csma.h"

#include "csma/config.hpp"
#include "csma/error.hpp"
#include "csma/version.hpp"

#include <cstring>
#include <fstream>
#include <new>
#include <string>

struct csma_graph {
    csma::InterferenceGraph g;
};

struct csma_config {
    csma::ExperimentConfig cfg;
};

struct csma_trace {
    csma::Trace trace;
};

namespace {

thread_local std::string g_last_error;

csma_status to_status(csma::Errc code) {
    using csma::Errc;
    switch (code) {
    case Errc::invalid_argument:
    case Errc::invalid_delta:
    case Errc::invalid_feedback:
    case Errc::invalid_adjoint_base:
    case Errc::not_contracting: return CSMA_ERR_INVALID_ARGUMENT;
    case Errc::invalid_config: return CSMA_ERR_INVALID_CONFIG;
    case Errc::invalid_graph: return CSMA_ERR_INVALID_GRAPH;
    case Errc::state_space_too_large:
    case Errc::conductance_too_large:
    case Errc::tree_too_large: return CSMA_ERR_STATE_SPACE_TOO_LARGE;
    case Errc::invalid_schedule: return CSMA_ERR_INVALID_SCHEDULE;
    case Errc::invalid_weight: return CSMA_ERR_INVALID_WEIGHT;
    case Errc::invalid_rate: return CSMA_ERR_INVALID_RATE;
    case Errc::not_irreducible: return CSMA_ERR_NOT_IRREDUCIBLE;
    case Errc::numerical_failure: return CSMA_ERR_NUMERICAL_FAILURE;
    case Errc::invariant_violation: return CSMA_ERR_INVARIANT_VIOLATION;
    case Errc::insufficient_data: return CSMA_ERR_INSUFFICIENT_DATA;
    case Errc::io_error: return CSMA_ERR_IO;
    }
    return CSMA_ERR_INTERNAL;
}

template <class F> csma_status guarded(F &&body) {
    try {
        g_last_error.clear();
        body();
        return CSMA_OK;
    } catch (const csma::Error &e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc &) {
        g_last_error = "out of memory";
        return CSMA_ERR_INTERNAL;
    } catch (const std::exception &e) {
        g_last_error = e.what();
        return CSMA_ERR_INTERNAL;
    }
}

char *dup_string(const std::string &s) {
    char *out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(bool ok, const char *what) {
    if (!ok)
        csma::fail(csma::Errc::invalid_argument, what);
}

} // namespace

extern "C" {

const char *csma_version(void) { return CSMA_VERSION_STRING; }

const char *csma_status_name(csma_status status) {
    switch (status) {
    case CSMA_OK: return "ok";
    case CSMA_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case CSMA_ERR_INVALID_CONFIG: return "invalid-config";
    case CSMA_ERR_INVALID_GRAPH: return "invalid-graph";
    case CSMA_ERR_STATE_SPACE_TOO_LARGE: return "state-space-too-large";
    case CSMA_ERR_INVALID_SCHEDULE: return "invalid-schedule";
    case CSMA_ERR_INVALID_WEIGHT: return "invalid-weight";
    case CSMA_ERR_INVALID_RATE: return "invalid-rate";
    case CSMA_ERR_NOT_IRREDUCIBLE: return "not-irreducible";
    case CSMA_ERR_NUMERICAL_FAILURE: return "numerical-failure";
    case CSMA_ERR_INVARIANT_VIOLATION: return "invariant-violation";
    case CSMA_ERR_INSUFFICIENT_DATA: return "insufficient-data";
    case CSMA_ERR_IO: return "io-error";
    case CSMA_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char *csma_last_error(void) { return g_last_error.c_str(); }

void csma_string_free(char *s) { delete[] s; }

csma_status csma_graph_create(size_t n, csma_graph **out) {
    return guarded([&] {
        require(out != nullptr, "out must not be null");
        if (n == 0)
            csma::fail(csma::Errc::invalid_graph, "a graph needs at least one node");
        *out = new csma_graph{csma::InterferenceGraph(n)};
    });
}

csma_status csma_graph_load(const char *path, csma_graph **out) {
    return guarded([&] {
        require(path && out, "path and out must not be null");
        *out = new csma_graph{csma::load_edge_list(path)};
    });
}

void csma_graph_free(csma_graph *g) { delete g; }

csma_status csma_graph_add_edge(csma_graph *g, int i, int j) {
    return guarded([&] {
        require(g != nullptr, "graph must not be null");
        g->g.add_edge(i, j);
    });
}

size_t csma_graph_node_count(const csma_graph *g) { return g ? g->g.size() : 0; }

size_t csma_graph_edge_count(const csma_graph *g) { return g ? g->g.edge_count() : 0; }

csma_status csma_graph_independent_sets(const csma_graph *g, uint32_t *masks,
                                        size_t capacity, size_t *count) {
    return guarded([&] {
        require(g && count, "graph and count must not be null");
        require(masks || capacity == 0, "masks may be null only when capacity is 0");
        const auto sets = csma::enumerate_independent_sets(g->g);
        *count = sets.size();
        for (size_t k = 0; k < sets.size() && k < capacity; ++k)
            masks[k] = sets[k];
    });
}

csma_status csma_graph_capacity_margin(const csma_graph *g, const double *lambda,
                                       size_t len, double *t_star, int *interior) {
    return guarded([&] {
        require(g && lambda && t_star, "graph, lambda and t_star must not be null");
        const auto m = csma::capacity_margin(g->g, {lambda, len});
        *t_star = m.t_star;
        if (interior)
            *interior = m.interior ? 1 : 0;
    });
}

csma_status csma_config_load(const char *path, csma_config **out) {
    return guarded([&] {
        require(path && out, "path and out must not be null");
        *out = new csma_config{csma::load_config(path)};
    });
}

csma_status csma_config_parse(const char *json_text, csma_config **out) {
    return guarded([&] {
        require(json_text && out, "json_text and out must not be null");
        *out = new csma_config{csma::parse_config_text(json_text)};
    });
}

csma_status csma_config_clone(const csma_config *cfg, csma_config **out) {
    return guarded([&] {
        require(cfg && out, "cfg and out must not be null");
        *out = new csma_config{cfg->cfg};
    });
}

void csma_config_free(csma_config *cfg) { delete cfg; }

csma_status csma_config_set_seed(csma_config *cfg, uint64_t seed) {
    return guarded([&] {
        require(cfg != nullptr, "cfg must not be null");
        cfg->cfg.sim.seed = seed;
    });
}

csma_status csma_config_scale_lambda(csma_config *cfg, double factor) {
    return guarded([&] {
        require(cfg != nullptr, "cfg must not be null");
        auto scaled = cfg->cfg.sim.lambda;
        for (double &v : scaled)
            v *= factor;
        csma::validate_rates(scaled);
        cfg->cfg.sim.lambda = std::move(scaled);
    });
}

csma_status csma_config_to_json(const csma_config *cfg, char **out) {
    return guarded([&] {
        require(cfg && out, "cfg and out must not be null");
        *out = dup_string(csma::to_json(cfg->cfg).dump(2));
    });
}

size_t csma_config_sweep_scale_count(const csma_config *cfg) {
    return cfg ? cfg->cfg.sweep.scales.size() : 0;
}

double csma_config_sweep_scale(const csma_config *cfg, size_t k) {
    return cfg && k < cfg->cfg.sweep.scales.size() ? cfg->cfg.sweep.scales[k] : 0.0;
}

size_t csma_config_sweep_seed_count(const csma_config *cfg) {
    return cfg ? cfg->cfg.sweep.seeds.size() : 0;
}

uint64_t csma_config_sweep_seed(const csma_config *cfg, size_t k) {
    return cfg && k < cfg->cfg.sweep.seeds.size() ? cfg->cfg.sweep.seeds[k] : 0;
}

csma_status csma_manifest_json(const csma_config *cfg, const char *command, char **out) {
    return guarded([&] {
        require(cfg && command && out, "cfg, command and out must not be null");
        *out = dup_string(csma::manifest_json(cfg->cfg, command).dump(2));
    });
}

csma_status csma_simulate(const csma_config *cfg, csma_trace **out) {
    return guarded([&] {
        require(cfg && out, "cfg and out must not be null");
        *out = new csma_trace{csma::run_simulation(cfg->cfg.sim)};
    });
}

void csma_trace_free(csma_trace *t) { delete t; }

csma_status csma_trace_write_csv(const csma_trace *t, const char *path) {
    return guarded([&] {
        require(t && path, "trace and path must not be null");
        std::ofstream out(path);
        if (!out)
            csma::fail(csma::Errc::io_error, std::string("cannot write '") + path + "'");
        csma::write_trace_csv(out, t->trace);
    });
}

csma_status csma_trace_summary_json(const csma_trace *t, char **out) {
    return guarded([&] {
        require(t && out, "trace and out must not be null");
        if (t->trace.rows.size() >= csma::kMinStabilityRows) {
            const auto v = csma::stability_verdict(t->trace);
            *out = dup_string(csma::summary_json(t->trace, &v).dump(2));
        } else {
            *out = dup_string(csma::summary_json(t->trace, nullptr).dump(2));
        }
    });
}

csma_status csma_trace_stability(const csma_trace *t, double threshold, int *stable,
                                 double *slope) {
    return guarded([&] {
        require(t && stable && slope, "trace, stable and slope must not be null");
        const auto v = csma::stability_verdict(t->trace, threshold);
        *stable = v.stable ? 1 : 0;
        *slope = v.slope;
    });
}

uint64_t csma_trace_final_qmax(const csma_trace *t) {
    return t ? t->trace.summary.final_qmax : 0;
}

csma_status csma_analyze(const csma_config *cfg, const char *out_dir, char **analysis_json) {
    return guarded([&] {
        require(cfg && out_dir, "cfg and out_dir must not be null");
        const auto j = csma::write_analysis(cfg->cfg, out_dir);
        if (analysis_json)
            *analysis_json = dup_string(j.dump(2));
    });
}

csma_status csma_verify(const csma_config *cfg, char **report_json, char **failed_names,
                        int *all_pass) {
    return guarded([&] {
        require(cfg && report_json && all_pass, "arguments must not be null");
        const auto w = csma::analysis_weights(cfg->cfg);
        const auto rep = csma::verify_lemma_bounds(cfg->cfg.sim.graph, w);
        auto j = csma::report_json(rep);
        j["weights"] = w;
        std::string failed;
        for (const auto &c : rep.checks)
            if (!c.pass)
                failed += (failed.empty() ? "" : "\n") + c.name;
        *report_json = dup_string(j.dump(2));
        if (failed_names)
            *failed_names = dup_string(failed);
        *all_pass = rep.all_pass ? 1 : 0;
    });
}

csma_status csma_config_capacity_margin(const csma_config *cfg, double *t_star,
                                        int *interior, int *unbounded) {
    return guarded([&] {
        require(cfg && t_star, "cfg and t_star must not be null");
        const auto m = csma::capacity_margin(cfg->cfg.sim.graph, cfg->cfg.sim.lambda);
        *t_star = m.t_star;
        if (interior)
            *interior = m.interior ? 1 : 0;
        if (unbounded)
            *unbounded = m.unbounded ? 1 : 0;
    });
}

csma_status csma_capacity(const csma_config *cfg, char **json) {
    return guarded([&] {
        require(cfg && json, "cfg and json must not be null");
        const auto m = csma::capacity_margin(cfg->cfg.sim.graph, cfg->cfg.sim.lambda);
        *json = dup_string(csma::capacity_json(m).dump(2));
    });
}

} // extern "C"
