#include "csma/config.hpp"

#include "csma/error.hpp"
#include "csma/version.hpp"

#include <Eigen/Core>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace csma {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "n",    "edges",    "graph_file",   "lambda",     "f",     "slots",
    "seed", "qmax_lag", "trace_stride", "w_override", "sweep",
};

[[noreturn]] void bad(const std::string &what) { fail(Errc::invalid_config, what); }

std::uint64_t get_count(const json &j, const char *key, std::uint64_t fallback,
                        std::uint64_t minimum) {
    if (!j.contains(key))
        return fallback;
    const auto &v = j.at(key);
    if (!v.is_number_integer())
        bad(std::string(key) + " must be an integer");
    if (v.is_number_unsigned() ? v.get<std::uint64_t>() < minimum
                               : v.get<std::int64_t>() < static_cast<std::int64_t>(minimum))
        bad(std::string(key) + " must be ≥ " + std::to_string(minimum));
    return v.get<std::uint64_t>();
}

std::vector<double> get_reals(const json &j, const char *key) {
    const auto &v = j.at(key);
    if (!v.is_array())
        bad(std::string(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto &x : v) {
        if (!x.is_number())
            bad(std::string(key) + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace

ExperimentConfig parse_config(const json &j, const std::filesystem::path &base_dir) {
    if (!j.is_object())
        bad("config must be a JSON object");
    for (const auto &[key, _] : j.items())
        if (!kKnownKeys.count(key))
            bad("unknown config key '" + key + "'");

    ExperimentConfig cfg;
    auto &sim = cfg.sim;
    try {
        if (j.contains("graph_file")) {
            if (j.contains("edges"))
                bad("give either 'edges' or 'graph_file', not both");
            std::filesystem::path gp = j.at("graph_file").get<std::string>();
            if (gp.is_relative())
                gp = base_dir / gp;
            sim.graph = load_edge_list(gp.string());
            if (j.contains("n") && j.at("n").get<std::int64_t>() !=
                                       static_cast<std::int64_t>(sim.graph.size()))
                bad("'n' disagrees with the node count of graph_file");
        } else {
            if (!j.contains("n"))
                bad("config needs 'n' (or 'graph_file')");
            const auto n = get_count(j, "n", 0, 1);
            std::vector<Edge> edges;
            if (j.contains("edges")) {
                const auto &e = j.at("edges");
                if (!e.is_array())
                    bad("edges must be an array of [i, j] pairs");
                for (const auto &pair : e) {
                    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
                        !pair[1].is_number_integer())
                        bad("edges must be an array of [i, j] pairs");
                    edges.emplace_back(pair[0].get<int>(), pair[1].get<int>());
                }
            }
            sim.graph = InterferenceGraph(n, edges);
        }
        const std::size_t n = sim.graph.size();
        sim.lambda = j.contains("lambda") ? get_reals(j, "lambda") : std::vector<double>(n, 0.0);
        if (j.contains("f")) {
            if (!j.at("f").is_string())
                bad("f must be \"sqrt_log\" or \"loglog\"");
            sim.f = WeightFunction::from_name(j.at("f").get<std::string>());
        }
        sim.slots = get_count(j, "slots", sim.slots, 1);
        sim.seed = get_count(j, "seed", sim.seed, 0);
        sim.qmax_lag = get_count(j, "qmax_lag", 0, 0);
        sim.trace_stride = get_count(j, "trace_stride", 1, 1);
        if (j.contains("w_override"))
            sim.w_override = get_reals(j, "w_override");

        cfg.sweep.seeds = {sim.seed};
        if (j.contains("sweep")) {
            const auto &s = j.at("sweep");
            if (!s.is_object())
                bad("sweep must be an object with 'scales' and/or 'seeds'");
            for (const auto &[key, _] : s.items())
                if (key != "scales" && key != "seeds")
                    bad("unknown sweep key '" + key + "'");
            if (s.contains("scales")) {
                cfg.sweep.scales = get_reals(s, "scales");
                for (double c : cfg.sweep.scales)
                    if (!(c >= 0.0))
                        bad("sweep scales must be >= 0");
            }
            if (s.contains("seeds")) {
                cfg.sweep.seeds.clear();
                for (const auto &x : s.at("seeds")) {
                    if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<std::int64_t>() >= 0))
                        bad("sweep seeds must be non-negative integers");
                    cfg.sweep.seeds.push_back(x.get<std::uint64_t>());
                }
            }
            if (cfg.sweep.scales.empty() || cfg.sweep.seeds.empty())
                bad("sweep needs at least one scale and one seed");
        }
    } catch (const json::exception &e) {
        bad(std::string("malformed config: ") + e.what());
    } catch (const Error &e) {
        if (e.code() == Errc::invalid_config)
            throw;
        bad(e.what());
    }
    try {
        validate(sim);
    } catch (const Error &e) {
        if (e.code() == Errc::invalid_config)
            throw;
        bad(e.what());
    }
    return cfg;
}

ExperimentConfig parse_config_text(const std::string &text,
                                   const std::filesystem::path &base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        bad(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j, base_dir);
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        bad("cannot read config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path());
}

json to_json(const ExperimentConfig &cfg) {
    const auto &sim = cfg.sim;
    json edges = json::array();
    for (const auto &[i, j] : sim.graph.edges())
        edges.push_back({i, j});
    json out = {
        {"n", sim.graph.size()},
        {"edges", edges},
        {"lambda", sim.lambda},
        {"f", std::string(sim.f.name())},
        {"slots", sim.slots},
        {"seed", sim.seed},
        {"qmax_lag", sim.qmax_lag},
        {"trace_stride", sim.trace_stride},
        {"sweep", {{"scales", cfg.sweep.scales}, {"seeds", cfg.sweep.seeds}}},
    };
    if (sim.w_override)
        out["w_override"] = *sim.w_override;
    return out;
}

std::string config_hash(const ExperimentConfig &cfg) {
    const std::string text = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<double> analysis_weights(const ExperimentConfig &cfg) {
    if (cfg.sim.w_override)
        return *cfg.sim.w_override;
    const std::vector<std::uint64_t> zero(cfg.sim.graph.size(), 0);
    return compute_weights(zero, cfg.sim.f);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json summary_json(const Trace &trace, const StabilityVerdict *verdict) {
    const auto &s = trace.summary;
    std::vector<double> arrival_rate(trace.n);
    std::vector<double> departure_rate(trace.n);
    for (std::size_t i = 0; i < trace.n; ++i) {
        arrival_rate[i] = static_cast<double>(s.arrivals[i]) / static_cast<double>(s.slots);
        departure_rate[i] = static_cast<double>(s.departures[i]) / static_cast<double>(s.slots);
    }
    json occ = json::array();
    for (const auto &[mask, count] : s.occupancy)
        occ.push_back({{"schedule", NodeSet::from_mask(trace.n, mask).to_hex()},
                       {"members", mask_members(mask)},
                       {"slots", count}});
    json out = {
        {"n", trace.n},
        {"slots", s.slots},
        {"arrivals", s.arrivals},
        {"departures", s.departures},
        {"successes", s.successes},
        {"arrival_rate", arrival_rate},
        {"departure_rate", departure_rate},
        {"mean_queue", s.mean_queue},
        {"final_q", s.final_q},
        {"final_qmax", s.final_qmax},
        {"peak_qmax", s.peak_qmax},
        {"sampled_rows", trace.rows.size()},
        {"conservation", conservation_holds(trace)},
        {"occupancy", occ},
    };
    if (verdict)
        out["stability"] = {{"stable", verdict->stable}, {"slope", verdict->slope}};
    else
        out["stability"] = nullptr;
    return out;
}

void write_trace_csv(std::ostream &out, const Trace &trace) {
    out << "slot";
    for (std::size_t i = 0; i < trace.n; ++i)
        out << ",q_" << i;
    out << ",sigma,attempts\n";
    for (const auto &row : trace.rows) {
        out << row.slot;
        for (auto v : row.q)
            out << ',' << v;
        out << ',' << row.sigma.to_hex() << ',' << row.attempts.to_hex() << '\n';
    }
}

json capacity_json(const CapacityMargin &m) {
    json out;
    if (m.unbounded)
        out["t_star"] = nullptr;
    else
        out["t_star"] = m.t_star;
    out["unbounded"] = m.unbounded;
    out["interior"] = m.interior;
    out["t_star_exact"] = m.exact ? json(*m.exact) : json(nullptr);
    json mix = json::array();
    for (const auto &[mask, a] : m.mixture)
        mix.push_back({{"members", mask_members(mask)}, {"alpha", a}});
    out["mixture"] = mix;
    return out;
}

json report_json(const LemmaReport &r) {
    json checks = json::array();
    for (const auto &c : r.checks) {
        json item = {{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}};
        if (!c.note.empty())
            item["note"] = c.note;
        checks.push_back(std::move(item));
    }
    return {{"checks", checks}, {"pass", r.all_pass}};
}

namespace {

void write_matrix_csv(const std::filesystem::path &path, const TransitionMatrix &m,
                      std::size_t n) {
    std::ofstream out(path);
    if (!out)
        fail(Errc::io_error, "cannot write '" + path.string() + "'");
    out << "from";
    for (Mask s : m.states)
        out << ',' << NodeSet::from_mask(n, s).to_hex();
    out << '\n';
    for (std::size_t a = 0; a < m.size(); ++a) {
        out << NodeSet::from_mask(n, m.states[a]).to_hex();
        for (std::size_t b = 0; b < m.size(); ++b)
            out << ',' << format_double(m.p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        out << '\n';
    }
}

} // namespace

json write_analysis(const ExperimentConfig &cfg, const std::filesystem::path &dir) {
    const auto &g = cfg.sim.graph;
    const auto w = analysis_weights(cfg);
    const auto p = build_protocol_chain(g, w);
    const auto q = build_comparison_chain(g, w);
    const auto pi = stationary(p);
    const auto pi_hat = closed_form_reversible_stationary(g, w);
    const auto spec = spectrum_reversibilization(p, pi);

    std::filesystem::create_directories(dir);
    write_matrix_csv(dir / "P.csv", p, g.size());
    write_matrix_csv(dir / "Q.csv", q, g.size());
    {
        std::ofstream out(dir / "stationary.csv");
        if (!out)
            fail(Errc::io_error, "cannot write stationary.csv");
        out << "state,members,pi,pi_hat\n";
        for (std::size_t a = 0; a < p.size(); ++a) {
            std::string members = format_members(p.states[a]);
            for (char &c : members)
                if (c == ',')
                    c = ' ';
            out << NodeSet::from_mask(g.size(), p.states[a]).to_hex() << ',' << members << ','
                << format_double(pi.mass(static_cast<Eigen::Index>(a))) << ','
                << format_double(pi_hat.mass(static_cast<Eigen::Index>(a))) << '\n';
        }
    }

    json states = json::array();
    for (Mask s : p.states)
        states.push_back({{"schedule", NodeSet::from_mask(g.size(), s).to_hex()},
                          {"members", mask_members(s)}});
    std::vector<double> piv(pi.mass.data(), pi.mass.data() + pi.mass.size());
    std::vector<double> pihv(pi_hat.mass.data(), pi_hat.mass.data() + pi_hat.mass.size());
    json out = {
        {"n", g.size()},
        {"weights", w},
        {"states", states},
        {"pi", piv},
        {"pi_hat", pihv},
        {"spectrum",
         {{"eigenvalues", spec.eigenvalues},
          {"lambda2", spec.lambda2},
          {"lambda_min", spec.lambda_min},
          {"adjoint_norm", spec.norm},
          {"variational_norm", spec.variational_norm}}},
    };
    if (p.size() <= kMaxConductanceStates) {
        const auto r = compose(p, adjoint(p, pi));
        const auto c = conductance(r, pi);
        std::vector<std::size_t> subset;
        for (std::size_t a = 0; a < p.size(); ++a)
            if ((c.subset >> a) & 1U)
                subset.push_back(a);
        out["conductance"] = {{"phi", c.phi}, {"subset", subset}};
    } else {
        out["conductance"] = nullptr;
    }
    if (spec.norm < 1.0)
        out["mixing_time_eps_0_01"] = mixing_time_estimate(spec.norm, pi.mass.minCoeff(), 0.01);
    else
        out["mixing_time_eps_0_01"] = nullptr;
    std::ofstream js(dir / "analysis.json");
    if (!js)
        fail(Errc::io_error, "cannot write analysis.json");
    js << out.dump(2) << '\n';
    return out;
}

json manifest_json(const ExperimentConfig &cfg, const std::string &command) {
    std::ostringstream eigen;
    eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
    return {
        {"tool", "csmalab"},
        {"version", CSMA_VERSION_STRING},
        {"command", command},
        {"config_hash", config_hash(cfg)},
        {"seed", cfg.sim.seed},
        {"config", to_json(cfg)},
        {"libraries",
         {{"eigen", eigen.str()},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
    };
}

} // namespace csma
