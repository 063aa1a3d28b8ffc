// Batch front end over the C API: simulate, analyze, verify, capacity, sweep.
//
// Exit status: 0 when everything passes, 1 when an invariant or inequality
// fails, 2 for usage and configuration errors.

#include "csma/csma.h"

#include "CLI11.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
};

class CapiError {
  public:
    explicit CapiError(csma_status s) : status(s), message(csma_last_error()) {}
    csma_status status;
    std::string message;
};

void check(csma_status s) {
    if (s != CSMA_OK)
        throw CapiError(s);
}

struct OwnedString {
    char *ptr = nullptr;
    ~OwnedString() { csma_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

struct ConfigHandle {
    csma_config *ptr = nullptr;
    ~ConfigHandle() { csma_config_free(ptr); }
};

struct TraceHandle {
    csma_trace *ptr = nullptr;
    ~TraceHandle() { csma_trace_free(ptr); }
};

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text << '\n';
}

std::string fmt_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void load(const Options &opt, ConfigHandle &cfg) {
    check(csma_config_load(opt.config.c_str(), &cfg.ptr));
    if (opt.seed)
        check(csma_config_set_seed(cfg.ptr, *opt.seed));
    fs::create_directories(opt.out);
}

void write_manifest(const Options &opt, const ConfigHandle &cfg, const char *command) {
    OwnedString m;
    check(csma_manifest_json(cfg.ptr, command, &m.ptr));
    write_text(fs::path(opt.out) / "manifest.json", m.str());
}

int run_simulate(const Options &opt) {
    ConfigHandle cfg;
    load(opt, cfg);
    TraceHandle trace;
    check(csma_simulate(cfg.ptr, &trace.ptr));
    const fs::path out(opt.out);
    check(csma_trace_write_csv(trace.ptr, (out / "trace.csv").string().c_str()));
    OwnedString summary;
    check(csma_trace_summary_json(trace.ptr, &summary.ptr));
    write_text(out / "summary.json", summary.str());
    write_manifest(opt, cfg, "simulate");
    std::cout << "simulate: wrote " << (out / "trace.csv").string() << " and summary.json\n";
    return kExitPass;
}

int run_analyze(const Options &opt) {
    ConfigHandle cfg;
    load(opt, cfg);
    check(csma_analyze(cfg.ptr, opt.out.c_str(), nullptr));
    write_manifest(opt, cfg, "analyze");
    std::cout << "analyze: wrote P.csv, Q.csv, stationary.csv, analysis.json to " << opt.out
              << '\n';
    return kExitPass;
}

int run_verify(const Options &opt) {
    ConfigHandle cfg;
    load(opt, cfg);
    OwnedString report;
    OwnedString failed;
    int pass = 0;
    check(csma_verify(cfg.ptr, &report.ptr, &failed.ptr, &pass));
    write_text(fs::path(opt.out) / "verify.json", report.str());
    write_manifest(opt, cfg, "verify");
    if (!pass) {
        std::istringstream names(failed.str());
        for (std::string name; std::getline(names, name);)
            std::cerr << "verify: inequality '" << name << "' failed\n";
        return kExitFail;
    }
    std::cout << "verify: all inequalities pass\n";
    return kExitPass;
}

int run_capacity(const Options &opt) {
    ConfigHandle cfg;
    load(opt, cfg);
    OwnedString json;
    check(csma_capacity(cfg.ptr, &json.ptr));
    write_text(fs::path(opt.out) / "capacity.json", json.str());
    write_manifest(opt, cfg, "capacity");
    std::cout << json.str() << '\n';
    return kExitPass;
}

struct SweepRow {
    double scale = 0.0;
    std::uint64_t seed = 0;
    std::string t_star;
    std::string interior;
    std::string stable;
    std::string slope;
    std::uint64_t final_qmax = 0;
    std::string error;
};

SweepRow run_job(const ConfigHandle &base, double scale, std::uint64_t seed,
                 const fs::path &job_file) {
    SweepRow row;
    row.scale = scale;
    row.seed = seed;
    try {
        ConfigHandle cfg;
        check(csma_config_clone(base.ptr, &cfg.ptr));
        check(csma_config_scale_lambda(cfg.ptr, scale));
        check(csma_config_set_seed(cfg.ptr, seed));
        double t_star = 0.0;
        int interior = 0;
        int unbounded = 0;
        // Graphs beyond exact enumeration simply leave the column empty.
        if (csma_config_capacity_margin(cfg.ptr, &t_star, &interior, &unbounded) == CSMA_OK) {
            row.t_star = unbounded ? "inf" : fmt_double(t_star);
            row.interior = interior ? "1" : "0";
        }
        TraceHandle trace;
        check(csma_simulate(cfg.ptr, &trace.ptr));
        int stable = 0;
        double slope = 0.0;
        if (csma_trace_stability(trace.ptr, 1e-3, &stable, &slope) == CSMA_OK) {
            row.stable = stable ? "1" : "0";
            row.slope = fmt_double(slope);
        }
        row.final_qmax = csma_trace_final_qmax(trace.ptr);
        OwnedString summary;
        check(csma_trace_summary_json(trace.ptr, &summary.ptr));
        write_text(job_file, summary.str());
    } catch (const CapiError &e) {
        row.error = e.message;
    }
    return row;
}

int run_sweep(const Options &opt) {
    ConfigHandle cfg;
    load(opt, cfg);
    const fs::path out(opt.out);
    fs::create_directories(out / "jobs");

    struct Job {
        std::size_t scale_index;
        double scale;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t a = 0; a < csma_config_sweep_scale_count(cfg.ptr); ++a)
        for (std::size_t b = 0; b < csma_config_sweep_seed_count(cfg.ptr); ++b)
            jobs.push_back({a, csma_config_sweep_scale(cfg.ptr, a),
                            csma_config_sweep_seed(cfg.ptr, b)});

    std::vector<SweepRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
            const auto &j = jobs[k];
            const auto file = out / "jobs" /
                              ("scale" + std::to_string(j.scale_index) + "_seed" +
                               std::to_string(j.seed) + ".json");
            rows[k] = run_job(cfg, j.scale, j.seed, file);
        }
    };
    const unsigned n_threads = std::max(1U, std::min<unsigned>(opt.jobs, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();

    std::ofstream csv(out / "sweep.csv", std::ios::binary);
    csv << "scale,seed,t_star,interior,stable,slope,final_qmax,error\n";
    bool any_error = false;
    for (const auto &r : rows) {
        csv << fmt_double(r.scale) << ',' << r.seed << ',' << r.t_star << ',' << r.interior
            << ',' << r.stable << ',' << r.slope << ',' << r.final_qmax << ',' << r.error
            << '\n';
        any_error = any_error || !r.error.empty();
    }
    write_manifest(opt, cfg, "sweep");
    std::cout << "sweep: " << rows.size() << " jobs written to " << (out / "sweep.csv").string()
              << '\n';
    return any_error ? kExitFail : kExitPass;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Slotted CSMA simulator and exact Markov-chain verifier"};
    app.set_version_flag("--version", std::string(csma_version()));
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", opt.config, "JSON experiment config")->required();
        sub->add_option("--out", opt.out, "Output directory");
        sub->add_option("--seed", opt.seed, "Override the config seed");
    };
    auto *simulate = app.add_subcommand("simulate", "Run the closed-loop slot simulation");
    auto *analyze = app.add_subcommand("analyze", "Build the exact chain and its spectrum");
    auto *verify = app.add_subcommand("verify", "Check the stationary and mixing bounds");
    auto *capacity = app.add_subcommand("capacity", "Capacity-region margin of lambda");
    auto *sweep = app.add_subcommand("sweep", "Simulate every (lambda scale, seed) pair");
    for (auto *sub : {simulate, analyze, verify, capacity, sweep})
        add_common(sub);
    sweep->add_option("--jobs", opt.jobs, "Parallel jobs")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*simulate)
            return run_simulate(opt);
        if (*analyze)
            return run_analyze(opt);
        if (*verify)
            return run_verify(opt);
        if (*capacity)
            return run_capacity(opt);
        return run_sweep(opt);
    } catch (const CapiError &e) {
        std::cerr << "csmalab: " << e.message << '\n';
        const bool failed_check = e.status == CSMA_ERR_INVARIANT_VIOLATION ||
                                  e.status == CSMA_ERR_NUMERICAL_FAILURE;
        return failed_check ? kExitFail : kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "csmalab: " << e.what() << '\n';
        return kExitUsage;
    }
}
