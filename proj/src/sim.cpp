#include "csma/sim.hpp"

#include "csma/error.hpp"
#include "csma/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace csma {

void validate(const SimConfig &cfg) {
    const std::size_t n = cfg.graph.size();
    if (n == 0)
        fail(Errc::invalid_config, "graph must have at least one node");
    if (cfg.slots < 1)
        fail(Errc::invalid_config, "slots must be ≥ 1");
    if (cfg.trace_stride < 1)
        fail(Errc::invalid_config, "trace_stride must be ≥ 1");
    if (cfg.lambda.size() != n)
        fail(Errc::invalid_config, "lambda must have one entry per node");
    validate_rates(cfg.lambda);
    if (cfg.w_override) {
        if (cfg.w_override->size() != n)
            fail(Errc::invalid_config, "w_override must have one entry per node");
        for (double v : *cfg.w_override)
            if (!(v >= 1.0) || !std::isfinite(v))
                fail(Errc::invalid_weight, "w_override entries must be finite and >= 1");
    }
}

Trace run_simulation(const SimConfig &cfg) {
    validate(cfg);
    const auto &g = cfg.graph;
    const std::size_t n = g.size();
    const bool track_occupancy = n <= kMaxEnumerationNodes;

    Trace trace;
    trace.n = n;
    auto &sum = trace.summary;
    sum.slots = cfg.slots;
    sum.arrivals.assign(n, 0);
    sum.departures.assign(n, 0);
    sum.successes.assign(n, 0);
    std::vector<long double> queue_total(n, 0.0L);

    std::vector<std::uint64_t> q(n, 0);
    NodeSet sigma(n);
    CoinBlock coins;
    std::vector<std::uint8_t> arrivals(n);
    std::vector<double> w = cfg.w_override.value_or(std::vector<double>(n, 1.0));
    std::deque<std::uint64_t> qmax_history;

    for (std::uint64_t slot = 0; slot < cfg.slots; ++slot) {
        const std::uint64_t qmax_now = *std::max_element(q.begin(), q.end());
        sum.peak_qmax = std::max(sum.peak_qmax, qmax_now);
        qmax_history.push_back(qmax_now);
        if (qmax_history.size() > cfg.qmax_lag + 1)
            qmax_history.pop_front();
        if (!cfg.w_override)
            w = compute_weights(q, cfg.f, qmax_history.front());

        coins.fill(cfg.seed, slot, n);
        auto outcome = slot_transition(g, sigma, w, coins);

        if (slot % cfg.trace_stride == 0)
            trace.rows.push_back({slot, q, outcome.schedule, outcome.attempts,
                                  sum.arrivals, sum.departures});
        for (std::size_t i = 0; i < n; ++i)
            queue_total[i] += static_cast<long double>(q[i]);
        if (track_occupancy)
            ++sum.occupancy[outcome.schedule.to_mask()];

        sample_arrivals_into(cfg.lambda, cfg.seed, slot, arrivals);
        for (std::size_t i = 0; i < n; ++i) {
            if (outcome.schedule.test(i)) {
                ++sum.successes[i];
                if (q[i] > 0)
                    ++sum.departures[i];
            }
            sum.arrivals[i] += arrivals[i];
        }
        q = update_queues(q, outcome.schedule, arrivals);
        sigma = std::move(outcome.schedule);
    }
    sum.final_q = q;
    sum.final_qmax = *std::max_element(q.begin(), q.end());
    sum.peak_qmax = std::max(sum.peak_qmax, sum.final_qmax);
    sum.mean_queue.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        sum.mean_queue[i] =
            static_cast<double>(queue_total[i] / static_cast<long double>(cfg.slots));
    return trace;
}

bool conservation_holds(const Trace &trace) {
    for (const auto &row : trace.rows)
        for (std::size_t i = 0; i < trace.n; ++i)
            if (row.q[i] + row.departures_before[i] != row.arrivals_before[i])
                return false;
    const auto &s = trace.summary;
    for (std::size_t i = 0; i < trace.n; ++i)
        if (s.final_q[i] + s.departures[i] != s.arrivals[i])
            return false;
    return true;
}

StabilityVerdict stability_verdict(std::span<const double> slots,
                                   std::span<const double> qmax, double threshold) {
    if (slots.size() != qmax.size())
        fail(Errc::invalid_argument, "slot and Q_max series differ in length");
    if (slots.size() < kMinStabilityRows)
        fail(Errc::insufficient_data, "stability verdict needs at least 10^4 samples, got " +
                                          std::to_string(slots.size()));
    const std::size_t start = slots.size() / 2;
    const auto m = static_cast<double>(slots.size() - start);
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = start; k < slots.size(); ++k) {
        mx += slots[k];
        my += qmax[k];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = start; k < slots.size(); ++k) {
        sxy += (slots[k] - mx) * (qmax[k] - my);
        sxx += (slots[k] - mx) * (slots[k] - mx);
    }
    StabilityVerdict v;
    v.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    v.stable = v.slope <= threshold;
    return v;
}

StabilityVerdict stability_verdict(const Trace &trace, double threshold) {
    std::vector<double> x;
    std::vector<double> y;
    x.reserve(trace.rows.size());
    y.reserve(trace.rows.size());
    for (const auto &row : trace.rows) {
        x.push_back(static_cast<double>(row.slot));
        y.push_back(static_cast<double>(*std::max_element(row.q.begin(), row.q.end())));
    }
    return stability_verdict(x, y, threshold);
}

} // namespace csma
