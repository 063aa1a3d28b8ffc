#pragma once

#include "csma/graph.hpp"
#include "csma/protocol.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace csma {

struct SimConfig {
    InterferenceGraph graph;
    std::vector<double> lambda;
    WeightFunction f;
    std::uint64_t slots = 10000;
    std::uint64_t seed = 1;
    /// Q_max is read from this many slots earlier (0 = exact oracle).
    std::uint64_t qmax_lag = 0;
    std::uint64_t trace_stride = 1;
    /// Fixed weights instead of queue-driven ones.
    std::optional<std::vector<double>> w_override;
};

/// Throws invalid_config / invalid_rate / invalid_weight on bad input.
void validate(const SimConfig &cfg);

struct TraceRow {
    std::uint64_t slot = 0;
    /// Queues at the start of the slot.
    std::vector<std::uint64_t> q;
    NodeSet sigma;
    NodeSet attempts;
    /// Arrivals and true departures accumulated before this slot.
    std::vector<std::uint64_t> arrivals_before;
    std::vector<std::uint64_t> departures_before;
};

struct TraceSummary {
    std::uint64_t slots = 0;
    std::vector<std::uint64_t> arrivals;
    std::vector<std::uint64_t> departures;
    std::vector<std::uint64_t> successes;
    std::vector<double> mean_queue;
    std::vector<std::uint64_t> final_q;
    std::uint64_t final_qmax = 0;
    std::uint64_t peak_qmax = 0;
    /// Slot count per schedule mask; filled only when n <= 20.
    std::map<Mask, std::uint64_t> occupancy;
};

struct Trace {
    std::size_t n = 0;
    std::vector<TraceRow> rows;
    TraceSummary summary;
};

/// Closed loop: weights from queues, one protocol slot, then depart and
/// arrive. Deterministic given cfg.seed.
Trace run_simulation(const SimConfig &cfg);

/// Q_i(t) = A_i(<t) - D_i(<t) at every sampled row (Q(0) = 0).
bool conservation_holds(const Trace &trace);

struct StabilityVerdict {
    bool stable = true;
    double slope = 0.0;
};

inline constexpr double kDefaultSlopeThreshold = 1e-3;
inline constexpr std::size_t kMinStabilityRows = 10000;

/// Least-squares slope of Q_max over the second half of the samples.
StabilityVerdict stability_verdict(std::span<const double> slots,
                                   std::span<const double> qmax,
                                   double threshold = kDefaultSlopeThreshold);
StabilityVerdict stability_verdict(const Trace &trace,
                                   double threshold = kDefaultSlopeThreshold);

} // namespace csma
