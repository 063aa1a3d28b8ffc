#pragma once

#include "csma/graph.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace csma {

/// Q(t+1) = Q(t) - sigma * 1{Q > 0} + A(t). Departures happen before arrivals,
/// so a scheduled empty queue sends a dummy packet and stays at its arrival.
std::vector<std::uint64_t> update_queues(std::span<const std::uint64_t> q,
                                         const NodeSet &sigma,
                                         std::span<const std::uint8_t> arrivals);

/// Throws invalid_rate unless every entry lies in [0, 1].
void validate_rates(std::span<const double> lambda);

/// Bernoulli(lambda_i) arrivals for one slot from the counter-based coins.
std::vector<std::uint8_t> sample_arrivals(std::span<const double> lambda,
                                          std::uint64_t seed, std::uint64_t slot);
void sample_arrivals_into(std::span<const double> lambda, std::uint64_t seed,
                          std::uint64_t slot, std::span<std::uint8_t> out);

struct CapacityMargin {
    /// sup{t : t * lambda in the capacity region}; +inf when lambda = 0.
    double t_star = 0.0;
    bool unbounded = false;
    /// t_star > 1, i.e. lambda lies in the interior.
    bool interior = false;
    /// "p/q" when solved in exact rational arithmetic (n <= 6).
    std::optional<std::string> exact;
    /// Mixture weights over the maximal independent sets at the optimum.
    std::vector<std::pair<Mask, double>> mixture;
};

/// Solves max t s.t. t*lambda <= sum alpha_s s, sum alpha <= 1, alpha >= 0
/// over the maximal independent sets of g.
CapacityMargin capacity_margin(const InterferenceGraph &g,
                               std::span<const double> lambda);

} // namespace csma
