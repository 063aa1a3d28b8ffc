#pragma once

#include "csma/graph.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace csma {

enum class WeightKind { sqrt_log, loglog };

/// Slowly growing f with f(0) = 0 used to map backlogs to log-weights.
///
/// sqrt_log: f(x) = sqrt(ln(x + 1))
/// loglog:   f(x) = ln(ln(x + e))
///
/// The *_log1p members take L = ln(1 + x) instead of x, so grids far beyond
/// the double range (x = e^900) can still be evaluated.
class WeightFunction {
  public:
    constexpr explicit WeightFunction(WeightKind kind = WeightKind::sqrt_log)
        : m_kind(kind) {}

    WeightKind kind() const noexcept { return m_kind; }
    std::string_view name() const noexcept;
    static WeightFunction from_name(std::string_view name);

    double operator()(double x) const;
    double derivative(double x) const;
    double inverse(double y) const;

    double value_log1p(double l) const;
    double log_derivative_log1p(double l) const;
    /// ln(1 + f^{-1}(y)).
    double inverse_log1p(double y) const;

  private:
    WeightKind m_kind;
};

/// W_i = exp(max{f(Q_i), sqrt(f(Q_max))}). When `qmax` is empty the true
/// maximum of `q` is used.
std::vector<double> compute_weights(std::span<const std::uint64_t> q,
                                    const WeightFunction &f,
                                    std::optional<std::uint64_t> qmax = {});

struct FPropertyReport {
    std::vector<double> log1p_x;
    std::vector<double> log_values;
    std::vector<double> values;
    /// Strictly decreasing over the second half of the grid and still
    /// shrinking at the last point.
    bool decreasing_tail = false;
};

/// Evaluates exp(f(x)) * f'(f^{-1}(delta * f(x))) along an increasing grid.
FPropertyReport check_f_property(const WeightFunction &f, double delta,
                                 std::span<const double> x_grid);
/// Same, with the grid given as ln(1 + x).
FPropertyReport check_f_property_log1p(const WeightFunction &f, double delta,
                                       std::span<const double> log1p_grid);

struct NodeObservation {
    bool attempted = false;
    bool success = false;
    bool neighbor_success = false;

    bool operator==(const NodeObservation &) const = default;
};

enum class Role { prev_success, blocked, free };

/// Rule selection from last slot's carrier-sense feedback. Throws
/// invalid_feedback when the observations cannot have come from one slot.
std::vector<Role> classify_roles(const InterferenceGraph &g,
                                 std::span<const NodeObservation> obs_prev);

/// Feedback each node sees given who attempted and who succeeded.
std::vector<NodeObservation> observe(const InterferenceGraph &g,
                                     const NodeSet &attempts,
                                     const NodeSet &successes);

/// Per-node uniforms for one slot.
struct CoinBlock {
    std::vector<double> u_pause;
    std::vector<double> u_keep;

    static CoinBlock from_seed(std::uint64_t seed, std::uint64_t slot,
                               std::size_t n);
    void fill(std::uint64_t seed, std::uint64_t slot, std::size_t n);
};

struct SlotOutcome {
    NodeSet attempts;
    NodeSet schedule;
    std::vector<NodeObservation> observations;
};

/// One slot of the randomized access rules followed by collision resolution.
///
/// A node whose pause coin is below 1/2 holds its previous state (transmit
/// iff it succeeded last slot). Otherwise a previous winner keeps
/// transmitting with probability 1 - 1/W_i, a node next to a previous
/// winner stays silent, and every other node attempts. A node succeeds iff
/// none of its neighbors attempted.
SlotOutcome slot_transition(const InterferenceGraph &g, const NodeSet &sigma_prev,
                            std::span<const double> w, const CoinBlock &coins);

} // namespace csma
