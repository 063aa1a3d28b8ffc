#include "csma/protocol.hpp"

#include "csma/error.hpp"
#include "csma/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csma {

namespace {

constexpr double kE = std::numbers::e;

// ln(x + e) from L = ln(1 + x).
double log_x_plus_e(double l) { return l + std::log1p((kE - 1.0) * std::exp(-l)); }

} // namespace

std::string_view WeightFunction::name() const noexcept {
    return m_kind == WeightKind::sqrt_log ? "sqrt_log" : "loglog";
}

WeightFunction WeightFunction::from_name(std::string_view name) {
    if (name == "sqrt_log")
        return WeightFunction(WeightKind::sqrt_log);
    if (name == "loglog")
        return WeightFunction(WeightKind::loglog);
    fail(Errc::invalid_config, "unknown weight function '" + std::string(name) +
                                   "' (expected sqrt_log or loglog)");
}

double WeightFunction::operator()(double x) const {
    if (m_kind == WeightKind::sqrt_log)
        return std::sqrt(std::log1p(x));
    return std::log(std::log(x + kE));
}

double WeightFunction::derivative(double x) const {
    if (m_kind == WeightKind::sqrt_log)
        return 1.0 / (2.0 * (x + 1.0) * std::sqrt(std::log1p(x)));
    return 1.0 / ((x + kE) * std::log(x + kE));
}

double WeightFunction::inverse(double y) const {
    if (m_kind == WeightKind::sqrt_log)
        return std::expm1(y * y);
    return std::exp(std::exp(y)) - kE;
}

double WeightFunction::value_log1p(double l) const {
    if (m_kind == WeightKind::sqrt_log)
        return std::sqrt(l);
    return std::log(log_x_plus_e(l));
}

double WeightFunction::log_derivative_log1p(double l) const {
    if (m_kind == WeightKind::sqrt_log)
        return -l - std::log(2.0 * std::sqrt(l));
    const double m = log_x_plus_e(l);
    return -m - std::log(m);
}

double WeightFunction::inverse_log1p(double y) const {
    if (m_kind == WeightKind::sqrt_log)
        return y * y;
    const double m = std::exp(y);
    return m + std::log1p(-(kE - 1.0) * std::exp(-m));
}

std::vector<double> compute_weights(std::span<const std::uint64_t> q,
                                    const WeightFunction &f,
                                    std::optional<std::uint64_t> qmax) {
    std::uint64_t top = 0;
    if (qmax)
        top = *qmax;
    else if (!q.empty())
        top = *std::max_element(q.begin(), q.end());
    const double floor = std::sqrt(f(static_cast<double>(top)));
    std::vector<double> w(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        w[i] = std::exp(std::max(f(static_cast<double>(q[i])), floor));
    return w;
}

FPropertyReport check_f_property_log1p(const WeightFunction &f, double delta,
                                       std::span<const double> log1p_grid) {
    if (!(delta > 0.0 && delta < 1.0))
        fail(Errc::invalid_delta, "delta must lie in (0, 1)");
    if (log1p_grid.size() < 2)
        fail(Errc::invalid_argument, "grid needs at least two points");
    if (!(log1p_grid[0] >= std::numbers::ln2))
        fail(Errc::invalid_argument, "grid must start at x >= 1");
    for (std::size_t k = 1; k < log1p_grid.size(); ++k)
        if (!(log1p_grid[k] > log1p_grid[k - 1]))
            fail(Errc::invalid_argument, "grid must be strictly increasing");

    FPropertyReport r;
    r.log1p_x.assign(log1p_grid.begin(), log1p_grid.end());
    for (double l : log1p_grid) {
        const double fx = f.value_log1p(l);
        const double lv = fx + f.log_derivative_log1p(f.inverse_log1p(delta * fx));
        r.log_values.push_back(lv);
        r.values.push_back(std::exp(lv));
    }
    const std::size_t half = r.log_values.size() / 2;
    r.decreasing_tail = true;
    for (std::size_t k = std::max<std::size_t>(half, 1); k < r.log_values.size(); ++k)
        if (!(r.log_values[k] < r.log_values[k - 1]))
            r.decreasing_tail = false;
    return r;
}

FPropertyReport check_f_property(const WeightFunction &f, double delta,
                                 std::span<const double> x_grid) {
    std::vector<double> l(x_grid.size());
    std::transform(x_grid.begin(), x_grid.end(), l.begin(),
                   [](double x) { return std::log1p(x); });
    return check_f_property_log1p(f, delta, l);
}

std::vector<Role> classify_roles(const InterferenceGraph &g,
                                 std::span<const NodeObservation> obs_prev) {
    const std::size_t n = g.size();
    if (obs_prev.size() != n)
        fail(Errc::invalid_feedback, "observation vector length does not match n");
    std::vector<Role> roles(n, Role::free);
    for (std::size_t i = 0; i < n; ++i) {
        const auto &o = obs_prev[i];
        if (o.success && !o.attempted)
            fail(Errc::invalid_feedback,
                 "node " + std::to_string(i) + " succeeded without attempting");
        if (o.success && o.neighbor_success)
            fail(Errc::invalid_feedback, "node " + std::to_string(i) +
                                             " and a neighbor both succeeded");
        bool any = false;
        for (int j : g.neighbors(static_cast<int>(i)))
            any = any || obs_prev[j].success;
        if (any != o.neighbor_success)
            fail(Errc::invalid_feedback,
                 "neighbor_success of node " + std::to_string(i) +
                     " disagrees with its neighbors' outcomes");
        if (o.success)
            roles[i] = Role::prev_success;
        else if (o.neighbor_success)
            roles[i] = Role::blocked;
    }
    return roles;
}

std::vector<NodeObservation> observe(const InterferenceGraph &g,
                                     const NodeSet &attempts,
                                     const NodeSet &successes) {
    std::vector<NodeObservation> obs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        obs[i].attempted = attempts.test(i);
        obs[i].success = successes.test(i);
        for (int j : g.neighbors(static_cast<int>(i)))
            if (successes.test(j)) {
                obs[i].neighbor_success = true;
                break;
            }
    }
    return obs;
}

void CoinBlock::fill(std::uint64_t seed, std::uint64_t slot, std::size_t n) {
    u_pause.resize(n);
    u_keep.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        u_pause[i] = counter_uniform(seed, slot, i, CoinPurpose::pause);
        u_keep[i] = counter_uniform(seed, slot, i, CoinPurpose::keep);
    }
}

CoinBlock CoinBlock::from_seed(std::uint64_t seed, std::uint64_t slot,
                               std::size_t n) {
    CoinBlock c;
    c.fill(seed, slot, n);
    return c;
}

SlotOutcome slot_transition(const InterferenceGraph &g, const NodeSet &sigma_prev,
                            std::span<const double> w, const CoinBlock &coins) {
    const std::size_t n = g.size();
    if (sigma_prev.size() != n || !g.is_independent(sigma_prev))
        fail(Errc::invalid_schedule, "previous schedule is not an independent set");
    if (w.size() != n || coins.u_pause.size() != n || coins.u_keep.size() != n)
        fail(Errc::invalid_argument, "weights or coins do not match n");

    SlotOutcome out{NodeSet(n), NodeSet(n), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const bool held = sigma_prev.test(i);
        bool attempt = false;
        if (coins.u_pause[i] < 0.5) {
            attempt = held;
        } else if (held) {
            attempt = coins.u_keep[i] < 1.0 - 1.0 / w[i];
        } else {
            bool blocked = false;
            for (int j : g.neighbors(static_cast<int>(i)))
                if (sigma_prev.test(j)) {
                    blocked = true;
                    break;
                }
            attempt = !blocked;
        }
        out.attempts.set(i, attempt);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!out.attempts.test(i))
            continue;
        bool clear = true;
        for (int j : g.neighbors(static_cast<int>(i)))
            if (out.attempts.test(j)) {
                clear = false;
                break;
            }
        out.schedule.set(i, clear);
    }
    out.observations = observe(g, out.attempts, out.schedule);
    return out;
}

} // namespace csma
