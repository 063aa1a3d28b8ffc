#include "doctest.h"

#include "csma/error.hpp"
#include "csma/protocol.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace csma;

namespace {

const WeightFunction kSqrtLog{WeightKind::sqrt_log};
const WeightFunction kLogLog{WeightKind::loglog};

CoinBlock coins(std::vector<double> pause, std::vector<double> keep) {
    return CoinBlock{std::move(pause), std::move(keep)};
}

} // namespace

TEST_CASE("weight functions vanish at zero and increase") {
    for (const auto &f : {kSqrtLog, kLogLog}) {
        CHECK(f(0.0) == 0.0);
        double prev = 0.0;
        for (double x = 0.5; x < 1e6; x *= 3.0) {
            CHECK(f(x) > prev);
            prev = f(x);
            CHECK(f.inverse(f(x)) == doctest::Approx(x).epsilon(1e-9));
            CHECK(f.value_log1p(std::log1p(x)) == doctest::Approx(f(x)).epsilon(1e-12));
            // Central difference against the closed-form derivative.
            const double h = 1e-5 * x;
            CHECK((f(x + h) - f(x - h)) / (2 * h) ==
                  doctest::Approx(f.derivative(x)).epsilon(1e-6));
            CHECK(std::log(f.derivative(x)) ==
                  doctest::Approx(f.log_derivative_log1p(std::log1p(x))).epsilon(1e-10));
        }
    }
    CHECK(WeightFunction::from_name("loglog").kind() == WeightKind::loglog);
    CHECK_THROWS_AS(WeightFunction::from_name("linear"), Error);
}

TEST_CASE("compute_weights") {
    const std::vector<std::uint64_t> zero(4, 0);
    for (double w : compute_weights(zero, kSqrtLog))
        CHECK(w == 1.0);

    // Q_i = Q_max = 54 (just above e^4 - 1): f = sqrt(ln 55) exceeds its own root.
    const double e2 = std::exp(2.0);
    const std::vector<std::uint64_t> single{54};
    CHECK(compute_weights(single, kSqrtLog)[0] ==
          doctest::Approx(std::exp(std::sqrt(std::log(55.0)))).epsilon(1e-12));
    CHECK(compute_weights(single, kSqrtLog)[0] > e2);

    // Integer backlogs: Q_i = 0 but Q_max ~ e^16 - 1 gives W ~ e^2 from the floor.
    const auto qmax = static_cast<std::uint64_t>(std::llround(std::expm1(16.0)));
    const std::vector<std::uint64_t> q{0, qmax};
    const auto w = compute_weights(q, kSqrtLog);
    const double lq = std::log(static_cast<double>(qmax) + 1.0);
    CHECK(w[0] == doctest::Approx(std::exp(std::pow(lq, 0.25))).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(std::exp(std::sqrt(lq))).epsilon(1e-12));
    CHECK(w[0] == doctest::Approx(e2).epsilon(1e-7));

    // An explicit (lagged) Q_max replaces the true maximum.
    const auto lagged = compute_weights(q, kSqrtLog, 0);
    CHECK(lagged[0] == 1.0);

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::uint64_t> d(0, 1000000);
    for (int t = 0; t < 200; ++t) {
        std::vector<std::uint64_t> r{d(rng), d(rng), d(rng)};
        for (double v : compute_weights(r, kLogLog))
            CHECK(v >= 1.0);
    }
}

TEST_CASE("check_f_property closed form for sqrt_log") {
    const std::vector<double> x{std::expm1(99.0), std::expm1(100.0)};
    const auto rep = check_f_property(kSqrtLog, 0.5, x);
    // exp(10) * f'(e^25 - 1) = e^-15 / 10.
    CHECK(rep.values[1] == doctest::Approx(std::exp(-15.0) / 10.0).epsilon(1e-9));
    CHECK(rep.log_values[1] == doctest::Approx(-15.0 - std::log(10.0)).epsilon(1e-12));
}

TEST_CASE("check_f_property sweeps decrease on the tail") {
    std::vector<double> grid;
    for (int k = 5; k <= 30; ++k)
        grid.push_back(static_cast<double>(k * k));
    const auto a = check_f_property_log1p(kSqrtLog, 0.9, grid);
    CHECK(a.decreasing_tail);
    // exp(k) e^{-0.81 k^2} / (1.8 k) in closed form.
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double k = 5.0 + static_cast<double>(i);
        CHECK(a.log_values[i] ==
              doctest::Approx(k - 0.81 * k * k - std::log(1.8 * k)).epsilon(1e-9));
    }
    const auto b = check_f_property_log1p(kLogLog, 0.5, grid);
    CHECK(b.decreasing_tail);
    CHECK(b.values.back() < b.values[grid.size() / 2]);

    CHECK_THROWS_AS(check_f_property_log1p(kSqrtLog, 1.0, grid), Error);
    CHECK_THROWS_AS(check_f_property_log1p(kSqrtLog, 0.0, grid), Error);
    try {
        check_f_property_log1p(kSqrtLog, 1.5, grid);
    } catch (const Error &e) {
        CHECK(e.code() == Errc::invalid_delta);
    }
}

TEST_CASE("classify_roles") {
    const auto k2 = InterferenceGraph::complete(2);
    std::vector<NodeObservation> obs{{true, true, false}, {false, false, true}};
    CHECK(classify_roles(k2, obs) == std::vector<Role>{Role::prev_success, Role::blocked});

    obs = {{true, false, false}, {true, false, false}};
    CHECK(classify_roles(k2, obs) == std::vector<Role>{Role::free, Role::free});

    const auto path = InterferenceGraph::path(3);
    const std::vector<NodeObservation> p{
        {true, true, false}, {false, false, true}, {false, false, false}};
    CHECK(classify_roles(path, p) ==
          std::vector<Role>{Role::prev_success, Role::blocked, Role::free});

    auto code = [&](std::vector<NodeObservation> o) {
        try {
            classify_roles(k2, o);
        } catch (const Error &e) {
            return e.code();
        }
        return Errc::invalid_argument;
    };
    CHECK(code({{false, true, false}, {false, false, true}}) == Errc::invalid_feedback);
    CHECK(code({{true, true, false}, {true, true, false}}) == Errc::invalid_feedback);
    CHECK(code({{false, false, true}, {false, false, false}}) == Errc::invalid_feedback);
}

TEST_CASE("slot_transition rule traces") {
    const auto k2 = InterferenceGraph::complete(2);
    const std::vector<double> w{2.0, 2.0};

    // Both active and free: collision.
    auto out = slot_transition(k2, NodeSet(2), w, coins({0.7, 0.9}, {0.1, 0.1}));
    CHECK(out.attempts.count() == 2);
    CHECK(out.schedule.empty());
    for (const auto &o : out.observations)
        CHECK(o == NodeObservation{true, false, false});

    // Node 0 pauses and holds its success; node 1 is blocked either way.
    for (double u1 : {0.1, 0.8}) {
        out = slot_transition(k2, NodeSet::from_mask(2, 0b01), w, coins({0.2, u1}, {0.99, 0.0}));
        CHECK(out.attempts.to_mask() == 0b01);
        CHECK(out.schedule.to_mask() == 0b01);
        CHECK(out.observations[1] == NodeObservation{false, false, true});
    }

    // Active winner with u_keep above 1 - 1/w stops.
    out = slot_transition(k2, NodeSet::from_mask(2, 0b01), w, coins({0.6, 0.6}, {0.6, 0.0}));
    CHECK(out.schedule.empty());

    // Everyone pauses from the empty schedule: silence.
    const auto c5 = InterferenceGraph::cycle(5);
    out = slot_transition(c5, NodeSet(5), std::vector<double>(5, 3.0),
                          coins(std::vector<double>(5, 0.1), std::vector<double>(5, 0.5)));
    CHECK(out.attempts.empty());
    CHECK(out.schedule.empty());

    CHECK_THROWS_AS(slot_transition(k2, NodeSet::from_mask(2, 0b11), w, coins({0, 0}, {0, 0})),
                    Error);
}

TEST_CASE("slot_transition marginals match the rule probabilities") {
    // Path 0-1-2 with sigma_prev = {0}: node 0 previous winner, node 1
    // blocked, node 2 free.
    const auto g = InterferenceGraph::path(3);
    const std::vector<double> w{3.0, 5.0, 7.0};
    const auto prev = NodeSet::from_mask(3, 0b001);
    const int draws = 1000000;
    int keep = 0;
    int blocked = 0;
    int free_attempt = 0;
    CoinBlock c;
    for (int t = 0; t < draws; ++t) {
        c.fill(42, static_cast<std::uint64_t>(t), 3);
        const auto out = slot_transition(g, prev, w, c);
        keep += out.attempts.test(0);
        blocked += out.attempts.test(1);
        free_attempt += out.attempts.test(2);
        CHECK_FALSE(out.schedule.test(1));
    }
    CHECK(std::abs(keep / double(draws) - (1.0 - 1.0 / 6.0)) < 0.003);
    CHECK(blocked == 0);
    CHECK(std::abs(free_attempt / double(draws) - 0.5) < 0.003);
}

TEST_CASE("slot_transition always yields an independent set") {
    std::mt19937_64 rng(99);
    std::bernoulli_distribution edge(0.4);
    for (int trial = 0; trial < 50; ++trial) {
        InterferenceGraph g(8);
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j)
                if (edge(rng))
                    g.add_edge(i, j);
        NodeSet sigma(8);
        const std::vector<double> w(8, 1.5);
        for (std::uint64_t slot = 0; slot < 200; ++slot) {
            const auto out = slot_transition(g, sigma, w, CoinBlock::from_seed(trial, slot, 8));
            CHECK(g.is_independent(out.schedule));
            // Winners are either previous winners or were free last slot.
            for (std::size_t i = 0; i < 8; ++i)
                if (out.schedule.test(i) && !sigma.test(i))
                    for (int j : g.neighbors(static_cast<int>(i)))
                        CHECK_FALSE(sigma.test(j));
            // Feedback is consistent with the success pattern.
            CHECK_NOTHROW(classify_roles(g, out.observations));
            sigma = out.schedule;
        }
    }
}

TEST_CASE("counter coins are order independent") {
    const auto a = CoinBlock::from_seed(7, 123, 5);
    CoinBlock b;
    b.fill(7, 123, 5);
    CHECK(a.u_pause == b.u_pause);
    CHECK(a.u_keep == b.u_keep);
    CHECK(a.u_pause != CoinBlock::from_seed(7, 124, 5).u_pause);
}
