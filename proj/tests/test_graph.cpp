#include "doctest.h"

#include "csma/error.hpp"
#include "csma/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace csma;

namespace {

InterferenceGraph k2() { return InterferenceGraph::complete(2); }

InterferenceGraph random_graph(std::size_t n, double p, std::mt19937_64 &rng) {
    std::bernoulli_distribution coin(p);
    InterferenceGraph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng))
                g.add_edge(static_cast<int>(i), static_cast<int>(j));
    return g;
}

Errc code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("expected an exception");
    return Errc::invalid_argument;
}

} // namespace

TEST_CASE("graph construction rejects malformed edges") {
    InterferenceGraph g(3);
    g.add_edge(0, 1);
    CHECK(code_of([&] { g.add_edge(1, 0); }) == Errc::invalid_graph);
    CHECK(code_of([&] { g.add_edge(2, 2); }) == Errc::invalid_graph);
    CHECK(code_of([&] { g.add_edge(0, 3); }) == Errc::invalid_graph);
    CHECK(code_of([&] { g.add_edge(-1, 0); }) == Errc::invalid_graph);
    CHECK(g.edge_count() == 1);
}

TEST_CASE("neighbor queries are symmetric") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_graph(8, 0.4, rng);
        for (int i = 0; i < 8; ++i)
            for (int j : g.neighbors(i)) {
                CHECK(g.adjacent(j, i));
                CHECK(((g.neighbor_mask(j) >> i) & 1U) == 1U);
            }
    }
}

TEST_CASE("enumerate_independent_sets on small graphs") {
    CHECK(enumerate_independent_sets(k2()) == std::vector<Mask>{0b00, 0b01, 0b10});
    const auto edgeless = enumerate_independent_sets(InterferenceGraph(3));
    CHECK(edgeless.size() == 8);
    for (Mask m = 0; m < 8; ++m)
        CHECK(edgeless[m] == m);
    CHECK(enumerate_independent_sets(InterferenceGraph::path(3)) ==
          std::vector<Mask>{0b000, 0b001, 0b010, 0b100, 0b101});
    CHECK(code_of([] { enumerate_independent_sets(InterferenceGraph(21)); }) ==
          Errc::state_space_too_large);
}

TEST_CASE("independent sets are closed under subsets and bounded by 2^n") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + trial % 9;
        const auto g = random_graph(n, 0.35, rng);
        const auto sets = enumerate_independent_sets(g);
        CHECK(std::is_sorted(sets.begin(), sets.end()));
        CHECK(sets.front() == 0);
        CHECK(sets.size() <= (std::size_t{1} << n));
        for (Mask s : sets)
            for (Mask sub = s;; sub = (sub - 1) & s) {
                CHECK(std::binary_search(sets.begin(), sets.end(), sub));
                if (sub == 0)
                    break;
            }
    }
}

TEST_CASE("free_nodes") {
    CHECK(free_nodes(k2(), 0b01) == 0);
    CHECK(free_nodes(k2(), 0b00) == 0b11);
    CHECK(free_nodes(InterferenceGraph::path(3), 0b001) == 0b100);
    CHECK(free_nodes(InterferenceGraph::cycle(5), 0) == 0b11111);
    CHECK(code_of([] { free_nodes(k2(), 0b11); }) == Errc::invalid_schedule);

    std::mt19937_64 rng(3);
    const auto g = random_graph(7, 0.3, rng);
    for (Mask s : enumerate_independent_sets(g))
        for (Mask fr = free_nodes(g, s); fr != 0; fr &= fr - 1)
            CHECK(g.is_independent(s | (fr & -fr)));
}

TEST_CASE("max_weight_independent_set") {
    const double ln2 = std::log(2.0);
    auto r = max_weight_independent_set(k2(), std::vector{ln2, ln2});
    CHECK(r.schedule == 0b01);
    CHECK(r.value == doctest::Approx(ln2));

    r = max_weight_independent_set(InterferenceGraph::path(3), std::vector{1.0, 1.5, 1.0});
    CHECK(r.schedule == 0b101);
    CHECK(r.value == doctest::Approx(2.0));

    r = max_weight_independent_set(InterferenceGraph::cycle(5), std::vector<double>(5, 0.0));
    CHECK(r.schedule == 0);
    CHECK(r.value == 0.0);

    CHECK(code_of([] {
              max_weight_independent_set(InterferenceGraph::path(2), std::vector{1.0, -0.1});
          }) == Errc::invalid_weight);
}

TEST_CASE("maximal independent sets of a 5-cycle") {
    const auto sets = maximal_independent_sets(InterferenceGraph::cycle(5));
    CHECK(sets.size() == 5);
    for (Mask s : sets)
        CHECK(popcount(s) == 2);
}

TEST_CASE("edge list round trip and parse errors") {
    const auto g = InterferenceGraph::grid(2, 3);
    std::stringstream ss;
    write_edge_list(ss, g);
    const auto back = read_edge_list(ss);
    CHECK(back.size() == 6);
    CHECK(back.edges() == g.edges());

    std::istringstream no_header("0 1\n");
    CHECK(code_of([&] { read_edge_list(no_header); }) == Errc::invalid_graph);
    std::istringstream junk("n 3\n0 1 2\n");
    CHECK(code_of([&] { read_edge_list(junk); }) == Errc::invalid_graph);
    std::istringstream comments("# conflict graph\nn 2\n\n0 1\n");
    CHECK(read_edge_list(comments).edge_count() == 1);
}

TEST_CASE("node set hex formatting") {
    NodeSet s(70);
    CHECK(s.to_hex() == "0x0");
    s.set(0);
    s.set(69);
    CHECK(s.to_hex() == "0x200000000000000001");
    CHECK(s.count() == 2);
    CHECK(NodeSet::from_mask(3, 0b101).to_hex() == "0x5");
    CHECK(NodeSet::from_mask(3, 0b101).to_mask() == 0b101);
}
