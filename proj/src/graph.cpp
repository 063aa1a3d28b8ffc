#include "csma/graph.hpp"

#include "csma/error.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace csma {

NodeSet NodeSet::from_mask(std::size_t n, Mask mask) {
    NodeSet s(n);
    for (std::size_t i = 0; i < n && i < 32; ++i)
        if ((mask >> i) & 1U)
            s.set(i);
    return s;
}

void NodeSet::clear() noexcept { std::fill(m_words.begin(), m_words.end(), 0); }

std::size_t NodeSet::count() const noexcept {
    std::size_t c = 0;
    for (auto w : m_words)
        c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

Mask NodeSet::to_mask() const {
    if (m_size > 32)
        fail(Errc::state_space_too_large, "node set too large for a 32-bit mask");
    return m_words.empty() ? 0 : static_cast<Mask>(m_words[0]);
}

std::string NodeSet::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    const std::size_t nibbles = std::max<std::size_t>(1, (m_size + 3) / 4);
    bool leading = true;
    for (std::size_t k = nibbles; k-- > 0;) {
        const std::size_t bit = 4 * k;
        const unsigned v = (m_words[bit / 64] >> (bit % 64)) & 0xFU;
        if (leading && v == 0 && k > 0)
            continue;
        leading = false;
        out.push_back(digits[v]);
    }
    return "0x" + out;
}

InterferenceGraph::InterferenceGraph(std::size_t n) : m_adj(n) {
    if (n <= 32)
        m_nbr_mask.assign(n, 0);
}

InterferenceGraph::InterferenceGraph(std::size_t n, std::span<const Edge> edges)
    : InterferenceGraph(n) {
    for (auto [i, j] : edges)
        add_edge(i, j);
}

void InterferenceGraph::add_edge(int i, int j) {
    const auto n = static_cast<int>(size());
    if (i < 0 || j < 0 || i >= n || j >= n) {
        std::ostringstream msg;
        msg << "edge (" << i << "," << j << ") has an endpoint outside [0," << n
            << ")";
        fail(Errc::invalid_graph, msg.str());
    }
    if (i == j)
        fail(Errc::invalid_graph, "self-loop at node " + std::to_string(i));
    auto &ai = m_adj[i];
    auto pos = std::lower_bound(ai.begin(), ai.end(), j);
    if (pos != ai.end() && *pos == j) {
        std::ostringstream msg;
        msg << "duplicate edge (" << i << "," << j << ")";
        fail(Errc::invalid_graph, msg.str());
    }
    ai.insert(pos, j);
    auto &aj = m_adj[j];
    aj.insert(std::lower_bound(aj.begin(), aj.end(), i), i);
    m_edges.emplace_back(std::min(i, j), std::max(i, j));
    if (!m_nbr_mask.empty()) {
        m_nbr_mask[i] |= Mask{1} << j;
        m_nbr_mask[j] |= Mask{1} << i;
    }
}

bool InterferenceGraph::adjacent(int i, int j) const {
    const auto &ai = m_adj.at(i);
    return std::binary_search(ai.begin(), ai.end(), j);
}

Mask InterferenceGraph::neighbor_mask(int i) const {
    if (m_nbr_mask.empty())
        fail(Errc::state_space_too_large, "neighbor masks need n <= 32");
    return m_nbr_mask.at(i);
}

bool InterferenceGraph::is_independent(Mask set) const {
    if (size() < 32 && (set >> size()) != 0)
        return false;
    for (Mask rest = set; rest != 0; rest &= rest - 1) {
        const int i = std::countr_zero(rest);
        if (neighbor_mask(i) & set)
            return false;
    }
    return true;
}

bool InterferenceGraph::is_independent(const NodeSet &set) const {
    if (set.size() != size())
        return false;
    for (const auto &[i, j] : m_edges)
        if (set.test(i) && set.test(j))
            return false;
    return true;
}

InterferenceGraph InterferenceGraph::path(std::size_t n) {
    InterferenceGraph g(n);
    for (std::size_t i = 1; i < n; ++i)
        g.add_edge(static_cast<int>(i - 1), static_cast<int>(i));
    return g;
}

InterferenceGraph InterferenceGraph::cycle(std::size_t n) {
    InterferenceGraph g = path(n);
    if (n >= 3)
        g.add_edge(static_cast<int>(n - 1), 0);
    return g;
}

InterferenceGraph InterferenceGraph::star(std::size_t n) {
    InterferenceGraph g(n);
    for (std::size_t i = 1; i < n; ++i)
        g.add_edge(0, static_cast<int>(i));
    return g;
}

InterferenceGraph InterferenceGraph::complete(std::size_t n) {
    InterferenceGraph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            g.add_edge(static_cast<int>(i), static_cast<int>(j));
    return g;
}

InterferenceGraph InterferenceGraph::grid(std::size_t rows, std::size_t cols) {
    InterferenceGraph g(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const auto id = static_cast<int>(r * cols + c);
            if (c + 1 < cols)
                g.add_edge(id, id + 1);
            if (r + 1 < rows)
                g.add_edge(id, id + static_cast<int>(cols));
        }
    return g;
}

InterferenceGraph read_edge_list(std::istream &in) {
    std::string line;
    long long n = -1;
    std::vector<Edge> edges;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first) || first[0] == '#')
            continue;
        if (n < 0) {
            if (first != "n" || !(ls >> n) || n < 1)
                fail(Errc::invalid_graph,
                     "edge list must start with a header line 'n <count>'");
            continue;
        }
        long long i = 0;
        long long j = 0;
        std::string extra;
        std::istringstream es(line);
        if (!(es >> i >> j) || (es >> extra))
            fail(Errc::invalid_graph,
                 "malformed edge on line " + std::to_string(lineno));
        edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
    if (n < 0)
        fail(Errc::invalid_graph, "edge list is missing the 'n <count>' header");
    return InterferenceGraph(static_cast<std::size_t>(n), edges);
}

InterferenceGraph load_edge_list(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        fail(Errc::io_error, "cannot open edge list '" + path + "'");
    return read_edge_list(in);
}

void write_edge_list(std::ostream &out, const InterferenceGraph &g) {
    out << "n " << g.size() << '\n';
    for (const auto &[i, j] : g.edges())
        out << i << ' ' << j << '\n';
}

namespace {

void require_enumerable(const InterferenceGraph &g) {
    if (g.size() > kMaxEnumerationNodes)
        fail(Errc::state_space_too_large,
             "exact enumeration needs n <= 20, got n = " +
                 std::to_string(g.size()));
}

} // namespace

std::vector<Mask> enumerate_independent_sets(const InterferenceGraph &g) {
    require_enumerable(g);
    const Mask limit = Mask{1} << g.size();
    std::vector<Mask> sets;
    for (Mask m = 0; m < limit; ++m)
        if (g.is_independent(m))
            sets.push_back(m);
    return sets;
}

std::vector<Mask> maximal_independent_sets(const InterferenceGraph &g) {
    std::vector<Mask> out;
    const auto all = enumerate_independent_sets(g);
    for (Mask m : all)
        if (free_nodes(g, m) == 0)
            out.push_back(m);
    return out;
}

Mask free_nodes(const InterferenceGraph &g, Mask sigma) {
    require_enumerable(g);
    if (!g.is_independent(sigma))
        fail(Errc::invalid_schedule, "schedule " + format_members(sigma) +
                                         " is not an independent set");
    Mask out = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Mask bit = Mask{1} << i;
        if (!(sigma & bit) && !(g.neighbor_mask(static_cast<int>(i)) & sigma))
            out |= bit;
    }
    return out;
}

WeightedSchedule max_weight_independent_set(const InterferenceGraph &g,
                                            std::span<const double> log_w) {
    require_enumerable(g);
    if (log_w.size() != g.size())
        fail(Errc::invalid_weight, "weight vector length does not match n");
    for (double v : log_w)
        if (!(v >= 0.0))
            fail(Errc::invalid_weight, "log-weights must be >= 0 (W_i >= 1)");
    WeightedSchedule best;
    const Mask limit = Mask{1} << g.size();
    for (Mask m = 0; m < limit; ++m) {
        if (!g.is_independent(m))
            continue;
        double v = 0.0;
        for (Mask r = m; r != 0; r &= r - 1)
            v += log_w[std::countr_zero(r)];
        if (v > best.value) {
            best.schedule = m;
            best.value = v;
        }
    }
    return best;
}

std::vector<int> mask_members(Mask m) {
    std::vector<int> out;
    for (; m != 0; m &= m - 1)
        out.push_back(std::countr_zero(m));
    return out;
}

std::string format_members(Mask m) {
    std::string s = "{";
    bool first = true;
    for (int i : mask_members(m)) {
        if (!first)
            s += ',';
        s += std::to_string(i);
        first = false;
    }
    return s + "}";
}

} // namespace csma
