#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace csma {

/// Bitmask over node ids; used for exact analysis where n <= 20.
using Mask = std::uint32_t;

inline constexpr std::size_t kMaxEnumerationNodes = 20;

/// Dynamically sized node subset for the simulation path (n up to 10^4).
class NodeSet {
  public:
    NodeSet() = default;
    explicit NodeSet(std::size_t n) : m_size(n), m_words((n + 63) / 64, 0) {}

    static NodeSet from_mask(std::size_t n, Mask mask);

    std::size_t size() const noexcept { return m_size; }
    bool test(std::size_t i) const noexcept {
        return (m_words[i / 64] >> (i % 64)) & 1U;
    }
    void set(std::size_t i, bool value = true) noexcept {
        const std::uint64_t bit = std::uint64_t{1} << (i % 64);
        if (value)
            m_words[i / 64] |= bit;
        else
            m_words[i / 64] &= ~bit;
    }
    void clear() noexcept;
    std::size_t count() const noexcept;
    bool empty() const noexcept { return count() == 0; }

    /// Requires size() <= 32.
    Mask to_mask() const;
    /// Lowercase hex with "0x" prefix, most significant nibble first.
    std::string to_hex() const;

    bool operator==(const NodeSet &) const = default;

  private:
    std::size_t m_size = 0;
    std::vector<std::uint64_t> m_words;
};

using Edge = std::pair<int, int>;

/// Undirected conflict graph between transmitters.
class InterferenceGraph {
  public:
    explicit InterferenceGraph(std::size_t n = 0);
    InterferenceGraph(std::size_t n, std::span<const Edge> edges);

    /// Throws invalid_graph on self-loops, duplicates or out-of-range ids.
    void add_edge(int i, int j);

    std::size_t size() const noexcept { return m_adj.size(); }
    std::size_t edge_count() const noexcept { return m_edges.size(); }
    const std::vector<Edge> &edges() const noexcept { return m_edges; }
    std::span<const int> neighbors(int i) const { return m_adj.at(i); }
    bool adjacent(int i, int j) const;

    /// Neighbor bitmask; requires size() <= 32.
    Mask neighbor_mask(int i) const;

    bool is_independent(Mask set) const;
    bool is_independent(const NodeSet &set) const;

    static InterferenceGraph path(std::size_t n);
    static InterferenceGraph cycle(std::size_t n);
    /// Node 0 is the hub.
    static InterferenceGraph star(std::size_t n);
    static InterferenceGraph complete(std::size_t n);
    /// Row-major node ids, 4-neighborhood.
    static InterferenceGraph grid(std::size_t rows, std::size_t cols);

  private:
    std::vector<std::vector<int>> m_adj;
    std::vector<Edge> m_edges;
    std::vector<Mask> m_nbr_mask;
};

/// Edge-list text: header line "n <count>", then one "i j" pair per line.
/// Blank lines and lines starting with '#' are ignored.
InterferenceGraph read_edge_list(std::istream &in);
InterferenceGraph load_edge_list(const std::string &path);
void write_edge_list(std::ostream &out, const InterferenceGraph &g);

/// All independent sets, ascending by mask value. Always contains 0.
std::vector<Mask> enumerate_independent_sets(const InterferenceGraph &g);

/// Independent sets not strictly contained in another, ascending by mask.
std::vector<Mask> maximal_independent_sets(const InterferenceGraph &g);

/// Nodes outside `sigma` with no neighbor in `sigma`.
Mask free_nodes(const InterferenceGraph &g, Mask sigma);

struct WeightedSchedule {
    Mask schedule = 0;
    double value = 0.0;
};

/// Exhaustive max-weight independent set; ties go to the smallest mask.
WeightedSchedule max_weight_independent_set(const InterferenceGraph &g,
                                            std::span<const double> log_w);

std::vector<int> mask_members(Mask m);
std::string format_members(Mask m);

inline int popcount(Mask m) noexcept { return __builtin_popcount(m); }

} // namespace csma
