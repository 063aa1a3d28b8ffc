#pragma once

// Weighted matrix-tree theorem on a transition matrix given as nested vectors,
// so the same code runs in doubles and in exact rationals. A tree rooted at r
// gives every other state exactly one outgoing edge and every path ends at r;
// its weight is the product of the chosen P entries. Self-loops never appear.

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

namespace csma {

template <class T> using DenseRows = std::vector<std::vector<T>>;

template <class T> T determinant(DenseRows<T> a) {
    const std::size_t k = a.size();
    T det(1);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = k;
        if constexpr (std::is_floating_point_v<T>) {
            T best(0);
            for (std::size_t r = c; r < k; ++r)
                if (std::abs(a[r][c]) > best) {
                    best = std::abs(a[r][c]);
                    piv = r;
                }
        } else {
            for (std::size_t r = c; r < k && piv == k; ++r)
                if (a[r][c] != T(0))
                    piv = r;
        }
        if (piv == k)
            return T(0);
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < k; ++r) {
            if (a[r][c] == T(0))
                continue;
            const T f = a[r][c] / a[c][c];
            for (std::size_t j = c; j < k; ++j)
                a[r][j] -= f * a[c][j];
        }
    }
    return det;
}

/// Total tree weight for every root, via Laplacian minors.
template <class T> std::vector<T> tree_weights_determinant(const DenseRows<T> &p) {
    const std::size_t k = p.size();
    DenseRows<T> lap(k, std::vector<T>(k, T(0)));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j) {
                lap[i][j] = -p[i][j];
                lap[i][i] += p[i][j];
            }
    std::vector<T> out(k, T(0));
    for (std::size_t root = 0; root < k; ++root) {
        DenseRows<T> minor;
        minor.reserve(k - 1);
        for (std::size_t i = 0; i < k; ++i) {
            if (i == root)
                continue;
            std::vector<T> row;
            row.reserve(k - 1);
            for (std::size_t j = 0; j < k; ++j)
                if (j != root)
                    row.push_back(lap[i][j]);
            minor.push_back(std::move(row));
        }
        out[root] = determinant(std::move(minor));
    }
    return out;
}

/// Total tree weight for every root by listing every tree explicitly.
/// Exponential in the state count; meant for tiny chains only.
template <class T> std::vector<T> tree_weights_enumeration(const DenseRows<T> &p) {
    const std::size_t k = p.size();
    std::vector<T> out(k, T(0));
    std::vector<std::size_t> parent(k);
    for (std::size_t root = 0; root < k; ++root) {
        std::vector<std::size_t> others;
        for (std::size_t i = 0; i < k; ++i)
            if (i != root)
                others.push_back(i);
        // Odometer over parent choices for the non-root states.
        std::vector<std::size_t> digit(others.size(), 0);
        for (;;) {
            bool valid = true;
            for (std::size_t a = 0; a < others.size() && valid; ++a) {
                parent[others[a]] = digit[a];
                valid = digit[a] != others[a] && p[others[a]][digit[a]] != T(0);
            }
            if (valid) {
                for (std::size_t a = 0; a < others.size() && valid; ++a) {
                    std::size_t v = others[a];
                    std::size_t steps = 0;
                    while (v != root && steps <= k) {
                        v = parent[v];
                        ++steps;
                    }
                    valid = v == root;
                }
            }
            if (valid) {
                T w(1);
                for (std::size_t v : others)
                    w *= p[v][parent[v]];
                out[root] += w;
            }
            std::size_t a = 0;
            while (a < digit.size() && ++digit[a] == k)
                digit[a++] = 0;
            if (a == digit.size())
                break;
        }
    }
    return out;
}

} // namespace csma
