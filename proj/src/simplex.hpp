#pragma once

// Dense tableau simplex for max c.x s.t. A x <= b, x >= 0 with b >= 0, so the
// slack basis is feasible from the start. Bland's rule keeps degenerate
// pivots from cycling; instantiated for double and exact rationals.

#include <cstddef>
#include <optional>
#include <vector>

namespace csma::detail {

template <class T> struct LpResult {
    bool unbounded = false;
    T objective{};
    std::vector<T> x;
};

template <class T>
bool lp_positive(const T &v, const T &eps) { return v > eps; }

template <class T>
LpResult<T> simplex_max(const std::vector<std::vector<T>> &a,
                        const std::vector<T> &b, const std::vector<T> &c,
                        const T &eps) {
    const std::size_t m = a.size();
    const std::size_t nv = c.size();
    const std::size_t cols = nv + m;
    // Row-major tableau with rhs in the last column; objective row last.
    std::vector<std::vector<T>> t(m + 1, std::vector<T>(cols + 1, T(0)));
    std::vector<std::size_t> basis(m);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < nv; ++j)
            t[r][j] = a[r][j];
        t[r][nv + r] = T(1);
        t[r][cols] = b[r];
        basis[r] = nv + r;
    }
    for (std::size_t j = 0; j < nv; ++j)
        t[m][j] = -c[j];

    LpResult<T> res;
    for (;;) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j)
            if (lp_positive(T(-t[m][j]), eps)) {
                enter = j;
                break;
            }
        if (enter == cols)
            break;
        std::size_t leave = m;
        T best{};
        for (std::size_t r = 0; r < m; ++r) {
            if (!lp_positive(t[r][enter], eps))
                continue;
            T ratio = t[r][cols] / t[r][enter];
            if (leave == m || ratio < best ||
                (!(best < ratio) && basis[r] < basis[leave])) {
                leave = r;
                best = ratio;
            }
        }
        if (leave == m) {
            res.unbounded = true;
            return res;
        }
        const T piv = t[leave][enter];
        for (auto &v : t[leave])
            v /= piv;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == leave || t[r][enter] == T(0))
                continue;
            const T factor = t[r][enter];
            for (std::size_t j = 0; j <= cols; ++j)
                t[r][j] -= factor * t[leave][j];
        }
        basis[leave] = enter;
    }
    res.objective = t[m][cols];
    res.x.assign(nv, T(0));
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] < nv)
            res.x[basis[r]] = t[r][cols];
    return res;
}

} // namespace csma::detail
