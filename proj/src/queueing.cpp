#include "csma/queueing.hpp"

#include "csma/error.hpp"
#include "csma/rng.hpp"
#include "simplex.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <string>
#include <limits>

namespace csma {

namespace mp = boost::multiprecision;

std::vector<std::uint64_t> update_queues(std::span<const std::uint64_t> q,
                                         const NodeSet &sigma,
                                         std::span<const std::uint8_t> arrivals) {
    if (sigma.size() != q.size() || arrivals.size() != q.size())
        fail(Errc::invalid_argument, "queue, schedule and arrival sizes differ");
    std::vector<std::uint64_t> next(q.begin(), q.end());
    for (std::size_t i = 0; i < next.size(); ++i) {
        if (sigma.test(i) && next[i] > 0)
            --next[i];
        next[i] += arrivals[i] ? 1 : 0;
    }
    return next;
}

void validate_rates(std::span<const double> lambda) {
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (!(lambda[i] >= 0.0 && lambda[i] <= 1.0))
            fail(Errc::invalid_rate, "arrival rate of node " + std::to_string(i) +
                                         " must lie in [0, 1]");
}

void sample_arrivals_into(std::span<const double> lambda, std::uint64_t seed,
                          std::uint64_t slot, std::span<std::uint8_t> out) {
    for (std::size_t i = 0; i < lambda.size(); ++i)
        out[i] = counter_uniform(seed, slot, i, CoinPurpose::arrival) < lambda[i];
}

std::vector<std::uint8_t> sample_arrivals(std::span<const double> lambda,
                                          std::uint64_t seed, std::uint64_t slot) {
    validate_rates(lambda);
    std::vector<std::uint8_t> a(lambda.size());
    sample_arrivals_into(lambda, seed, slot, a);
    return a;
}

namespace {

// The shortest decimal that round-trips to v, as a rational: 0.6 becomes 3/5
// rather than the binary expansion of the nearest double.
mp::cpp_rational decimal_rational(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    const std::string text(buf, res.ptr);
    const auto e = text.find('e');
    std::string digits = text.substr(0, e);
    int exponent = e == std::string::npos ? 0 : std::stoi(text.substr(e + 1));
    if (const auto dot = digits.find('.'); dot != std::string::npos) {
        exponent -= static_cast<int>(digits.size() - dot - 1);
        digits.erase(dot, 1);
    }
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    mp::cpp_rational r{mp::cpp_int(digits)};
    const mp::cpp_int scale = mp::pow(mp::cpp_int(10), static_cast<unsigned>(std::abs(exponent)));
    if (exponent >= 0)
        r *= scale;
    else
        r /= scale;
    return r;
}

// Rows: t*lambda_i - sum_s alpha_s s_i <= 0 for each node, then sum alpha <= 1.
// Variables: t followed by one alpha per maximal set.
template <class T>
detail::LpResult<T> solve_margin(const std::vector<Mask> &sets,
                                 const std::vector<T> &lambda, const T &eps) {
    const std::size_t n = lambda.size();
    const std::size_t nv = 1 + sets.size();
    std::vector<std::vector<T>> a(n + 1, std::vector<T>(nv, T(0)));
    std::vector<T> b(n + 1, T(0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][0] = lambda[i];
        for (std::size_t s = 0; s < sets.size(); ++s)
            if ((sets[s] >> i) & 1U)
                a[i][1 + s] = T(-1);
    }
    for (std::size_t s = 0; s < sets.size(); ++s)
        a[n][1 + s] = T(1);
    b[n] = T(1);
    std::vector<T> c(nv, T(0));
    c[0] = T(1);
    return detail::simplex_max(a, b, c, eps);
}

} // namespace

CapacityMargin capacity_margin(const InterferenceGraph &g,
                               std::span<const double> lambda) {
    if (lambda.size() != g.size())
        fail(Errc::invalid_argument, "rate vector length does not match n");
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (!(lambda[i] >= 0.0) || !std::isfinite(lambda[i]))
            fail(Errc::invalid_rate,
                 "arrival rate of node " + std::to_string(i) + " is negative");
    CapacityMargin out;
    bool all_zero = true;
    for (double v : lambda)
        all_zero = all_zero && v == 0.0;
    if (all_zero) {
        out.t_star = std::numeric_limits<double>::infinity();
        out.unbounded = true;
        out.interior = true;
        return out;
    }
    const auto sets = maximal_independent_sets(g);
    if (g.size() <= 6) {
        std::vector<mp::cpp_rational> lam;
        for (double v : lambda)
            lam.push_back(decimal_rational(v));
        const auto res = solve_margin<mp::cpp_rational>(sets, lam, mp::cpp_rational(0));
        out.t_star = static_cast<double>(res.objective);
        out.interior = res.objective > 1;
        out.exact = res.objective.str();
        for (std::size_t s = 0; s < sets.size(); ++s)
            if (res.x[1 + s] != 0)
                out.mixture.emplace_back(sets[s], static_cast<double>(res.x[1 + s]));
    } else {
        std::vector<double> lam(lambda.begin(), lambda.end());
        const auto res = solve_margin<double>(sets, lam, 1e-12);
        out.t_star = res.objective;
        out.interior = res.objective > 1.0 + 1e-9;
        for (std::size_t s = 0; s < sets.size(); ++s)
            if (res.x[1 + s] > 1e-9)
                out.mixture.emplace_back(sets[s], res.x[1 + s]);
    }
    return out;
}

} // namespace csma
