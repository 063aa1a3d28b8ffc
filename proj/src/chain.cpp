#include "csma/chain.hpp"

#include "csma/error.hpp"
#include "csma/tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

namespace csma {

namespace {

void require_chain_size(const InterferenceGraph &g) {
    if (g.size() > kMaxChainNodes)
        fail(Errc::state_space_too_large,
             "exact chain construction needs n <= 10, got n = " +
                 std::to_string(g.size()));
}

void require_weights(const InterferenceGraph &g, std::span<const double> w) {
    if (w.size() != g.size())
        fail(Errc::invalid_weight, "weight vector length does not match n");
    for (double v : w)
        if (!(v >= 1.0) || !std::isfinite(v))
            fail(Errc::invalid_weight, "weights must be finite and >= 1");
}

void require_same_states(const std::vector<Mask> &a, const std::vector<Mask> &b) {
    if (a != b)
        fail(Errc::invalid_argument, "state spaces do not match");
}

std::vector<int> state_index(const std::vector<Mask> &states, std::size_t n) {
    std::vector<int> idx(std::size_t{1} << n, -1);
    for (std::size_t k = 0; k < states.size(); ++k)
        idx[states[k]] = static_cast<int>(k);
    return idx;
}

double stationary_residual(const TransitionMatrix &p, const Eigen::VectorXd &pi) {
    const Eigen::RowVectorXd lhs = pi.transpose() * p.p;
    return (lhs - pi.transpose()).cwiseAbs().maxCoeff();
}

struct ResidualRange {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
};

ResidualRange residual_range(const std::vector<TransitionDecomposition> &d) {
    ResidualRange r;
    for (const auto &t : d) {
        r.lo = std::min(r.lo, t.residual);
        r.hi = std::max(r.hi, t.residual);
    }
    return r;
}

std::vector<TransitionDecomposition>
decompose_unchecked(const TransitionMatrix &p, std::span<const double> w) {
    std::vector<TransitionDecomposition> out;
    for (std::size_t a = 0; a < p.size(); ++a)
        for (std::size_t b = 0; b < p.size(); ++b) {
            if (p.p(a, b) == 0.0)
                continue;
            TransitionDecomposition d;
            d.from = p.states[a];
            d.to = p.states[b];
            d.stopped = d.from & ~d.to;
            d.joined = d.to & ~d.from;
            d.residual = p.p(a, b);
            for (Mask s = d.stopped; s != 0; s &= s - 1)
                d.residual *= w[std::countr_zero(s)];
            out.push_back(d);
        }
    return out;
}

} // namespace

std::size_t TransitionMatrix::index_of(Mask s) const {
    auto it = std::lower_bound(states.begin(), states.end(), s);
    if (it == states.end() || *it != s)
        fail(Errc::invalid_schedule, "schedule " + format_members(s) +
                                         " is not a state of this chain");
    return static_cast<std::size_t>(it - states.begin());
}

double ScheduleDistribution::at(Mask s) const {
    auto it = std::lower_bound(states.begin(), states.end(), s);
    if (it == states.end() || *it != s)
        fail(Errc::invalid_schedule, "schedule " + format_members(s) +
                                         " is not in the support");
    return mass(it - states.begin());
}

TransitionMatrix build_protocol_chain(const InterferenceGraph &g,
                                      std::span<const double> w) {
    require_chain_size(g);
    require_weights(g, w);
    TransitionMatrix out;
    out.states = enumerate_independent_sets(g);
    const auto idx = state_index(out.states, g.size());
    const std::size_t k = out.size();
    out.p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                  static_cast<Eigen::Index>(k));
    std::vector<double> joined(k);
    for (std::size_t a = 0; a < k; ++a) {
        const Mask sigma = out.states[a];
        const Mask fr = free_nodes(g, sigma);
        // Law of the new winners among free nodes: each attempts w.p. 1/2.
        std::fill(joined.begin(), joined.end(), 0.0);
        const double each = std::ldexp(1.0, -popcount(fr));
        for (Mask att = 0;; att = (att - fr) & fr) {
            Mask won = 0;
            for (Mask r = att; r != 0; r &= r - 1) {
                const int i = std::countr_zero(r);
                if (!(g.neighbor_mask(i) & att))
                    won |= Mask{1} << i;
            }
            joined[idx[won]] += each;
            if (att == fr)
                break;
        }
        // Winners stop independently w.p. 1/(2 w_i).
        for (Mask stop = 0;; stop = (stop - sigma) & sigma) {
            double ps = 1.0;
            for (Mask r = sigma; r != 0; r &= r - 1) {
                const int i = std::countr_zero(r);
                const double q = 1.0 / (2.0 * w[i]);
                ps *= (stop >> i) & 1U ? q : 1.0 - q;
            }
            const Mask kept = sigma & ~stop;
            for (std::size_t b = 0; b < k; ++b)
                if (joined[b] != 0.0)
                    out.p(a, idx[kept | out.states[b]]) += ps * joined[b];
            if (stop == sigma)
                break;
        }
    }
    return out;
}

TransitionMatrix build_comparison_chain(const InterferenceGraph &g,
                                        std::span<const double> w) {
    require_chain_size(g);
    require_weights(g, w);
    TransitionMatrix out;
    out.states = enumerate_independent_sets(g);
    const std::size_t k = out.size();
    out.p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                  static_cast<Eigen::Index>(k));
    const double scale = std::ldexp(1.0, -static_cast<int>(g.size()));
    for (std::size_t a = 0; a < k; ++a) {
        const Mask sigma = out.states[a];
        const Mask fr = free_nodes(g, sigma);
        double off = 0.0;
        for (std::size_t b = 0; b < k; ++b) {
            const Mask to = out.states[b];
            if (b == a || (to & ~sigma & ~fr) != 0)
                continue;
            double v = scale;
            for (Mask s = sigma & ~to; s != 0; s &= s - 1)
                v /= w[std::countr_zero(s)];
            out.p(a, b) = v;
            off += v;
        }
        out.p(a, a) = 1.0 - off;
    }
    return out;
}

bool is_irreducible(const TransitionMatrix &p) {
    const std::size_t k = p.size();
    if (k == 0)
        return false;
    auto reach_all = [&](bool forward) {
        std::vector<char> seen(k, 0);
        std::deque<std::size_t> todo{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!todo.empty()) {
            const std::size_t a = todo.front();
            todo.pop_front();
            for (std::size_t b = 0; b < k; ++b) {
                const double v = forward ? p.p(a, b) : p.p(b, a);
                if (v > 0.0 && !seen[b]) {
                    seen[b] = 1;
                    ++count;
                    todo.push_back(b);
                }
            }
        }
        return count == k;
    };
    return reach_all(true) && reach_all(false);
}

ScheduleDistribution stationary(const TransitionMatrix &p) {
    if (!is_irreducible(p))
        fail(Errc::not_irreducible, "transition matrix is not irreducible");
    const auto k = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd a = p.p.transpose() - Eigen::MatrixXd::Identity(k, k);
    a.row(k - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    rhs(k - 1) = 1.0;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    Eigen::VectorXd pi = lu.solve(rhs);
    pi += lu.solve(rhs - a * pi);
    pi /= pi.sum();
    const double res = stationary_residual(p, pi);
    if (!(res <= 1e-12) || pi.minCoeff() <= 0.0) {
        std::ostringstream msg;
        msg << "stationary solve residual " << res << " exceeds 1e-12";
        fail(Errc::numerical_failure, msg.str());
    }
    return {p.states, pi};
}

ScheduleDistribution closed_form_reversible_stationary(const InterferenceGraph &g,
                                                       std::span<const double> w) {
    require_weights(g, w);
    ScheduleDistribution d;
    d.states = enumerate_independent_sets(g);
    const auto k = static_cast<Eigen::Index>(d.states.size());
    Eigen::VectorXd logm(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        double s = 0.0;
        for (Mask r = d.states[a]; r != 0; r &= r - 1)
            s += std::log(w[std::countr_zero(r)]);
        logm(a) = s;
    }
    d.mass = (logm.array() - logm.maxCoeff()).exp();
    d.mass /= d.mass.sum();
    return d;
}

double detailed_balance_residual(const TransitionMatrix &q,
                                 const ScheduleDistribution &d) {
    require_same_states(q.states, d.states);
    double worst = 0.0;
    for (std::size_t a = 0; a < q.size(); ++a)
        for (std::size_t b = a + 1; b < q.size(); ++b)
            worst = std::max(worst, std::abs(d.mass(a) * q.p(a, b) -
                                             d.mass(b) * q.p(b, a)));
    return worst;
}

std::vector<TransitionDecomposition>
decompose_transition(const TransitionMatrix &p, const InterferenceGraph &g,
                     std::span<const double> w) {
    require_weights(g, w);
    auto out = decompose_unchecked(p, w);
    const double lo = std::ldexp(1.0, -2 * static_cast<int>(g.size()));
    for (const auto &d : out)
        if (!(d.residual >= lo && d.residual <= 1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "transition " << format_members(d.from) << " -> "
                << format_members(d.to) << " has residual factor " << d.residual
                << " outside [4^-n, 1]";
            fail(Errc::invariant_violation, msg.str());
        }
    return out;
}

TransitionMatrix adjoint(const TransitionMatrix &p, const ScheduleDistribution &pi) {
    require_same_states(p.states, pi.states);
    if (pi.mass.minCoeff() <= 0.0 || stationary_residual(p, pi.mass) > 1e-9)
        fail(Errc::invalid_adjoint_base,
             "adjoint needs a strictly positive stationary distribution");
    TransitionMatrix out{p.states, Eigen::MatrixXd(p.p.rows(), p.p.cols())};
    for (Eigen::Index a = 0; a < p.p.rows(); ++a)
        for (Eigen::Index b = 0; b < p.p.cols(); ++b)
            out.p(a, b) = pi.mass(b) * p.p(b, a) / pi.mass(a);
    return out;
}

TransitionMatrix compose(const TransitionMatrix &a, const TransitionMatrix &b) {
    require_same_states(a.states, b.states);
    return {a.states, a.p * b.p};
}

SpectrumReport spectrum_reversibilization(const TransitionMatrix &p,
                                          const ScheduleDistribution &pi,
                                          std::uint64_t trial_seed, int trials) {
    const TransitionMatrix pstar = adjoint(p, pi);
    const TransitionMatrix r = compose(p, pstar);
    const Eigen::VectorXd sq = pi.mass.array().sqrt();
    const Eigen::VectorXd isq = sq.cwiseInverse();
    const auto k = r.p.rows();

    Eigen::MatrixXd s = sq.asDiagonal() * r.p * isq.asDiagonal();
    SpectrumReport rep;
    rep.symmetry_defect = (s - s.transpose()).cwiseAbs().maxCoeff();
    if (rep.symmetry_defect > 1e-10) {
        std::ostringstream msg;
        msg << "P P* is not pi-symmetric after conjugation (defect "
            << rep.symmetry_defect << ")";
        fail(Errc::numerical_failure, msg.str());
    }
    s = 0.5 * (s + s.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = eig.eigenvalues();
    for (Eigen::Index i = k; i-- > 0;)
        rep.eigenvalues.push_back(ev(i));
    rep.lambda2 = k > 1 ? rep.eigenvalues[1] : 0.0;
    rep.lambda_min = k > 1 ? rep.eigenvalues.back() : 0.0;
    rep.norm = std::sqrt(std::max(std::abs(rep.lambda2), std::abs(rep.lambda_min)));

    // Variational side: P* as an operator on l2(pi), restricted to mean zero.
    const Eigen::MatrixXd b = sq.asDiagonal() * pstar.p * isq.asDiagonal();
    const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(k, k) - sq * sq.transpose();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(b * proj);
    rep.variational_norm = svd.singularValues()(0);

    std::mt19937_64 rng(trial_seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v(k);
    for (int t = 0; t < trials; ++t) {
        for (Eigen::Index i = 0; i < k; ++i)
            v(i) = gauss(rng);
        v.array() -= pi.mass.dot(v);
        const double den = std::sqrt(pi.mass.dot(v.cwiseProduct(v)));
        if (den == 0.0)
            continue;
        const Eigen::VectorXd pv = pstar.p * v;
        const double num = std::sqrt(pi.mass.dot(pv.cwiseProduct(pv)));
        rep.trial_ratio_max = std::max(rep.trial_ratio_max, num / den);
    }
    if (rep.trial_ratio_max > rep.variational_norm + 1e-8)
        fail(Errc::numerical_failure,
             "trial vector exceeds the computed operator norm");
    return rep;
}

ConductanceResult conductance(const TransitionMatrix &r,
                              const ScheduleDistribution &pi) {
    require_same_states(r.states, pi.states);
    const std::size_t k = r.size();
    if (k > kMaxConductanceStates)
        fail(Errc::conductance_too_large,
             "conductance brute force needs at most 20 states, got " +
                 std::to_string(k));
    if (k < 2)
        fail(Errc::invalid_argument, "conductance needs at least two states");
    std::vector<double> flow(k * k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            flow[a * k + b] = pi.mass(a) * r.p(a, b);

    // Gray-code walk: one state flips per step, so the cut and the mass update
    // in O(k). The winning subset is re-evaluated directly at the end.
    const std::uint32_t full = (std::uint32_t{1} << k) - 1;
    long double cut = 0.0L;
    long double mass_in = 0.0L;
    std::uint32_t best_subset = 0;
    double best_phi = std::numeric_limits<double>::infinity();
    std::uint32_t s = 0;
    for (std::uint32_t step = 1; step <= full; ++step) {
        const auto a = static_cast<std::size_t>(std::countr_zero(step));
        const bool entering = !((s >> a) & 1U);
        long double to_out = 0.0L;
        long double from_in = 0.0L;
        for (std::size_t b = 0; b < k; ++b) {
            if (b == a)
                continue;
            if ((s >> b) & 1U)
                from_in += flow[b * k + a] + static_cast<long double>(flow[a * k + b]);
            else
                to_out += flow[a * k + b] + static_cast<long double>(flow[b * k + a]);
        }
        // Counting both directions keeps the cut symmetric: cut = (F(S,S^c) + F(S^c,S)) / 2.
        if (entering) {
            cut += (to_out - from_in) / 2;
            mass_in += pi.mass(a);
        } else {
            cut += (from_in - to_out) / 2;
            mass_in -= pi.mass(a);
        }
        s ^= std::uint32_t{1} << a;
        if (s == 0 || s == full)
            continue;
        const long double denom = std::min(mass_in, 1.0L - mass_in);
        const double phi = denom > 0 ? static_cast<double>(cut / denom)
                                     : std::numeric_limits<double>::infinity();
        if (phi < best_phi) {
            best_phi = phi;
            best_subset = s;
        }
    }

    double exact_cut = 0.0;
    double exact_in = 0.0;
    double exact_out = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        if ((best_subset >> a) & 1U) {
            exact_in += pi.mass(a);
            for (std::size_t b = 0; b < k; ++b)
                if (!((best_subset >> b) & 1U))
                    exact_cut += flow[a * k + b];
        } else {
            exact_out += pi.mass(a);
        }
    }
    return {exact_cut / std::min(exact_in, exact_out), best_subset};
}

ScheduleDistribution tree_stationary(const TransitionMatrix &p) {
    const std::size_t k = p.size();
    if (k > kMaxTreeStates)
        fail(Errc::tree_too_large, "tree theorem evaluation needs at most 12 states, got " +
                                       std::to_string(k));
    DenseRows<double> rows(k, std::vector<double>(k));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            rows[a][b] = p.p(a, b);
    auto weights = tree_weights_determinant(rows);
    if (k <= 5) {
        const auto listed = tree_weights_enumeration(rows);
        for (std::size_t a = 0; a < k; ++a)
            if (std::abs(listed[a] - weights[a]) > 1e-12 * std::abs(listed[a]))
                fail(Errc::numerical_failure,
                     "tree determinant disagrees with explicit enumeration");
    }
    ScheduleDistribution d;
    d.states = p.states;
    d.mass = Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(k));
    const double total = d.mass.sum();
    if (!(total > 0.0))
        fail(Errc::not_irreducible, "no spanning in-tree exists");
    d.mass /= total;
    return d;
}

double entropy(std::span<const double> mu) {
    double h = 0.0;
    for (double m : mu)
        if (m > 0.0)
            h -= m * std::log(m);
    return h;
}

double free_energy(std::span<const double> t, std::span<const double> mu) {
    double e = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        e += mu[i] * t[i];
    return e + entropy(mu);
}

GibbsReport gibbs_check(std::span<const double> t, std::uint64_t seed,
                        int perturbations) {
    if (t.empty())
        fail(Errc::invalid_argument, "Gibbs check needs a nonempty state space");
    GibbsReport rep;
    rep.max_t = *std::max_element(t.begin(), t.end());
    rep.nu.resize(t.size());
    double z = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        z += rep.nu[i] = std::exp(t[i] - rep.max_t);
    for (double &v : rep.nu)
        v /= z;
    for (std::size_t i = 0; i < t.size(); ++i)
        rep.expected_t += rep.nu[i] * t[i];
    rep.free_energy = rep.expected_t + entropy(rep.nu);
    rep.log_omega = std::log(static_cast<double>(t.size()));
    rep.bound_holds = rep.expected_t >= rep.max_t - rep.log_omega - 1e-12;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> mu(t.size());
    std::vector<double> dir(t.size());
    rep.worst_perturbation_gain = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < perturbations; ++k) {
        // Mix nu with a random simplex point at a random strength.
        double sum = 0.0;
        for (double &d : dir)
            sum += d = expo(rng);
        const double s = unif(rng);
        for (std::size_t i = 0; i < t.size(); ++i)
            mu[i] = (1.0 - s) * rep.nu[i] + s * dir[i] / sum;
        rep.worst_perturbation_gain = std::max(rep.worst_perturbation_gain,
                                               free_energy(t, mu) - rep.free_energy);
    }
    rep.maximal = perturbations <= 0 || rep.worst_perturbation_gain <= 1e-12;
    return rep;
}

std::uint64_t mixing_time_estimate(double norm, double pi_min, double eps) {
    if (!(pi_min > 0.0 && pi_min <= 1.0))
        fail(Errc::invalid_argument, "pi_min must lie in (0, 1]");
    if (!(eps > 0.0 && eps < 1.0))
        fail(Errc::invalid_argument, "eps must lie in (0, 1)");
    if (!(norm >= 0.0))
        fail(Errc::invalid_argument, "norm must be >= 0");
    if (norm >= 1.0)
        fail(Errc::not_contracting, "norm >= 1: the chain does not contract");
    if (norm == 0.0)
        return 1;
    const double root = std::sqrt(pi_min);
    auto ok = [&](double t) { return std::pow(norm, t) / root <= eps; };
    double t = std::max(1.0, std::ceil(std::log(eps * root) / std::log(norm)));
    while (t > 1.0 && ok(t - 1.0))
        t -= 1.0;
    while (!ok(t))
        t += 1.0;
    return static_cast<std::uint64_t>(t);
}

const InequalityCheck &LemmaReport::find(std::string_view name) const {
    for (const auto &c : checks)
        if (c.name == name)
            return c;
    fail(Errc::invalid_argument, "no check named '" + std::string(name) + "'");
}

double lemma1_allowance(std::size_t n) {
    const double nn = static_cast<double>(n);
    return nn * std::log(2.0) + 8.0 * nn * std::ldexp(1.0, static_cast<int>(n)) * std::log(2.0);
}

LemmaReport verify_lemma_bounds(const InterferenceGraph &g, std::span<const double> w) {
    if (g.size() > 6)
        fail(Errc::state_space_too_large,
             "lemma verification needs n <= 6, got n = " + std::to_string(g.size()));
    require_weights(g, w);
    const std::size_t n = g.size();
    const int ni = static_cast<int>(n);
    LemmaReport rep;
    auto add = [&](std::string name, double lhs, double rhs, bool pass,
                   std::string note = {}) {
        rep.checks.push_back({std::move(name), lhs, rhs, pass, std::move(note)});
        rep.all_pass = rep.all_pass && pass;
    };

    const TransitionMatrix p = build_protocol_chain(g, w);
    const TransitionMatrix q = build_comparison_chain(g, w);
    const ScheduleDistribution pi = stationary(p);
    const ScheduleDistribution pi_hat = closed_form_reversible_stationary(g, w);
    const double w_max = *std::max_element(w.begin(), w.end());

    const double row_err = (p.p.rowwise().sum().array() - 1.0).abs().maxCoeff();
    add("row_stochastic", row_err, 1e-12, row_err <= 1e-12);
    const double min_diag = p.p.diagonal().minCoeff();
    add("diagonal_lower_bound", min_diag, std::ldexp(1.0, -ni),
        min_diag >= std::ldexp(1.0, -ni));

    double mismatches = 0.0;
    for (Eigen::Index a = 0; a < p.p.rows(); ++a)
        for (Eigen::Index b = 0; b < p.p.cols(); ++b)
            mismatches += (p.p(a, b) > 0.0) != (q.p(a, b) > 0.0);
    add("support_equality", mismatches, 0.0, mismatches == 0.0);

    const auto range = residual_range(decompose_unchecked(p, w));
    add("residual_factor_lower", range.lo, std::ldexp(1.0, -2 * ni),
        range.lo >= std::ldexp(1.0, -2 * ni));
    add("residual_factor_upper", range.hi, 1.0, range.hi <= 1.0 + 1e-12);

    double ratio_spread = 0.0;
    for (Eigen::Index a = 0; a < p.p.rows(); ++a) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (Eigen::Index b = 0; b < p.p.cols(); ++b)
            if (q.p(a, b) > 0.0) {
                const double r = p.p(a, b) / q.p(a, b);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
        ratio_spread = std::max(ratio_spread, hi / lo);
    }
    add("entrywise_ratio_spread", ratio_spread, std::ldexp(1.0, 4 * ni),
        ratio_spread <= std::ldexp(1.0, 4 * ni), "max over rows of max/min P/Q");

    const double db = detailed_balance_residual(q, pi_hat);
    add("comparison_detailed_balance", db, 1e-12, db <= 1e-12);
    const ScheduleDistribution q_pi = stationary(q);
    const double qdiff = (q_pi.mass - pi_hat.mass).cwiseAbs().maxCoeff();
    add("comparison_closed_form", qdiff, 1e-10, qdiff <= 1e-10);

    if (p.size() <= kMaxTreeStates) {
        const auto tree = tree_stationary(p);
        const double tdiff = (tree.mass - pi.mass).cwiseAbs().maxCoeff();
        add("tree_theorem", tdiff, 1e-10, tdiff <= 1e-10);
    }

    // Lemma 1: E_pi[sum sigma_i ln w_i] >= max - B(n).
    std::vector<double> log_w(n);
    for (std::size_t i = 0; i < n; ++i)
        log_w[i] = std::log(w[i]);
    const double best = max_weight_independent_set(g, log_w).value;
    double expected = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        double v = 0.0;
        for (Mask r = p.states[a]; r != 0; r &= r - 1)
            v += log_w[std::countr_zero(r)];
        expected += pi.mass(static_cast<Eigen::Index>(a)) * v;
    }
    add("lemma1_gap", best - expected, lemma1_allowance(n),
        best - expected <= lemma1_allowance(n));

    const int ratio_exp = 2 * ni * (1 << ni);
    const Eigen::ArrayXd ratio = pi.mass.array() / pi_hat.mass.array();
    add("ratio_lower", ratio.minCoeff(), std::ldexp(1.0, -ratio_exp),
        ratio.minCoeff() >= std::ldexp(1.0, -ratio_exp));
    add("ratio_upper", ratio.maxCoeff(), std::ldexp(1.0, ratio_exp),
        ratio.maxCoeff() <= std::ldexp(1.0, ratio_exp));
    const double min_pi_bound =
        std::ldexp(1.0, -ratio_exp - ni) / std::pow(w_max, static_cast<double>(n));
    add("min_pi_lower", pi.mass.minCoeff(), min_pi_bound,
        pi.mass.minCoeff() >= min_pi_bound);

    // Lemma 2.
    const SpectrumReport spec = spectrum_reversibilization(p, pi);
    const ConductanceResult cond = conductance(compose(p, adjoint(p, pi)), pi);
    const double cheeger = 1.0 - cond.phi * cond.phi / 2.0;
    add("cheeger", spec.lambda2, cheeger, spec.lambda2 <= cheeger + 1e-12,
        "lambda2(R) <= 1 - phi^2/2");
    const double lmin_bound = std::ldexp(1.0, 1 - 2 * ni) - 1.0;
    add("lambda_min_lower", spec.lambda_min, lmin_bound,
        spec.lambda_min >= lmin_bound - 1e-12);
    add("adjoint_norm_contracting", spec.norm, 1.0, spec.norm < 1.0);

    const long double log2_gap =
        -(4.0L * ni * ((1 << ni) + 2) + 2.0L) -
        4.0L * ni * std::log2(static_cast<long double>(w_max));
    const long double gap = std::exp2(log2_gap);
    std::ostringstream note;
    note << "rhs = 1 - 2^(" << static_cast<double>(log2_gap) << ")";
    if (gap >= 1e-14L) {
        const double rhs = 1.0 - static_cast<double>(gap);
        add("adjoint_norm_bound", spec.norm, rhs, spec.norm <= rhs, note.str());
    } else {
        const long double rhs = 1.0L - gap;
        note << "; evaluated in extended precision, reduces to norm < 1";
        add("adjoint_norm_bound", spec.norm, static_cast<double>(rhs),
            spec.norm < 1.0 && static_cast<long double>(spec.norm) <= rhs, note.str());
    }
    const double vdiff = std::abs(spec.variational_norm - spec.norm);
    add("variational_norm_agreement", vdiff, 1e-8, vdiff <= 1e-8);
    return rep;
}

void require_all_pass(const LemmaReport &report) {
    for (const auto &c : report.checks)
        if (!c.pass) {
            std::ostringstream msg;
            msg << "inequality '" << c.name << "' failed: lhs = " << c.lhs
                << ", rhs = " << c.rhs;
            fail(Errc::invariant_violation, msg.str());
        }
}

} // namespace csma
