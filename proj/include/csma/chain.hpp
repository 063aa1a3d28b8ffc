#pragma once

#include "csma/graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace csma {

inline constexpr std::size_t kMaxChainNodes = 10;

/// Row-stochastic matrix over an ordered list of schedules.
struct TransitionMatrix {
    std::vector<Mask> states;
    Eigen::MatrixXd p;

    std::size_t size() const noexcept { return states.size(); }
    /// Position of `s` in `states`; throws invalid_schedule when absent.
    std::size_t index_of(Mask s) const;
    double at(Mask from, Mask to) const { return p(index_of(from), index_of(to)); }
};

/// Probability vector aligned with a TransitionMatrix's states.
struct ScheduleDistribution {
    std::vector<Mask> states;
    Eigen::VectorXd mass;

    double at(Mask s) const;
};

/// Exact one-slot law of the successful-transmitter set under fixed weights.
TransitionMatrix build_protocol_chain(const InterferenceGraph &g,
                                      std::span<const double> w);

/// Reversible comparison chain on the same support: off-diagonal entries are
/// 2^-n * prod_{i in sigma \ sigma'} 1/w_i and the diagonal takes the rest.
TransitionMatrix build_comparison_chain(const InterferenceGraph &g,
                                        std::span<const double> w);

/// Strong connectivity of the positive-entry digraph.
bool is_irreducible(const TransitionMatrix &p);

/// Unique stationary law via a dense solve; throws not_irreducible.
ScheduleDistribution stationary(const TransitionMatrix &p);

/// pi_hat(sigma) proportional to prod_{i in sigma} w_i.
ScheduleDistribution closed_form_reversible_stationary(const InterferenceGraph &g,
                                                       std::span<const double> w);

double detailed_balance_residual(const TransitionMatrix &q,
                                 const ScheduleDistribution &d);

struct TransitionDecomposition {
    Mask from = 0;
    Mask to = 0;
    Mask stopped = 0; ///< from \ to
    Mask joined = 0;  ///< to \ from
    /// P(from, to) * prod_{i in stopped} w_i
    double residual = 0.0;
};

/// Splits every positive entry into stop/join sets and checks the residual
/// factor lies in [4^-n, 1]; throws invariant_violation otherwise.
std::vector<TransitionDecomposition>
decompose_transition(const TransitionMatrix &p, const InterferenceGraph &g,
                     std::span<const double> w);

/// Time reversal P*(s, s') = pi(s') P(s', s) / pi(s).
TransitionMatrix adjoint(const TransitionMatrix &p, const ScheduleDistribution &pi);

/// Product of two matrices over the same states.
TransitionMatrix compose(const TransitionMatrix &a, const TransitionMatrix &b);

struct SpectrumReport {
    /// Eigenvalues of R = P P*, descending.
    std::vector<double> eigenvalues;
    double lambda2 = 0.0;
    double lambda_min = 0.0;
    /// sqrt(max{|lambda2|, |lambda_min|}).
    double norm = 0.0;
    /// sup over pi-mean-zero v of |P* v|_pi / |v|_pi, from an SVD of the
    /// projected operator.
    double variational_norm = 0.0;
    /// Largest ratio seen over random mean-zero trial vectors.
    double trial_ratio_max = 0.0;
    double symmetry_defect = 0.0;
};

SpectrumReport spectrum_reversibilization(const TransitionMatrix &p,
                                          const ScheduleDistribution &pi,
                                          std::uint64_t trial_seed = 1,
                                          int trials = 200);

struct ConductanceResult {
    double phi = 0.0;
    /// Minimizing subset as a bitmask over state indices.
    std::uint32_t subset = 0;
};

inline constexpr std::size_t kMaxConductanceStates = 20;

/// Brute force over all nonempty proper subsets of the state space.
ConductanceResult conductance(const TransitionMatrix &r,
                              const ScheduleDistribution &pi);

inline constexpr std::size_t kMaxTreeStates = 12;

/// Stationary law from the weighted matrix-tree theorem.
ScheduleDistribution tree_stationary(const TransitionMatrix &p);

struct GibbsReport {
    std::vector<double> nu;
    double free_energy = 0.0; ///< F(nu) = E_nu[T] + H(nu)
    double expected_t = 0.0;
    double max_t = 0.0;
    double log_omega = 0.0;
    bool bound_holds = false;
    bool maximal = false;
    /// max over perturbations of F(mu) - F(nu); <= 0 when maximal.
    double worst_perturbation_gain = 0.0;
};

/// Natural-log entropy with 0 ln 0 = 0.
double entropy(std::span<const double> mu);
double free_energy(std::span<const double> t, std::span<const double> mu);

GibbsReport gibbs_check(std::span<const double> t, std::uint64_t seed = 1,
                        int perturbations = 100);

/// Smallest t >= 1 with norm^t / sqrt(pi_min) <= eps.
std::uint64_t mixing_time_estimate(double norm, double pi_min, double eps);

struct InequalityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    std::string note;
};

struct LemmaReport {
    std::vector<InequalityCheck> checks;
    bool all_pass = true;

    const InequalityCheck &find(std::string_view name) const;
};

/// Lemma-1 slack allowance n ln 2 + 8 n 2^n ln 2.
double lemma1_allowance(std::size_t n);

/// Machine-checks the stationary-law and mixing bounds for fixed weights.
/// Requires n <= 6 and at most 20 independent sets (conductance brute force).
LemmaReport verify_lemma_bounds(const InterferenceGraph &g, std::span<const double> w);

/// Throws invariant_violation naming the first failing inequality.
void require_all_pass(const LemmaReport &report);

} // namespace csma
