#pragma once

#include <map>
#include <utility>
#include <vector>

#include "exitwalk/chain.hpp"
#include "exitwalk/rational.hpp"
#include "exitwalk/rng.hpp"

namespace exitwalk {

/// One-step conditional CDF as a step function: ascending support states
/// with strictly increasing cumulative masses ending at 1.
struct StepCdf {
    std::vector<std::pair<int, Rat>> jumps;  // (state, cumulative mass)

    static StepCdf from_row(int u, const KernelRow& row);

    /// inf{r : F(r) >= t}; for t = 0 this is the smallest support point,
    /// and t exactly at a jump value selects that jump's state.
    int inverse(const Rat& t) const;
    int inverse(double t) const;  // exact: doubles are dyadic rationals

    Rat cdf(int r) const;

    /// F(r) >= other(r) for every r (this chain is stochastically smaller).
    bool dominates(const StepCdf& other) const;
};

struct DominanceViolation {
    int k = 0, u = 0, u_prime = 0, r = 0;
    Rat F, G;
};

struct DominanceReport {
    bool ok = true;
    std::uint64_t comparisons = 0;
    std::vector<DominanceViolation> violations;
};

/// Exhaustive check that the P-kernel CDF from u dominates the one from
/// u' whenever u <= u', over all steps and reachable state pairs.
DominanceReport check_dominance_p(const std::vector<int>& f, int a, int b);

/// R-kernel form: F from (u, beta0) vs G from (u', beta1) for u <= u',
/// beta0 <= beta1; also checks that G(r, u) is nonincreasing in u.
DominanceReport check_dominance_r(const std::vector<int>& f, int a, int b, int beta0, int beta1);

/// Post-horizon pair: reflected kernel from u vs free kernel from v for
/// 0 <= u <= v, v > 0, states up to state_cap.
DominanceReport check_dominance_post_horizon(int state_cap);

struct CoupledPathPair {
    std::vector<int> lower;      // psi-tilde
    std::vector<int> upper;      // zeta-tilde
    std::vector<double> uniforms;
    KernelKind lower_kind, upper_kind;
    /// Within-horizon kinds: lower <= upper at every index.  Post-horizon
    /// pair: lower <= upper at every index with upper positive so far.
    bool dominance_ok = true;
};

/// Inverse-CDF coupling: one shared uniform per step drives both chains.
CoupledPathPair couple_paths(const ChainKernel& lower_kernel, const ChainKernel& upper_kernel,
                             int start_lower, int start_upper, CounterRng& rng);

/// Exact joint law of (F^-1(T), G^-1(T)) for one uniform T, computed by
/// intersecting the two CDF partitions of [0,1].
std::map<std::pair<int, int>, Rat> coupled_joint_kernel(const StepCdf& lower,
                                                        const StepCdf& upper);

struct PairChainResult {
    /// Probability that the coupled pair ever violates its order
    /// invariant (conditionally on upper positivity for the post-horizon
    /// pair); the coupling lemmas say exactly 0.
    Rat violation_prob;
    /// Probability that {0 < upper <= h} holds through the horizon but
    /// {lower <= h} does not (event-inclusion check; expected 0).
    /// Only meaningful when a barrier h is supplied.
    Rat inclusion_violation_prob;
    std::vector<std::map<int, Rat>> lower_marginals;
    std::vector<std::map<int, Rat>> upper_marginals;
};

/// Exact distribution of the coupled pair chain; post_horizon selects the
/// conditional order invariant.  h (optional, indexed from the kernels'
/// time_begin) enables the event-inclusion accounting.
PairChainResult exact_pair_chain(const ChainKernel& lower_kernel,
                                 const ChainKernel& upper_kernel, int start_lower,
                                 int start_upper, bool post_horizon,
                                 const std::vector<int>* h = nullptr);

}  // namespace exitwalk
