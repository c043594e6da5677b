#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exitwalk/chain.hpp"
#include "exitwalk/exact.hpp"
#include "exitwalk/lattice.hpp"
#include "exitwalk/rational.hpp"
#include "exitwalk/rng.hpp"

namespace exitwalk {

struct InequalityVerdict {
    std::string kind;
    std::string instance;
    Rat left, right;
    bool exact = true;
    bool holds = false;  // margin >= 0
    Rat margin;          // right - left
};

InequalityVerdict make_verdict(std::string kind, std::string instance, Rat left, Rat right,
                               bool exact = true);

/// Discrete comparison theorem: conditional survival of the half domain
/// given the half rect vs the full pair.  All quantities exact.
InequalityVerdict verify_proposition(const LatticeDomain& domain, const LatticeRect& rect,
                                     const Point& z, int m, int n);

/// Equivalent joint/joint <= marginal/marginal form.
InequalityVerdict verify_ratio_form(const LatticeDomain& domain, const LatticeRect& rect,
                                    const Point& z, int m, int n);

/// Conditioned form: the same inequality given the y-coordinate path,
/// reduced to 1-D barrier events via row maxima.
InequalityVerdict verify_conditioned_lemma(const LatticeDomain& domain, const LatticeRect& rect,
                                           const AdmissibleSequence& y_seq, int m, int n);

/// P^x(H+ | F+) <= P^x(H | F) for a barrier problem, exact.
InequalityVerdict verify_barrier_inequality(const BarrierProblem& problem);

struct PartitionCell {
    std::vector<int> zeros;       // exact zero positions in (0, n]
    std::uint64_t paths_in_cell;  // F-paths with this pattern
    std::uint64_t paths_with_h;   // of those, paths also in H
    Rat cell_prob;                // P(cell)
    Rat cond_h;                   // P(H | cell)
};

struct PartitionResult {
    Rat e0;  // P(H+ | F+)
    std::vector<PartitionCell> cells;
    bool holds = false;       // e0 <= P(H | cell) for every cell
    bool mixture_ok = false;  // sum over cells reproduces P(H | F)
    Rat p_h_given_f;
};

/// Full path enumeration bucketed by exact zero patterns.
PartitionResult verify_partition(const BarrierProblem& problem,
                                 std::uint64_t path_cap = 1'000'000);

struct ConjectureRecord {
    std::string instance;
    Rat e_inner_half, e_inner, e_outer_half, e_outer;  // expected exit times
    Rat left, right;  // E(tau_U+)/E(tau_R+) vs E(tau_U)/E(tau_R)
    Rat margin;       // right - left; sign reported, never asserted
    bool holds;
    bool series_check_ok;     // linear solve vs truncated survival sums
    double series_deviation;  // worst |solve - truncated sum| of the four
};

enum class CorollaryOutcome { Holds, Fails, Inconclusive };

struct CorollaryVerdict {
    std::string instance;
    RatInterval left, right;
    CorollaryOutcome outcome;
    Rat margin;  // right.lo - left.hi
};

/// Conditional expected exit comparison; conclusive only when the two
/// enclosures separate at the given tolerance.
CorollaryVerdict verify_corollary_discrete(const LatticeDomain& domain, const LatticeRect& rect,
                                           const Point& z, int n, const Rat& tolerance);

// ---- corpus machinery ----------------------------------------------------

struct CorpusSpec {
    std::uint64_t seed = 1;
    int instances = 500;
    int dimension = 2;
    int max_extent = 4;
    int m_max = 12;
    int n_max = 12;

    static CorpusSpec from_json_file(const std::string& path);
    std::string to_json() const;
};

struct PropositionInstance {
    LatticeDomain domain;
    LatticeRect rect;
    Point z;
    int m, n;
    std::string id;
};

/// Deterministic instance i of the corpus; domain half is never empty.
PropositionInstance make_proposition_instance(const CorpusSpec& spec, std::uint64_t index);

/// Feasible random barrier problem (P(F+) > 0 by construction).
BarrierProblem make_barrier_problem(CounterRng rng, int horizon_max, int barrier_max);

/// Random admissible y-sequence for the instance, or nullopt if the
/// rejection budget runs out (never happens on generated domains).
std::optional<AdmissibleSequence> make_admissible_sequence(CounterRng rng,
                                                           const LatticeDomain& domain,
                                                           const Point& z, int length);

ConjectureRecord explore_conjecture_instance(const PropositionInstance& inst,
                                             double series_tolerance = 1e-9);

/// Fubini reduction check: averaging the four 1-D lemma quantities over
/// all 3^l y-paths reproduces the four 2-D proposition quantities.
bool lemma_aggregation_matches(const LatticeDomain& domain, const LatticeRect& rect,
                               const Point& z, int m, int n);

/// 1-D quantities entering the conditioned lemma for one y-path; rows
/// absent from domain or rect yield empty constraint intervals.
struct LemmaQuantities {
    Rat joint_half;   // P(0 < X <= h on [0,m], 0 < X <= f on [0,n])
    Rat joint_full;   // P(|X| <= h on [0,m], |X| <= f on [0,n])
    Rat cond_half;    // P(0 < X <= f on [0,n])
    Rat cond_full;    // P(|X| <= f on [0,n])
};
LemmaQuantities lemma_quantities(const LatticeDomain& domain, const LatticeRect& rect, int x,
                                 const std::vector<int>& ys, int m, int n);

}  // namespace exitwalk
