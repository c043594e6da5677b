#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exitwalk/lattice.hpp"
#include "exitwalk/rational.hpp"

namespace exitwalk {

/// Sentinel for an absent (unbounded) barrier value.
inline constexpr int kUnboundedBarrier = std::numeric_limits<int>::max() / 2;

/// Horizons, barrier functions and start for the one-dimensional events
///   F  = {|X_i| <= f(i), 0 <= i <= n},   F+ = {0 < X_i <= f(i), ...}
///   H  = {|X_i| <= h(i), 0 <= i <= m},   H+ = {0 < X_i <= h(i), ...}.
struct BarrierProblem {
    int n = 0;
    int m = 0;
    std::vector<int> f;  // size n+1, positive
    std::vector<int> h;  // size m+1, positive
    int x = 1;           // start, 0 < x <= h(0)

    void check() const;  // throws std::invalid_argument on violation

    static BarrierProblem load(std::istream& in, const std::string& name = "<barrier>");
    static BarrierProblem load_file(const std::string& path);
    void save(std::ostream& out) const;
};

/// Backward survival weights w_j^k indexed by absolute step k in [a,b]
/// and state j in [0, jmax]; zero outside.
struct WeightTable {
    int a = 0, b = 0;
    int jmax = 0;
    std::vector<std::vector<Rat>> w;  // w[k-a][j]

    const Rat& at(int k, int j) const;
};

/// p_j^k = P(0 < X_i <= f(i), k <= i <= b | X_k = j).
WeightTable survival_weights_p(const std::vector<int>& f, int a, int b, int jmax_hint = -1);

/// r_j^k = P(X_b = beta, 0 < X_i <= f(i), k <= i <= b | X_k = j).
WeightTable survival_weights_r(const std::vector<int>& f, int a, int b, int beta,
                               int jmax_hint = -1);

enum class KernelKind { PType, RType, PsiFree, ZetaFree };
std::string kernel_kind_name(KernelKind k);

/// Row of one-step transition probabilities to u-1, u, u+1.
struct KernelRow {
    std::array<Rat, 3> p;  // index d -> state u-1+d
    Rat sum() const { return p[0] + p[1] + p[2]; }
};

/// Explicit per-step transition tables over time range [a, b]
/// (transitions happen at k in [a, b-1]); rows exist only for states
/// reachable with positive probability.
class ChainKernel {
public:
    ChainKernel(KernelKind kind, int a, int b);

    KernelKind kind() const { return kind_; }
    int time_begin() const { return a_; }
    int time_end() const { return b_; }

    bool has_row(int k, int u) const;
    const KernelRow& row(int k, int u) const;  // throws on unreachable state
    const std::map<int, KernelRow>& rows_at(int k) const;
    void set_row(int k, int u, KernelRow row);

private:
    KernelKind kind_;
    int a_, b_;
    std::vector<std::map<int, KernelRow>> rows_;
};

/// X conditioned on {0 < X_i <= f(i), a <= i <= b} from X_a = alpha.
/// The table does not depend on alpha; alpha fixes the reachable rows.
ChainKernel kernel_p(const std::vector<int>& f, int a, int b, int alpha);

/// As kernel_p, additionally pinned to X_b = beta.
ChainKernel kernel_r(const std::vector<int>& f, int a, int b, int alpha, int beta);

/// |lazy walk| reflected at 0: from u>0 uniform on {u-1,u,u+1}; from 0 to
/// 1 with prob 2/3, stay with 1/3.  Rows materialized on [0, state_cap].
ChainKernel kernel_psi_free(int a, int b, int state_cap);

/// Free lazy walk, uniform 1/3; rows materialized on [lo, hi].
ChainKernel kernel_zeta_free(int a, int b, int lo, int hi);

/// Exact per-step distribution of the chain started at start_state.
std::vector<std::map<int, Rat>> chain_distribution(const ChainKernel& kernel, int start_state);

/// One segment of the zero-pattern decomposition. States at the listed
/// zero positions are pinned to 0 and contribute probability factor 1.
struct ChainSegment {
    ChainKernel kernel;
    int start_state;              // pinned entry state at kernel.time_begin()
    std::optional<int> end_state; // pinned exit state for R-type segments
};

/// Law of |X_0|,...,|X_l| given F and an exact set of zero positions.
struct PiecewiseChainLaw {
    int x = 1;
    int l = 0;
    int n = 0;  // barrier horizon (= l when no post-horizon part)
    std::vector<int> zeros;
    std::vector<ChainSegment> segments;

    /// Exact probability of a full |X| path (length l+1) under this law.
    Rat path_prob(const std::vector<int>& states) const;
};

/// Concatenated kernel for the conditional law of |X| given barrier f on
/// [0,n] and zeros exactly at the given positions in (0, n]; appends the
/// reflected free kernel on (n, l] when l > n.  Pass f = nullopt for an
/// unbounded barrier.
PiecewiseChainLaw chain_law_from_zeros(int x, const std::optional<std::vector<int>>& f,
                                       const std::vector<int>& zero_positions, int l);

/// P^x(lo_i <= X_i <= hi_i for 0 <= i <= L), allowed.size() = L+1; exact.
/// Empty intervals (lo > hi) are allowed and kill the event.
Rat interval_event_prob(int x, const std::vector<std::pair<int, int>>& allowed);

/// y-coordinate path the walk can realize inside the domain (2-D).
struct AdmissibleSequence {
    std::vector<int> ys;  // y_0..y_l
    Point z;              // start, z[1] == ys[0]

    /// Unit steps, nonempty rows, and a traversable x-interval chain.
    bool admissible_in(const LatticeDomain& domain) const;
};

}  // namespace exitwalk
