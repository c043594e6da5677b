#include "exitwalk/coupling.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace exitwalk {

StepCdf StepCdf::from_row(int u, const KernelRow& row) {
    StepCdf cdf;
    Rat cum(0);
    for (int d = 0; d < 3; ++d) {
        if (row.p[d] > 0) {
            cum += row.p[d];
            cdf.jumps.push_back({u - 1 + d, cum});
        }
    }
    if (cdf.jumps.empty() || cdf.jumps.back().second != 1)
        throw std::invalid_argument("StepCdf: row does not sum to 1");
    return cdf;
}

int StepCdf::inverse(const Rat& t) const {
    for (const auto& [state, cum] : jumps)
        if (cum >= t) return state;
    return jumps.back().first;
}

int StepCdf::inverse(double t) const { return inverse(rat_from_double(t)); }

Rat StepCdf::cdf(int r) const {
    Rat value(0);
    for (const auto& [state, cum] : jumps) {
        if (state > r) break;
        value = cum;
    }
    return value;
}

bool StepCdf::dominates(const StepCdf& other) const {
    int lo = std::min(jumps.front().first, other.jumps.front().first);
    int hi = std::max(jumps.back().first, other.jumps.back().first);
    for (int r = lo; r <= hi; ++r)
        if (cdf(r) < other.cdf(r)) return false;
    return true;
}

namespace {

// CDF of the kernel row implied by a weight table at (k, u); nullopt when
// the state has no continuation (not occupiable under the conditioning).
std::optional<StepCdf> cdf_from_weights(const WeightTable& t, int k, int u) {
    Rat denom = t.at(k + 1, u - 1) + t.at(k + 1, u) + t.at(k + 1, u + 1);
    if (denom == 0) return std::nullopt;
    KernelRow row;
    for (int d = 0; d < 3; ++d) row.p[d] = t.at(k + 1, u - 1 + d) / denom;
    return StepCdf::from_row(u, row);
}

void compare_pair(DominanceReport& rep, int k, int u, int u2, const StepCdf& F,
                  const StepCdf& G) {
    ++rep.comparisons;
    int lo = std::min(F.jumps.front().first, G.jumps.front().first);
    int hi = std::max(F.jumps.back().first, G.jumps.back().first);
    for (int r = lo; r <= hi; ++r) {
        Rat fv = F.cdf(r), gv = G.cdf(r);
        if (fv < gv) {
            rep.ok = false;
            rep.violations.push_back({k, u, u2, r, fv, gv});
        }
    }
}

}  // namespace

DominanceReport check_dominance_p(const std::vector<int>& f, int a, int b) {
    WeightTable t = survival_weights_p(f, a, b);
    DominanceReport rep;
    for (int k = a; k < b; ++k) {
        std::vector<std::pair<int, StepCdf>> cdfs;
        for (int u = 1; u <= f[k]; ++u)
            if (auto cdf = cdf_from_weights(t, k, u)) cdfs.push_back({u, *cdf});
        for (std::size_t i = 0; i < cdfs.size(); ++i)
            for (std::size_t j = i; j < cdfs.size(); ++j)
                compare_pair(rep, k, cdfs[i].first, cdfs[j].first, cdfs[i].second,
                             cdfs[j].second);
    }
    return rep;
}

DominanceReport check_dominance_r(const std::vector<int>& f, int a, int b, int beta0,
                                  int beta1) {
    if (beta0 > beta1) throw std::invalid_argument("check_dominance_r: beta0 > beta1");
    WeightTable t0 = survival_weights_r(f, a, b, beta0);
    WeightTable t1 = survival_weights_r(f, a, b, beta1);
    DominanceReport rep;
    for (int k = a; k < b; ++k) {
        std::vector<std::pair<int, StepCdf>> F, G;
        for (int u = 1; u <= f[k]; ++u) {
            if (auto cdf = cdf_from_weights(t0, k, u)) F.push_back({u, *cdf});
            if (auto cdf = cdf_from_weights(t1, k, u)) G.push_back({u, *cdf});
        }
        for (const auto& [u, fc] : F)
            for (const auto& [u2, gc] : G)
                if (u <= u2) compare_pair(rep, k, u, u2, fc, gc);
        // auxiliary monotonicity: G(r, u) nonincreasing in u
        for (std::size_t i = 0; i < G.size(); ++i)
            for (std::size_t j = i; j < G.size(); ++j)
                compare_pair(rep, k, G[i].first, G[j].first, G[i].second, G[j].second);
    }
    return rep;
}

DominanceReport check_dominance_post_horizon(int state_cap) {
    ChainKernel psi = kernel_psi_free(0, 1, state_cap);
    ChainKernel zeta = kernel_zeta_free(0, 1, -state_cap, state_cap);
    DominanceReport rep;
    for (int u = 0; u <= state_cap; ++u) {
        StepCdf F = StepCdf::from_row(u, psi.row(0, u));
        for (int v = std::max(u, 1); v <= state_cap; ++v) {
            StepCdf G = StepCdf::from_row(v, zeta.row(0, v));
            compare_pair(rep, 0, u, v, F, G);
        }
    }
    return rep;
}

CoupledPathPair couple_paths(const ChainKernel& lower_kernel, const ChainKernel& upper_kernel,
                             int start_lower, int start_upper, CounterRng& rng) {
    if (lower_kernel.time_begin() != upper_kernel.time_begin() ||
        lower_kernel.time_end() != upper_kernel.time_end())
        throw std::invalid_argument("couple_paths: kernels cover different time ranges");
    if (start_lower > start_upper)
        throw std::invalid_argument("couple_paths: start order violated");

    const bool post = lower_kernel.kind() == KernelKind::PsiFree &&
                      upper_kernel.kind() == KernelKind::ZetaFree;

    CoupledPathPair pair;
    pair.lower_kind = lower_kernel.kind();
    pair.upper_kind = upper_kernel.kind();
    pair.lower.push_back(start_lower);
    pair.upper.push_back(start_upper);

    bool upper_positive = start_upper > 0;
    auto check = [&](int l, int u) {
        if (post ? (upper_positive && l > u) : (l > u)) pair.dominance_ok = false;
    };
    check(start_lower, start_upper);

    int l = start_lower, u = start_upper;
    for (int k = lower_kernel.time_begin(); k < lower_kernel.time_end(); ++k) {
        double t = rng.next_unit();
        l = StepCdf::from_row(l, lower_kernel.row(k, l)).inverse(t);
        u = StepCdf::from_row(u, upper_kernel.row(k, u)).inverse(t);
        pair.lower.push_back(l);
        pair.upper.push_back(u);
        pair.uniforms.push_back(t);
        upper_positive = upper_positive && u > 0;
        check(l, u);
    }
    return pair;
}

std::map<std::pair<int, int>, Rat> coupled_joint_kernel(const StepCdf& lower,
                                                        const StepCdf& upper) {
    std::map<std::pair<int, int>, Rat> joint;
    std::size_t i = 0, j = 0;
    Rat prev(0);
    while (prev < 1) {
        const Rat& cl = lower.jumps[i].second;
        const Rat& cu = upper.jumps[j].second;
        Rat c = std::min(cl, cu);
        if (c > prev) joint[{lower.jumps[i].first, upper.jumps[j].first}] += c - prev;
        if (cl == c && i + 1 < lower.jumps.size()) ++i;
        if (cu == c && j + 1 < upper.jumps.size()) ++j;
        prev = c;
    }
    return joint;
}

PairChainResult exact_pair_chain(const ChainKernel& lower_kernel,
                                 const ChainKernel& upper_kernel, int start_lower,
                                 int start_upper, bool post_horizon,
                                 const std::vector<int>* h) {
    if (lower_kernel.time_begin() != upper_kernel.time_begin() ||
        lower_kernel.time_end() != upper_kernel.time_end())
        throw std::invalid_argument("exact_pair_chain: kernels cover different time ranges");
    if (start_lower > start_upper)
        throw std::invalid_argument("exact_pair_chain: start order violated");

    const int a = lower_kernel.time_begin(), b = lower_kernel.time_end();
    const int steps = b - a;
    if (h && static_cast<int>(h->size()) != steps + 1)
        throw std::invalid_argument("exact_pair_chain: h must cover every step");

    // state: (lower, upper, upper stayed positive, upper h-event alive,
    //         lower h-event alive, order ever violated)
    using State = std::tuple<int, int, bool, bool, bool, bool>;
    std::map<State, Rat> dist;

    auto h_at = [&](int i) { return h ? (*h)[i] : 0; };
    bool alive0 = start_upper > 0;
    bool oku0 = h ? (start_upper > 0 && start_upper <= h_at(0)) : true;
    bool okl0 = h ? (start_lower <= h_at(0)) : true;
    bool viol0 = post_horizon ? (alive0 && start_lower > start_upper)
                              : (start_lower > start_upper);
    dist[{start_lower, start_upper, alive0, oku0, okl0, viol0}] = 1;

    PairChainResult res;
    res.violation_prob = 0;
    res.inclusion_violation_prob = 0;
    auto record_marginals = [&]() {
        std::map<int, Rat> ml, mu;
        for (const auto& [st, mass] : dist) {
            ml[std::get<0>(st)] += mass;
            mu[std::get<1>(st)] += mass;
        }
        res.lower_marginals.push_back(std::move(ml));
        res.upper_marginals.push_back(std::move(mu));
    };
    record_marginals();

    for (int k = a; k < b; ++k) {
        std::map<State, Rat> next;
        for (const auto& [st, mass] : dist) {
            auto [l, u, alive, oku, okl, viol] = st;
            StepCdf cl = StepCdf::from_row(l, lower_kernel.row(k, l));
            StepCdf cu = StepCdf::from_row(u, upper_kernel.row(k, u));
            for (const auto& [lu, p] : coupled_joint_kernel(cl, cu)) {
                auto [l2, u2] = lu;
                bool alive2 = alive && u2 > 0;
                bool oku2 = oku && (!h || (u2 > 0 && u2 <= h_at(k + 1 - a)));
                bool okl2 = okl && (!h || l2 <= h_at(k + 1 - a));
                bool viol2 = viol || (post_horizon ? (alive2 && l2 > u2) : (l2 > u2));
                next[{l2, u2, alive2, oku2, okl2, viol2}] += mass * p;
            }
        }
        dist.swap(next);
        record_marginals();
    }

    for (const auto& [st, mass] : dist) {
        if (std::get<5>(st)) res.violation_prob += mass;
        if (h && std::get<3>(st) && !std::get<4>(st)) res.inclusion_violation_prob += mass;
    }
    return res;
}

}  // namespace exitwalk
