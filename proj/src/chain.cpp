#include "exitwalk/chain.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "exitwalk/errors.hpp"

namespace exitwalk {

void BarrierProblem::check() const {
    if (n < 0 || m < 0) throw std::invalid_argument("BarrierProblem: negative horizon");
    if (static_cast<int>(f.size()) != n + 1)
        throw std::invalid_argument("BarrierProblem: f must have n+1 values");
    if (static_cast<int>(h.size()) != m + 1)
        throw std::invalid_argument("BarrierProblem: h must have m+1 values");
    for (int v : f)
        if (v < 1) throw std::invalid_argument("BarrierProblem: f must be positive");
    for (int v : h)
        if (v < 1) throw std::invalid_argument("BarrierProblem: h must be positive");
    for (int i = 0; i <= std::min(m, n); ++i)
        if (h[i] > f[i]) throw std::invalid_argument("BarrierProblem: h(i) > f(i)");
    if (x < 1 || x > h[0]) throw std::invalid_argument("BarrierProblem: need 0 < x <= h(0)");
}

BarrierProblem BarrierProblem::load(std::istream& in, const std::string& name) {
    BarrierProblem bp;
    std::string line;
    int lineno = 0;
    auto next_data_line = [&]() -> std::string {
        while (std::getline(in, line)) {
            ++lineno;
            std::string t = line;
            t.erase(0, t.find_first_not_of(" \t"));
            if (!t.empty() && t[0] != '#') return t;
        }
        throw ParseError(name + ": unexpected end of file at line " + std::to_string(lineno));
    };
    {
        std::istringstream iss(next_data_line());
        if (!(iss >> bp.n >> bp.m >> bp.x))
            throw ParseError(name + ":" + std::to_string(lineno) + ": expected 'n m x' header");
    }
    auto read_row = [&](int count, const char* what) {
        std::istringstream iss(next_data_line());
        std::vector<int> row;
        int v;
        while (iss >> v) row.push_back(v);
        if (static_cast<int>(row.size()) != count)
            throw ParseError(name + ":" + std::to_string(lineno) + ": " + what + " needs " +
                             std::to_string(count) + " values, got " +
                             std::to_string(row.size()));
        return row;
    };
    bp.f = read_row(bp.n + 1, "f row");
    bp.h = read_row(bp.m + 1, "h row");
    try {
        bp.check();
    } catch (const std::invalid_argument& e) {
        throw ParseError(name + ": " + e.what());
    }
    return bp;
}

BarrierProblem BarrierProblem::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open barrier file: " + path);
    return load(in, path);
}

void BarrierProblem::save(std::ostream& out) const {
    out << n << " " << m << " " << x << "\n";
    for (int i = 0; i <= n; ++i) out << (i ? " " : "") << f[i];
    out << "\n";
    for (int i = 0; i <= m; ++i) out << (i ? " " : "") << h[i];
    out << "\n";
}

const Rat& WeightTable::at(int k, int j) const {
    static const Rat zero(0);
    if (k < a || k > b || j < 0 || j > jmax) return zero;
    return w[k - a][j];
}

namespace {

int barrier_at(const std::vector<int>& f, int i) {
    if (i < 0 || i >= static_cast<int>(f.size()))
        throw std::invalid_argument("barrier index out of range");
    return f[i];
}

int default_jmax(const std::vector<int>& f, int a, int b, int jmax_hint) {
    if (jmax_hint >= 0) return jmax_hint;
    int fm = 0;
    bool unbounded = false;
    for (int i = a; i <= b; ++i) {
        int v = barrier_at(f, i);
        if (v >= kUnboundedBarrier)
            unbounded = true;
        else
            fm = std::max(fm, v);
    }
    if (unbounded)
        throw std::invalid_argument("survival weights: unbounded barrier needs a jmax hint");
    return fm + 1;
}

WeightTable backward_weights(const std::vector<int>& f, int a, int b, int jmax,
                             const std::vector<Rat>& terminal) {
    WeightTable t;
    t.a = a;
    t.b = b;
    t.jmax = jmax;
    t.w.assign(b - a + 1, std::vector<Rat>(jmax + 1, Rat(0)));
    t.w[b - a] = terminal;
    const Rat third(1, 3);
    for (int k = b - 1; k >= a; --k) {
        const auto& next = t.w[k - a + 1];
        auto& cur = t.w[k - a];
        int fk = barrier_at(f, k);
        for (int j = 1; j <= std::min(jmax, fk); ++j) {
            Rat s = next[j];
            if (j - 1 >= 0) s += next[j - 1];
            if (j + 1 <= jmax) s += next[j + 1];
            cur[j] = s * third;
        }
    }
    return t;
}

}  // namespace

WeightTable survival_weights_p(const std::vector<int>& f, int a, int b, int jmax_hint) {
    if (a > b) throw std::invalid_argument("survival_weights_p: a > b");
    int jmax = default_jmax(f, a, b, jmax_hint);
    std::vector<Rat> terminal(jmax + 1, Rat(0));
    int fb = barrier_at(f, b);
    for (int j = 1; j <= std::min(jmax, fb); ++j) terminal[j] = 1;
    return backward_weights(f, a, b, jmax, terminal);
}

WeightTable survival_weights_r(const std::vector<int>& f, int a, int b, int beta,
                               int jmax_hint) {
    if (a > b) throw std::invalid_argument("survival_weights_r: a > b");
    int fb = barrier_at(f, b);
    if (beta < 1 || beta > fb)
        throw std::invalid_argument("survival_weights_r: beta outside barrier");
    int jmax = default_jmax(f, a, b, jmax_hint);
    std::vector<Rat> terminal(jmax + 1, Rat(0));
    if (beta <= jmax) terminal[beta] = 1;
    return backward_weights(f, a, b, jmax, terminal);
}

std::string kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::PType: return "P";
        case KernelKind::RType: return "R";
        case KernelKind::PsiFree: return "psi-free";
        case KernelKind::ZetaFree: return "zeta-free";
    }
    return "?";
}

ChainKernel::ChainKernel(KernelKind kind, int a, int b) : kind_(kind), a_(a), b_(b) {
    if (a > b) throw std::invalid_argument("ChainKernel: a > b");
    rows_.resize(b - a);
}

bool ChainKernel::has_row(int k, int u) const {
    if (k < a_ || k >= b_) return false;
    return rows_[k - a_].count(u) > 0;
}

const KernelRow& ChainKernel::row(int k, int u) const {
    if (k < a_ || k >= b_)
        throw std::out_of_range("ChainKernel::row: step " + std::to_string(k) +
                                " outside [" + std::to_string(a_) + "," + std::to_string(b_) +
                                ")");
    auto it = rows_[k - a_].find(u);
    if (it == rows_[k - a_].end())
        throw std::out_of_range("ChainKernel::row: state " + std::to_string(u) +
                                " unreachable at step " + std::to_string(k));
    return it->second;
}

const std::map<int, KernelRow>& ChainKernel::rows_at(int k) const {
    if (k < a_ || k >= b_) throw std::out_of_range("ChainKernel::rows_at: step out of range");
    return rows_[k - a_];
}

void ChainKernel::set_row(int k, int u, KernelRow row) {
    rows_[k - a_][u] = std::move(row);
}

namespace {

ChainKernel kernel_from_weights(KernelKind kind, const WeightTable& t, int alpha) {
    ChainKernel kern(kind, t.a, t.b);
    std::set<int> reachable{alpha};
    for (int k = t.a; k < t.b; ++k) {
        std::set<int> next_reachable;
        for (int u : reachable) {
            Rat denom = t.at(k + 1, u - 1) + t.at(k + 1, u) + t.at(k + 1, u + 1);
            if (denom == 0)
                throw std::logic_error("conditioned kernel: zero continuation weight at a "
                                       "reachable state");
            KernelRow row;
            for (int d = 0; d < 3; ++d) {
                row.p[d] = t.at(k + 1, u - 1 + d) / denom;
                if (row.p[d] > 0) next_reachable.insert(u - 1 + d);
            }
            kern.set_row(k, u, std::move(row));
        }
        reachable.swap(next_reachable);
    }
    return kern;
}

}  // namespace

ChainKernel kernel_p(const std::vector<int>& f, int a, int b, int alpha) {
    if (alpha < 1 || alpha > barrier_at(f, a))
        throw std::invalid_argument("kernel_p: alpha outside barrier at start");
    WeightTable t = survival_weights_p(f, a, b);
    if (t.at(a, alpha) == 0)
        throw std::invalid_argument("kernel_p: conditioning event has probability 0");
    return kernel_from_weights(KernelKind::PType, t, alpha);
}

ChainKernel kernel_r(const std::vector<int>& f, int a, int b, int alpha, int beta) {
    if (alpha < 1 || alpha > barrier_at(f, a))
        throw std::invalid_argument("kernel_r: alpha outside barrier at start");
    if (a == b) {
        if (alpha != beta) throw std::invalid_argument("kernel_r: incompatible endpoints");
        if (beta < 1 || beta > barrier_at(f, b))
            throw std::invalid_argument("kernel_r: beta outside barrier");
        return ChainKernel(KernelKind::RType, a, b);
    }
    WeightTable t = survival_weights_r(f, a, b, beta);
    if (t.at(a, alpha) == 0)
        throw std::invalid_argument("kernel_r: incompatible endpoints (zero total weight)");
    return kernel_from_weights(KernelKind::RType, t, alpha);
}

ChainKernel kernel_psi_free(int a, int b, int state_cap) {
    if (state_cap < 1) throw std::invalid_argument("kernel_psi_free: state_cap must be >= 1");
    ChainKernel kern(KernelKind::PsiFree, a, b);
    const Rat third(1, 3);
    KernelRow zero_row{{Rat(0), third, Rat(2, 3)}};
    KernelRow interior{{third, third, third}};
    for (int k = a; k < b; ++k) {
        kern.set_row(k, 0, zero_row);
        for (int u = 1; u <= state_cap; ++u) kern.set_row(k, u, interior);
    }
    return kern;
}

ChainKernel kernel_zeta_free(int a, int b, int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("kernel_zeta_free: lo > hi");
    ChainKernel kern(KernelKind::ZetaFree, a, b);
    const Rat third(1, 3);
    KernelRow interior{{third, third, third}};
    for (int k = a; k < b; ++k)
        for (int u = lo; u <= hi; ++u) kern.set_row(k, u, interior);
    return kern;
}

std::vector<std::map<int, Rat>> chain_distribution(const ChainKernel& kernel, int start_state) {
    std::vector<std::map<int, Rat>> dist;
    dist.push_back({{start_state, Rat(1)}});
    for (int k = kernel.time_begin(); k < kernel.time_end(); ++k) {
        std::map<int, Rat> next;
        for (const auto& [u, mass] : dist.back()) {
            const KernelRow& row = kernel.row(k, u);
            for (int d = 0; d < 3; ++d) {
                if (row.p[d] > 0) next[u - 1 + d] += mass * row.p[d];
            }
        }
        dist.push_back(std::move(next));
    }
    return dist;
}

PiecewiseChainLaw chain_law_from_zeros(int x, const std::optional<std::vector<int>>& f,
                                       const std::vector<int>& zero_positions, int l) {
    if (x < 1) throw std::invalid_argument("chain_law_from_zeros: x must be >= 1");
    if (l < 0) throw std::invalid_argument("chain_law_from_zeros: negative horizon");
    const int n = f ? static_cast<int>(f->size()) - 1 : l;
    if (n > l) throw std::invalid_argument("chain_law_from_zeros: barrier horizon exceeds l");
    for (std::size_t i = 0; i < zero_positions.size(); ++i) {
        int c = zero_positions[i];
        if (c < 1 || c > n)
            throw std::invalid_argument("chain_law_from_zeros: zero position outside (0, n]");
        if (i > 0 && zero_positions[i] <= zero_positions[i - 1])
            throw std::invalid_argument("chain_law_from_zeros: positions must increase");
    }

    // Unbounded barrier: weights need an explicit state window.
    std::vector<int> fv = f ? *f : std::vector<int>(n + 1, kUnboundedBarrier);
    const int jmax = f ? default_jmax(fv, 0, n, -1) : x + n + 1;

    PiecewiseChainLaw law;
    law.x = x;
    law.l = l;
    law.n = n;
    law.zeros = zero_positions;

    auto make_p = [&](int a, int b, int alpha) {
        if (alpha < 1 || alpha > fv[a])
            throw std::invalid_argument("chain_law_from_zeros: start outside barrier");
        WeightTable t = survival_weights_p(fv, a, b, jmax);
        if (t.at(a, alpha) == 0)
            throw std::invalid_argument("chain_law_from_zeros: infeasible barrier segment");
        return kernel_from_weights(KernelKind::PType, t, alpha);
    };
    auto make_r = [&](int a, int b, int alpha, int beta) {
        try {
            if (a == b) {
                if (alpha != beta)
                    throw std::invalid_argument("pinned single-step segment mismatch");
                return ChainKernel(KernelKind::RType, a, b);
            }
            WeightTable t = survival_weights_r(fv, a, b, beta, jmax);
            if (t.at(a, alpha) == 0)
                throw std::invalid_argument("zero total weight");
            return kernel_from_weights(KernelKind::RType, t, alpha);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string("chain_law_from_zeros: inconsistent zero "
                                                    "positions: ") +
                                        e.what());
        }
    };

    if (zero_positions.empty()) {
        law.segments.push_back({make_p(0, n, x), x, std::nullopt});
    } else {
        int c1 = zero_positions.front();
        law.segments.push_back({make_r(0, c1 - 1, x, 1), x, 1});
        for (std::size_t i = 0; i + 1 < zero_positions.size(); ++i) {
            int c = zero_positions[i], d = zero_positions[i + 1];
            if (d - c >= 2) law.segments.push_back({make_r(c + 1, d - 1, 1, 1), 1, 1});
        }
        int cN = zero_positions.back();
        if (cN < n) law.segments.push_back({make_p(cN + 1, n, 1), 1, std::nullopt});
    }

    if (l > n) {
        int cap = (f ? jmax : x + n + 1) + (l - n) + 1;
        law.segments.push_back({kernel_psi_free(n, l, cap), -1, std::nullopt});
    }
    return law;
}

Rat PiecewiseChainLaw::path_prob(const std::vector<int>& states) const {
    if (static_cast<int>(states.size()) != l + 1)
        throw std::invalid_argument("path_prob: path length mismatch");
    if (states[0] != x) return Rat(0);
    for (int c : zeros)
        if (states[c] != 0) return Rat(0);
    // exact-zero conditioning: no other zeros within [0, n]
    std::set<int> zset(zeros.begin(), zeros.end());
    for (int i = 0; i <= n; ++i)
        if (states[i] == 0 && !zset.count(i)) return Rat(0);

    Rat prob(1);
    for (const ChainSegment& seg : segments) {
        const ChainKernel& kern = seg.kernel;
        int a = kern.time_begin(), b = kern.time_end();
        if (seg.start_state >= 0 && states[a] != seg.start_state) return Rat(0);
        if (seg.end_state && states[b] != *seg.end_state) return Rat(0);
        for (int k = a; k < b; ++k) {
            int d = states[k + 1] - states[k] + 1;
            if (d < 0 || d > 2) return Rat(0);
            if (!kern.has_row(k, states[k])) return Rat(0);
            const Rat& p = kern.row(k, states[k]).p[d];
            if (p == 0) return Rat(0);
            prob *= p;
        }
    }
    return prob;
}

Rat interval_event_prob(int x, const std::vector<std::pair<int, int>>& allowed) {
    if (allowed.empty()) throw std::invalid_argument("interval_event_prob: no steps");
    const int L = static_cast<int>(allowed.size()) - 1;
    if (x < allowed[0].first || x > allowed[0].second) return Rat(0);

    int lo = x, hi = x;
    for (const auto& [a, b] : allowed) {
        if (a <= b) {
            lo = std::min(lo, a);
            hi = std::max(hi, b);
        }
    }
    const int width = hi - lo + 1;
    std::vector<Int> count(width, Int(0)), next(width, Int(0));
    count[x - lo] = 1;
    for (int i = 1; i <= L; ++i) {
        const auto& [a, b] = allowed[i];
        std::fill(next.begin(), next.end(), Int(0));
        if (a <= b) {
            for (int v = std::max(a, lo); v <= std::min(b, hi); ++v) {
                Int s = count[v - lo];
                if (v - 1 >= lo) s += count[v - 1 - lo];
                if (v + 1 <= hi) s += count[v + 1 - lo];
                next[v - lo] = s;
            }
        }
        count.swap(next);
    }
    Int total(0);
    for (const Int& c : count) total += c;
    Rat r(total, int_pow(3, static_cast<unsigned long>(L)));
    r.canonicalize();
    return r;
}

bool AdmissibleSequence::admissible_in(const LatticeDomain& domain) const {
    if (domain.dim() != 2) throw std::invalid_argument("admissible_in: needs a 2-D domain");
    if (ys.empty() || z.size() != 2 || z[1] != ys[0]) return false;
    if (!domain.points().contains(z)) return false;
    for (std::size_t i = 1; i < ys.size(); ++i)
        if (std::abs(ys[i] - ys[i - 1]) > 1) return false;

    int lo = z[0], hi = z[0];
    for (std::size_t i = 0; i < ys.size(); ++i) {
        auto iv = domain.row_interval({ys[i]});
        if (!iv) return false;
        if (i > 0) {
            lo -= 1;
            hi += 1;
        }
        lo = std::max(lo, iv->first);
        hi = std::min(hi, iv->second);
        if (lo > hi) return false;
    }
    return true;
}

}  // namespace exitwalk
