#include "exitwalk/exact.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "exitwalk/errors.hpp"
#include "exitwalk/rng.hpp"

namespace exitwalk {

Rat ProbVector::total() const {
    Rat t = 0;
    for (const Rat& q : mass) t += q;
    return t;
}

ProbVector delta_mass(std::shared_ptr<const PointSet> domain, const Point& z) {
    std::size_t idx = domain->index_of(z);
    if (idx == PointSet::npos)
        throw std::invalid_argument("delta_mass: start point " + point_str(z) + " not in domain");
    ProbVector pv;
    pv.domain = std::move(domain);
    pv.mass.assign(pv.domain->size(), Rat(0));
    pv.mass[idx] = 1;
    return pv;
}

namespace {

template <class S>
std::vector<S> step_masses(const PointSet& from, const std::vector<S>& mass,
                           const PointSet& to, const S& inv3k) {
    const auto& offs = king_offsets(to.dim());
    std::vector<S> out(to.size(), S(0));
    Point q(to.dim());
    for (std::size_t i = 0; i < to.size(); ++i) {
        const Point& w = to.point(i);
        S acc(0);
        for (const Point& d : offs) {
            for (int j = 0; j < to.dim(); ++j) q[j] = w[j] + d[j];
            std::size_t idx = from.index_of(q);
            if (idx != PointSet::npos) acc += mass[idx];
        }
        out[i] = acc * inv3k;
    }
    return out;
}

// In-place step when the kill set does not change; nbr precomputed.
template <class S>
void step_same_domain(const std::vector<std::vector<std::uint32_t>>& nbr, std::vector<S>& mass,
                      std::vector<S>& scratch, const S& inv3k) {
    for (std::size_t i = 0; i < mass.size(); ++i) {
        S acc(0);
        for (std::uint32_t j : nbr[i]) acc += mass[j];
        scratch[i] = acc * inv3k;
    }
    mass.swap(scratch);
}

template <class S>
S sum_of(const std::vector<S>& v) {
    S t(0);
    for (const S& x : v) t += x;
    return t;
}

Rat rat_inv3k(int k) { return inv_pow3(static_cast<unsigned long>(k)); }

template <class S>
S make_inv3k(int k);
template <>
Rat make_inv3k<Rat>(int k) { return rat_inv3k(k); }
template <>
double make_inv3k<double>(int k) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p /= 3.0;
    return p;
}

template <class S>
std::vector<S> survival_values(const Point& z, const PointSet& domain, int M) {
    std::size_t idx = domain.index_of(z);
    if (idx == PointSet::npos)
        throw std::invalid_argument("survival: start point " + point_str(z) + " not in domain");
    const S inv3k = make_inv3k<S>(domain.dim());
    std::vector<S> mass(domain.size(), S(0)), scratch(domain.size(), S(0));
    mass[idx] = S(1);
    std::vector<S> curve;
    curve.reserve(M + 1);
    curve.push_back(S(1));
    const auto nbr = domain.neighbor_indices();
    for (int m = 1; m <= M; ++m) {
        step_same_domain(nbr, mass, scratch, inv3k);
        curve.push_back(sum_of(mass));
    }
    return curve;
}

template <class S>
S joint_survival_value(const Point& z, const PointSet& inner, const PointSet& outer, int m,
                       int n) {
    if (m < 0 || n < 0) throw std::invalid_argument("joint_survival: negative horizon");
    if (!inner.is_subset_of(outer))
        throw std::invalid_argument("joint_survival: inner is not a subset of outer");
    std::size_t idx = inner.index_of(z);
    if (idx == PointSet::npos)
        throw std::invalid_argument("joint_survival: start point not in inner domain");

    const S inv3k = make_inv3k<S>(inner.dim());
    if (m >= n) {
        // tau_inner > m already forces tau_outer > n
        return survival_values<S>(z, inner, m)[m];
    }
    // kill at inner through step m, then at outer through step n
    std::vector<S> mass(inner.size(), S(0)), scratch(inner.size(), S(0));
    mass[idx] = S(1);
    const auto nbr_inner = inner.neighbor_indices();
    for (int i = 1; i <= m; ++i) step_same_domain(nbr_inner, mass, scratch, inv3k);
    std::vector<S> mass_outer = step_masses(inner, mass, outer, inv3k);
    scratch.assign(outer.size(), S(0));
    const auto nbr_outer = outer.neighbor_indices();
    for (int i = m + 2; i <= n; ++i) step_same_domain(nbr_outer, mass_outer, scratch, inv3k);
    return sum_of(mass_outer);
}

}  // namespace

ProbVector step(const ProbVector& pv, std::shared_ptr<const PointSet> kill_domain) {
    if (kill_domain->dim() != pv.domain->dim())
        throw std::invalid_argument("step: dimension mismatch");
    ProbVector out;
    out.step_index = pv.step_index + 1;
    out.mass = step_masses(*pv.domain, pv.mass, *kill_domain, rat_inv3k(pv.domain->dim()));
    out.domain = std::move(kill_domain);
    return out;
}

SurvivalCurve survival(const Point& z, const PointSet& domain, int M) {
    return SurvivalCurve{survival_values<Rat>(z, domain, M)};
}

Rat joint_survival(const Point& z, const PointSet& inner, const PointSet& outer, int m, int n) {
    return joint_survival_value<Rat>(z, inner, outer, m, n);
}

Rat conditional_exit_prob(const Point& z, const PointSet& inner, const PointSet& outer, int m,
                          int n) {
    Rat denom = survival_values<Rat>(z, outer, n)[n];
    if (denom == 0)
        throw std::domain_error("conditional_exit_prob: conditioning event has probability 0");
    return joint_survival(z, inner, outer, m, n) / denom;
}

std::vector<double> survival_f(const Point& z, const PointSet& domain, int M) {
    return survival_values<double>(z, domain, M);
}

double joint_survival_f(const Point& z, const PointSet& inner, const PointSet& outer, int m,
                        int n) {
    return joint_survival_value<double>(z, inner, outer, m, n);
}

double conditional_exit_prob_f(const Point& z, const PointSet& inner, const PointSet& outer,
                               int m, int n) {
    double denom = survival_values<double>(z, outer, n)[n];
    if (denom <= 0)
        throw std::domain_error("conditional_exit_prob_f: conditioning event has probability 0");
    return joint_survival_f(z, inner, outer, m, n) / denom;
}

std::vector<Rat> expected_exit_all(const PointSet& domain) {
    const std::size_t n = domain.size();
    if (n == 0) throw std::invalid_argument("expected_exit_all: empty domain");
    const int k = domain.dim();
    const Int three_k = int_pow(3, k);
    const auto nbr = domain.neighbor_indices();

    // Integerized system: (3^k I - N) E = 3^k * 1, N = in-domain king
    // neighbors including self.  Fraction-free (Bareiss) elimination keeps
    // all intermediates integral.
    std::vector<std::vector<Int>> a(n, std::vector<Int>(n + 1, Int(0)));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][i] = three_k;
        for (std::uint32_t j : nbr[i]) a[i][j] -= 1;
        a[i][n] = three_k;
    }

    Int prev(1);
    Int t1, t2;
    for (std::size_t col = 0; col < n; ++col) {
        if (a[col][col] == 0) {
            std::size_t piv = col + 1;
            while (piv < n && a[piv][col] == 0) ++piv;
            if (piv == n) throw std::domain_error("expected_exit_all: singular system");
            std::swap(a[col], a[piv]);
        }
        for (std::size_t i = col + 1; i < n; ++i) {
            if (a[i][col] == 0) {
                // row untouched by pivot column, but still needs rescaling
                for (std::size_t j = col + 1; j <= n; ++j) {
                    t1 = a[col][col] * a[i][j];
                    mpz_divexact(a[i][j].get_mpz_t(), t1.get_mpz_t(), prev.get_mpz_t());
                }
                continue;
            }
            for (std::size_t j = col + 1; j <= n; ++j) {
                t1 = a[col][col] * a[i][j];
                t2 = a[i][col] * a[col][j];
                t1 -= t2;
                mpz_divexact(a[i][j].get_mpz_t(), t1.get_mpz_t(), prev.get_mpz_t());
            }
            a[i][col] = 0;
        }
        prev = a[col][col];
    }

    std::vector<Rat> e(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Rat acc(a[ii][n]);
        for (std::size_t j = ii + 1; j < n; ++j) acc -= Rat(a[ii][j]) * e[j];
        e[ii] = acc / Rat(a[ii][ii]);
        e[ii].canonicalize();
    }
    return e;
}

Rat expected_exit_time(const Point& z, const PointSet& domain) {
    std::size_t idx = domain.index_of(z);
    if (idx == PointSet::npos)
        throw std::invalid_argument("expected_exit_time: start point not in domain");
    return expected_exit_all(domain)[idx];
}

namespace {

// Max king-move distance from any domain point to the exterior.
int max_exit_distance(const PointSet& domain) {
    const auto nbr = domain.neighbor_indices();
    const std::size_t full = king_offsets(domain.dim()).size();
    std::vector<int> dist(domain.size(), -1);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (nbr[i].size() < full) {  // some neighbor lies outside
            dist[i] = 1;
            queue.push_back(i);
        }
    }
    int dmax = 1;
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::uint32_t w : nbr[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                dmax = std::max(dmax, dist[w]);
                queue.push_back(w);
            }
        }
    }
    return dmax;
}

}  // namespace

RatInterval conditional_expected_exit(const Point& z, const PointSet& inner,
                                      const PointSet& outer, int n, const Rat& tolerance,
                                      int step_cap) {
    if (tolerance <= 0) throw std::invalid_argument("conditional_expected_exit: tolerance <= 0");
    const int k = inner.dim();
    Rat denom = survival_values<Rat>(z, outer, n)[n];
    if (denom == 0)
        throw std::domain_error("conditional_expected_exit: conditioning probability is 0");

    Rat acc(0);
    for (int m = 0; m < n; ++m) acc += joint_survival(z, inner, outer, m, n);

    // From step n on the joint reduces to inner survival; run that DP
    // and stop once the geometric block bound clears the tolerance.
    const int L = max_exit_distance(inner);
    const Rat tail_factor = Rat(L) * Rat(int_pow(3, static_cast<unsigned long>(k) * L));

    std::size_t idx = inner.index_of(z);
    const Rat inv3k = rat_inv3k(k);
    std::vector<Rat> mass(inner.size(), Rat(0)), scratch(inner.size(), Rat(0));
    mass[idx] = 1;
    const auto nbr = inner.neighbor_indices();
    for (int i = 1; i <= n; ++i) step_same_domain(nbr, mass, scratch, inv3k);

    Rat s = sum_of(mass);  // s_n
    int m = n;
    while (true) {
        acc += s;
        Rat tail_ub = s * tail_factor;
        if (tail_ub <= tolerance * denom) {
            return RatInterval{acc / denom, (acc + tail_ub) / denom};
        }
        if (m >= step_cap)
            throw CapExceeded("conditional_expected_exit: tolerance not reached within " +
                              std::to_string(step_cap) + " steps");
        step_same_domain(nbr, mass, scratch, inv3k);
        s = sum_of(mass);
        ++m;
    }
}

Rat brute_force_joint(const Point& z, const PointSet& inner, const PointSet& outer, int m, int n,
                      std::uint64_t path_cap) {
    if (m < 0 || n < 0) throw std::invalid_argument("brute_force_joint: negative horizon");
    if (!inner.is_subset_of(outer))
        throw std::invalid_argument("brute_force_joint: inner is not a subset of outer");
    const int k = inner.dim();
    const int l = std::max(m, n);
    long double total_paths = 1.0L;
    for (int i = 0; i < k * l; ++i) total_paths *= 3.0L;
    if (total_paths > static_cast<long double>(path_cap))
        throw CapExceeded("brute_force_joint: 3^(k*l) exceeds path cap");

    auto ok_at = [&](const Point& p, int i) {
        if (i <= m && !inner.contains(p)) return false;
        if (i <= n && !outer.contains(p)) return false;
        return true;
    };
    if (!ok_at(z, 0)) return Rat(0);

    const auto& offs = king_offsets(k);
    std::uint64_t count = 0;
    Point cur = z;
    std::function<void(int)> dfs = [&](int depth) {
        if (depth == l) {
            ++count;
            return;
        }
        Point saved = cur;
        for (const Point& d : offs) {
            for (int j = 0; j < k; ++j) cur[j] = saved[j] + d[j];
            if (ok_at(cur, depth + 1)) dfs(depth + 1);
        }
        cur = saved;
    };
    dfs(0);

    Rat r(Int(count), int_pow(3, static_cast<unsigned long>(k) * l));
    r.canonicalize();
    return r;
}

std::string exact_result_json(const std::string& instance, const Point& z, int m, int n,
                              const Rat& value) {
    nlohmann::json j;
    j["instance"] = instance;
    j["z"] = z;
    j["m"] = m;
    j["n"] = n;
    j["num"] = num_str(value);
    j["den"] = den_str(value);
    j["float"] = to_double(value);
    return j.dump();
}

}  // namespace exitwalk
