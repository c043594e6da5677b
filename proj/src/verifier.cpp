#include "exitwalk/verifier.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "exitwalk/errors.hpp"

namespace exitwalk {

InequalityVerdict make_verdict(std::string kind, std::string instance, Rat left, Rat right,
                               bool exact) {
    InequalityVerdict v;
    v.kind = std::move(kind);
    v.instance = std::move(instance);
    v.margin = right - left;
    v.left = std::move(left);
    v.right = std::move(right);
    v.exact = exact;
    v.holds = v.margin >= 0;
    return v;
}

namespace {

std::string instance_desc(const LatticeDomain& domain, const LatticeRect& rect, const Point& z,
                          int m, int n) {
    std::ostringstream oss;
    domain.save(oss);
    oss << rect.to_line() << " z=" << point_str(z) << " m=" << m << " n=" << n;
    return oss.str();
}

void check_proposition_inputs(const LatticeDomain& domain, const LatticeRect& rect,
                              const Point& z, int m, int n) {
    if (m < 0 || n < 0) throw std::invalid_argument("negative horizon");
    const ValidationReport& rep = domain.validate();
    if (!rep.all_pass())
        throw std::invalid_argument("domain fails validation: " +
                                    (rep.failures.empty() ? "?" : rep.failures.front()));
    if (!rect.contains_domain(domain))
        throw std::invalid_argument("rect does not contain the domain");
    if (!domain.points().contains(z)) throw std::invalid_argument("z not in domain");
    if (z[0] <= 0) throw std::invalid_argument("z not in the positive half");
}

}  // namespace

InequalityVerdict verify_proposition(const LatticeDomain& domain, const LatticeRect& rect,
                                     const Point& z, int m, int n) {
    check_proposition_inputs(domain, rect, z, m, n);
    PointSet inner_half = domain.half();
    PointSet outer_half = rect.half_point_set();
    Rat left = conditional_exit_prob(z, inner_half, outer_half, m, n);
    Rat right = conditional_exit_prob(z, domain.points(), rect.point_set(), m, n);
    return make_verdict("proposition", instance_desc(domain, rect, z, m, n), std::move(left),
                        std::move(right));
}

InequalityVerdict verify_ratio_form(const LatticeDomain& domain, const LatticeRect& rect,
                                    const Point& z, int m, int n) {
    check_proposition_inputs(domain, rect, z, m, n);
    PointSet inner_half = domain.half();
    PointSet outer_half = rect.half_point_set();
    PointSet outer = rect.point_set();

    Rat joint_half = joint_survival(z, inner_half, outer_half, m, n);
    Rat joint_full = joint_survival(z, domain.points(), outer, m, n);
    Rat surv_half = survival(z, outer_half, n).values[n];
    Rat surv_full = survival(z, outer, n).values[n];
    if (joint_full == 0 || surv_full == 0)
        throw std::domain_error("verify_ratio_form: zero denominator");
    return make_verdict("ratio", instance_desc(domain, rect, z, m, n), joint_half / joint_full,
                        surv_half / surv_full);
}

namespace {

constexpr int kEmptyLo = 1, kEmptyHi = 0;  // empty constraint interval

// Intersected one-sided (0, c] intervals for the joint half events.
std::vector<std::pair<int, int>> half_intervals(const std::vector<std::optional<int>>& h, int m,
                                                const std::vector<std::optional<int>>& f,
                                                int n) {
    int l = std::max(m, n);
    std::vector<std::pair<int, int>> allowed(l + 1, {kEmptyLo, kEmptyHi});
    for (int i = 0; i <= l; ++i) {
        int cap = kUnboundedBarrier;
        bool dead = false;
        if (i <= m) {
            if (!h[i]) dead = true;
            else cap = std::min(cap, *h[i]);
        }
        if (i <= n) {
            if (!f[i]) dead = true;
            else cap = std::min(cap, *f[i]);
        }
        if (!dead && cap >= 1) allowed[i] = {1, cap};
    }
    return allowed;
}

std::vector<std::pair<int, int>> full_intervals(const std::vector<std::optional<int>>& h, int m,
                                                const std::vector<std::optional<int>>& f,
                                                int n) {
    int l = std::max(m, n);
    std::vector<std::pair<int, int>> allowed(l + 1, {kEmptyLo, kEmptyHi});
    for (int i = 0; i <= l; ++i) {
        int cap = kUnboundedBarrier;
        bool dead = false;
        if (i <= m) {
            if (!h[i]) dead = true;
            else cap = std::min(cap, *h[i]);
        }
        if (i <= n) {
            if (!f[i]) dead = true;
            else cap = std::min(cap, *f[i]);
        }
        // cap may be 0: a zero-width row still admits X = 0
        if (!dead) allowed[i] = {-cap, cap};
    }
    return allowed;
}

}  // namespace

LemmaQuantities lemma_quantities(const LatticeDomain& domain, const LatticeRect& rect, int x,
                                 const std::vector<int>& ys, int m, int n) {
    const int l = std::max(m, n);
    if (static_cast<int>(ys.size()) != l + 1)
        throw std::invalid_argument("lemma_quantities: y path must have max(m,n)+1 entries");

    std::vector<std::optional<int>> h(l + 1), f(l + 1);
    for (int i = 0; i <= l; ++i) {
        Tail tail{ys[i]};
        if (i <= m) {
            auto iv = domain.row_interval(tail);
            if (iv) h[i] = iv->second;
        }
        if (i <= n) {
            if (rect.tail_in_bounds(tail)) f[i] = rect.half_width();
        }
    }

    LemmaQuantities q;
    q.joint_half = interval_event_prob(x, half_intervals(h, m, f, n));
    q.joint_full = interval_event_prob(x, full_intervals(h, m, f, n));

    std::vector<std::optional<int>> none(n + 1);
    std::vector<std::optional<int>> fn(f.begin(), f.begin() + n + 1);
    q.cond_half = interval_event_prob(x, half_intervals(none, -1, fn, n));
    q.cond_full = interval_event_prob(x, full_intervals(none, -1, fn, n));
    return q;
}

InequalityVerdict verify_conditioned_lemma(const LatticeDomain& domain, const LatticeRect& rect,
                                           const AdmissibleSequence& y_seq, int m, int n) {
    if (domain.dim() != 2)
        throw std::invalid_argument("verify_conditioned_lemma: 2-D machinery");
    check_proposition_inputs(domain, rect, y_seq.z, m, n);
    if (!y_seq.admissible_in(domain))
        throw std::invalid_argument("verify_conditioned_lemma: sequence not admissible");
    if (static_cast<int>(y_seq.ys.size()) != std::max(m, n) + 1)
        throw std::invalid_argument("verify_conditioned_lemma: sequence length mismatch");

    LemmaQuantities q = lemma_quantities(domain, rect, y_seq.z[0], y_seq.ys, m, n);
    if (q.joint_full == 0 || q.cond_full == 0)
        throw std::domain_error("verify_conditioned_lemma: zero denominator for admissible y");

    std::ostringstream oss;
    oss << instance_desc(domain, rect, y_seq.z, m, n) << " y=";
    for (int y : y_seq.ys) oss << y << ",";
    return make_verdict("lemma", oss.str(), q.joint_half / q.joint_full,
                        q.cond_half / q.cond_full);
}

InequalityVerdict verify_barrier_inequality(const BarrierProblem& bp) {
    bp.check();
    const int m = bp.m, n = bp.n, l = std::max(m, n);

    std::vector<std::optional<int>> h(l + 1), f(l + 1);
    for (int i = 0; i <= m; ++i) h[i] = bp.h[i];
    for (int i = 0; i <= n; ++i) f[i] = bp.f[i];
    std::vector<std::optional<int>> none_n(l + 1);

    Rat p_hf_half = interval_event_prob(bp.x, half_intervals(h, m, f, n));
    Rat p_hf_full = interval_event_prob(bp.x, full_intervals(h, m, f, n));
    std::vector<std::optional<int>> fn(f.begin(), f.begin() + n + 1);
    Rat p_f_half = interval_event_prob(bp.x, half_intervals(none_n, -1, fn, n));
    Rat p_f_full = interval_event_prob(bp.x, full_intervals(none_n, -1, fn, n));

    if (p_f_half == 0)
        throw std::domain_error("verify_barrier_inequality: P(F+) = 0 from this start");

    std::ostringstream oss;
    oss << "barrier n=" << n << " m=" << m << " x=" << bp.x << " f=";
    for (int v : bp.f) oss << v << ",";
    oss << " h=";
    for (int v : bp.h) oss << v << ",";
    return make_verdict("barrier", oss.str(), p_hf_half / p_f_half, p_hf_full / p_f_full);
}

PartitionResult verify_partition(const BarrierProblem& bp, std::uint64_t path_cap) {
    bp.check();
    const int m = bp.m, n = bp.n, l = std::max(m, n);
    long double total = 1.0L;
    for (int i = 0; i < l; ++i) total *= 3.0L;
    if (total > static_cast<long double>(path_cap))
        throw CapExceeded("verify_partition: 3^max(m,n) exceeds path cap");

    struct CellCount {
        std::uint64_t in_f = 0;
        std::uint64_t in_fh = 0;
    };
    std::map<std::vector<int>, CellCount> cells;
    std::uint64_t count_f = 0, count_fh = 0, count_fplus = 0, count_fhplus = 0;

    std::vector<int> path(l + 1);
    path[0] = bp.x;
    std::vector<int> zeros;
    std::function<void(int)> dfs = [&](int depth) {
        if (depth == l) {
            bool in_f = true, in_h = true, in_fplus = true, in_hplus = true;
            zeros.clear();
            for (int i = 0; i <= l; ++i) {
                int v = path[i];
                if (i <= n) {
                    if (std::abs(v) > bp.f[i]) in_f = false;
                    if (v < 1 || v > bp.f[i]) in_fplus = false;
                    if (i > 0 && v == 0) zeros.push_back(i);
                }
                if (i <= m) {
                    if (std::abs(v) > bp.h[i]) in_h = false;
                    if (v < 1 || v > bp.h[i]) in_hplus = false;
                }
            }
            if (in_f) {
                ++count_f;
                auto& cell = cells[zeros];
                ++cell.in_f;
                if (in_h) {
                    ++count_fh;
                    ++cell.in_fh;
                }
            }
            if (in_fplus) {
                ++count_fplus;
                if (in_hplus) ++count_fhplus;
            }
            return;
        }
        for (int d = -1; d <= 1; ++d) {
            path[depth + 1] = path[depth] + d;
            dfs(depth + 1);
        }
    };
    dfs(0);

    if (count_fplus == 0)
        throw std::domain_error("verify_partition: P(F+) = 0 from this start");

    PartitionResult res;
    res.e0 = Rat(Int(count_fhplus), Int(count_fplus));
    res.e0.canonicalize();
    res.p_h_given_f = count_f ? Rat(Int(count_fh), Int(count_f)) : Rat(0);
    res.p_h_given_f.canonicalize();

    const Int denom = int_pow(3, static_cast<unsigned long>(l));
    res.holds = true;
    std::uint64_t mixture_fh = 0;
    for (const auto& [zs, cc] : cells) {
        PartitionCell cell;
        cell.zeros = zs;
        cell.paths_in_cell = cc.in_f;
        cell.paths_with_h = cc.in_fh;
        cell.cell_prob = Rat(Int(cc.in_f), denom);
        cell.cell_prob.canonicalize();
        cell.cond_h = Rat(Int(cc.in_fh), Int(cc.in_f));
        cell.cond_h.canonicalize();
        if (res.e0 > cell.cond_h) res.holds = false;
        mixture_fh += cc.in_fh;
        res.cells.push_back(std::move(cell));
    }
    res.mixture_ok = mixture_fh == count_fh;
    return res;
}

CorollaryVerdict verify_corollary_discrete(const LatticeDomain& domain, const LatticeRect& rect,
                                           const Point& z, int n, const Rat& tolerance) {
    check_proposition_inputs(domain, rect, z, 0, n);
    CorollaryVerdict v;
    v.instance = instance_desc(domain, rect, z, -1, n);
    v.left = conditional_expected_exit(z, domain.half(), rect.half_point_set(), n, tolerance);
    v.right = conditional_expected_exit(z, domain.points(), rect.point_set(), n, tolerance);
    v.margin = v.right.lo - v.left.hi;
    if (v.margin >= 0)
        v.outcome = CorollaryOutcome::Holds;
    else if (v.right.hi < v.left.lo)
        v.outcome = CorollaryOutcome::Fails;
    else
        v.outcome = CorollaryOutcome::Inconclusive;
    return v;
}

CorpusSpec CorpusSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open corpus spec: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    CorpusSpec spec;
    spec.seed = j.value("seed", spec.seed);
    spec.instances = j.value("instances", spec.instances);
    spec.dimension = j.value("dimension", spec.dimension);
    spec.max_extent = j.value("max_extent", spec.max_extent);
    spec.m_max = j.value("m_max", spec.m_max);
    spec.n_max = j.value("n_max", spec.n_max);
    if (spec.instances < 1 || spec.dimension < 1 || spec.max_extent < 1)
        throw ParseError(path + ": corpus spec values out of range");
    return spec;
}

std::string CorpusSpec::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["instances"] = instances;
    j["dimension"] = dimension;
    j["max_extent"] = max_extent;
    j["m_max"] = m_max;
    j["n_max"] = n_max;
    return j.dump();
}

PropositionInstance make_proposition_instance(const CorpusSpec& spec, std::uint64_t index) {
    CounterRng rng = CounterRng(spec.seed).derive("corpus").derive(index);
    const int k = spec.dimension;

    for (int attempt = 0;; ++attempt) {
        std::uint64_t dseed = rng.next_u64();
        LatticeDomain domain = LatticeDomain::generate_random(dseed, k, spec.max_extent);
        PointSet half = domain.half();
        if (half.empty()) {
            if (attempt > 200)
                throw std::logic_error("make_proposition_instance: cannot find nonempty half");
            continue;
        }

        LatticeRect bbox = bounding_rect(domain);
        Coord hw = bbox.half_width() + rng.next_int(0, 2);
        std::vector<std::pair<Coord, Coord>> bounds = bbox.bounds();
        for (auto& [lo, hi] : bounds) {
            lo -= rng.next_int(0, 2);
            hi += rng.next_int(0, 2);
        }
        LatticeRect rect(hw, std::move(bounds));

        PropositionInstance inst{
            std::move(domain), std::move(rect),
            half.point(rng.next_below(half.size())),
            rng.next_int(0, spec.m_max), rng.next_int(0, spec.n_max), ""};
        std::ostringstream oss;
        oss << "corpus seed=" << spec.seed << " index=" << index << " "
            << instance_desc(inst.domain, inst.rect, inst.z, inst.m, inst.n);
        inst.id = std::to_string(fnv1a64(oss.str()));
        return inst;
    }
}

BarrierProblem make_barrier_problem(CounterRng rng, int horizon_max, int barrier_max) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        BarrierProblem bp;
        bp.n = rng.next_int(0, horizon_max);
        bp.m = rng.next_int(0, horizon_max);
        bp.f.resize(bp.n + 1);
        bp.h.resize(bp.m + 1);
        for (int& v : bp.f) v = rng.next_int(1, barrier_max);
        for (int i = 0; i <= bp.m; ++i) {
            int cap = i <= bp.n ? bp.f[i] : barrier_max;
            bp.h[i] = rng.next_int(1, cap);
        }
        bp.x = rng.next_int(1, bp.h[0]);
        // feasibility: the conditioning events must have positive mass
        std::vector<std::pair<int, int>> fplus(bp.n + 1), hplus(std::max(bp.m, bp.n) + 1);
        for (int i = 0; i <= bp.n; ++i) fplus[i] = {1, bp.f[i]};
        for (int i = 0; i <= std::max(bp.m, bp.n); ++i) {
            int cap = kUnboundedBarrier;
            if (i <= bp.m) cap = std::min(cap, bp.h[i]);
            if (i <= bp.n) cap = std::min(cap, bp.f[i]);
            hplus[i] = {1, cap};
        }
        if (interval_event_prob(bp.x, fplus) > 0 && interval_event_prob(bp.x, hplus) > 0)
            return bp;
    }
    throw std::logic_error("make_barrier_problem: rejection budget exhausted");
}

std::optional<AdmissibleSequence> sample_admissible_steps(CounterRng& rng,
                                                               const LatticeDomain& domain,
                                                               const Point& z, int length) {
    AdmissibleSequence seq;
    seq.z = z;
    seq.ys.push_back(z[1]);
    auto iv0 = domain.row_interval({z[1]});
    if (!iv0 || z[0] < iv0->first || z[0] > iv0->second) return std::nullopt;
    int lo = z[0], hi = z[0];
    for (int i = 1; i <= length; ++i) {
        // steps that keep some x-path alive; staying put always does
        int candidates[3];
        int ncand = 0;
        for (int d = -1; d <= 1; ++d) {
            auto iv = domain.row_interval({seq.ys.back() + d});
            if (!iv) continue;
            if (std::max(lo - 1, iv->first) <= std::min(hi + 1, iv->second))
                candidates[ncand++] = d;
        }
        if (ncand == 0) return std::nullopt;
        int d = candidates[rng.next_below(ncand)];
        auto iv = domain.row_interval({seq.ys.back() + d});
        seq.ys.push_back(seq.ys.back() + d);
        lo = std::max(lo - 1, iv->first);
        hi = std::min(hi + 1, iv->second);
    }
    return seq;
}

std::optional<AdmissibleSequence> make_admissible_sequence(CounterRng rng,
                                                           const LatticeDomain& domain,
                                                           const Point& z, int length) {
    auto seq = sample_admissible_steps(rng, domain, z, length);
    if (seq && !seq->admissible_in(domain)) return std::nullopt;
    return seq;
}

ConjectureRecord explore_conjecture_instance(const PropositionInstance& inst,
                                             double series_tolerance) {
    ConjectureRecord rec;
    rec.instance = inst.id;

    PointSet inner_half = inst.domain.half();
    PointSet outer = inst.rect.point_set();
    PointSet outer_half = inst.rect.half_point_set();

    rec.e_inner_half = expected_exit_time(inst.z, inner_half);
    rec.e_inner = expected_exit_time(inst.z, inst.domain.points());
    rec.e_outer_half = expected_exit_time(inst.z, outer_half);
    rec.e_outer = expected_exit_time(inst.z, outer);

    rec.left = rec.e_inner_half / rec.e_outer_half;
    rec.right = rec.e_inner / rec.e_outer;
    rec.margin = rec.right - rec.left;
    rec.holds = rec.margin >= 0;

    // cross-check each solve against a truncated survival sum
    rec.series_check_ok = true;
    rec.series_deviation = 0.0;
    auto check = [&](const PointSet& set, const Rat& solved) {
        const int k = set.dim();
        // L-block geometric tail bound, double precision
        const auto nbr = set.neighbor_indices();
        double inv3k = 1.0;
        for (int i = 0; i < k; ++i) inv3k /= 3.0;
        std::size_t idx = set.index_of(inst.z);
        std::vector<double> mass(set.size(), 0.0), scratch(set.size(), 0.0);
        mass[idx] = 1.0;
        // distance-to-exterior bound
        int L = 1;
        {
            const std::size_t full = king_offsets(k).size();
            std::vector<int> dist(set.size(), -1);
            std::vector<std::size_t> queue;
            for (std::size_t i = 0; i < set.size(); ++i)
                if (nbr[i].size() < full) {
                    dist[i] = 1;
                    queue.push_back(i);
                }
            for (std::size_t qi = 0; qi < queue.size(); ++qi) {
                std::size_t v = queue[qi];
                for (std::uint32_t w : nbr[v])
                    if (dist[w] < 0) {
                        dist[w] = dist[v] + 1;
                        L = std::max(L, dist[w]);
                        queue.push_back(w);
                    }
            }
        }
        double tail_factor = static_cast<double>(L);
        for (int i = 0; i < k * L; ++i) tail_factor *= 3.0;

        double acc = 0.0, s = 1.0;
        for (int step = 0; step < 1000000; ++step) {
            acc += s;
            if (s * tail_factor < series_tolerance * 0.5) break;
            for (std::size_t i = 0; i < set.size(); ++i) {
                double a = 0.0;
                for (std::uint32_t j : nbr[i]) a += mass[j];
                scratch[i] = a * inv3k;
            }
            mass.swap(scratch);
            s = 0.0;
            for (double v : mass) s += v;
        }
        double dev = std::abs(to_double(solved) - acc);
        rec.series_deviation = std::max(rec.series_deviation, dev);
        if (dev > series_tolerance) rec.series_check_ok = false;
    };
    check(inner_half, rec.e_inner_half);
    check(inst.domain.points(), rec.e_inner);
    check(outer_half, rec.e_outer_half);
    check(outer, rec.e_outer);
    return rec;
}

bool lemma_aggregation_matches(const LatticeDomain& domain, const LatticeRect& rect,
                               const Point& z, int m, int n) {
    if (domain.dim() != 2)
        throw std::invalid_argument("lemma_aggregation_matches: 2-D machinery");
    check_proposition_inputs(domain, rect, z, m, n);
    const int l = std::max(m, n);

    Rat sum_joint_half(0), sum_joint_full(0), sum_cond_half(0), sum_cond_full(0);
    const Rat weight = inv_pow3(static_cast<unsigned long>(l));

    std::vector<int> ys(l + 1);
    ys[0] = z[1];
    std::function<void(int)> dfs = [&](int depth) {
        if (depth == l) {
            LemmaQuantities q = lemma_quantities(domain, rect, z[0], ys, m, n);
            sum_joint_half += q.joint_half * weight;
            sum_joint_full += q.joint_full * weight;
            sum_cond_half += q.cond_half * weight;
            sum_cond_full += q.cond_full * weight;
            return;
        }
        for (int d = -1; d <= 1; ++d) {
            ys[depth + 1] = ys[depth] + d;
            dfs(depth + 1);
        }
    };
    dfs(0);

    PointSet inner_half = domain.half();
    PointSet outer_half = rect.half_point_set();
    PointSet outer = rect.point_set();
    return sum_joint_half == joint_survival(z, inner_half, outer_half, m, n) &&
           sum_joint_full == joint_survival(z, domain.points(), outer, m, n) &&
           sum_cond_half == survival(z, outer_half, n).values[n] &&
           sum_cond_full == survival(z, outer, n).values[n];
}

}  // namespace exitwalk
