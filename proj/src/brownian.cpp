#include "exitwalk/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "exitwalk/errors.hpp"
#include "exitwalk/exact.hpp"
#include "exitwalk/parallel.hpp"

namespace exitwalk {

double RowProfile::width_at(double y) const {
    const auto& bp = breakpoints;
    if (y <= bp.front().first) return bp.front().second;
    if (y >= bp.back().first) return bp.back().second;
    for (std::size_t i = 1; i < bp.size(); ++i) {
        if (y <= bp[i].first) {
            double y0 = bp[i - 1].first, y1 = bp[i].first;
            double w0 = bp[i - 1].second, w1 = bp[i].second;
            if (y1 == y0) return w1;
            return w0 + (w1 - w0) * (y - y0) / (y1 - y0);
        }
    }
    return bp.back().second;
}

bool RowProfile::inside(double x, double y) const {
    if (y <= y_lo() || y >= y_hi()) return false;
    return std::abs(x) < width_at(y);
}

double RowProfile::max_width() const {
    double w = 0.0;
    for (const auto& [y, wy] : breakpoints) w = std::max(w, wy);
    return w;
}

RowProfile RowProfile::load(std::istream& in, const std::string& name) {
    RowProfile p;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = line;
        t.erase(0, t.find_first_not_of(" \t"));
        if (t.empty() || t[0] == '#') continue;
        std::istringstream iss(t);
        double y, w;
        if (!(iss >> y >> w))
            throw ParseError(name + ":" + std::to_string(lineno) + ": expected 'y w' pair");
        p.breakpoints.push_back({y, w});
    }
    if (p.breakpoints.size() < 2)
        throw ParseError(name + ": profile needs at least two breakpoints");
    for (std::size_t i = 1; i < p.breakpoints.size(); ++i)
        if (p.breakpoints[i].first <= p.breakpoints[i - 1].first)
            throw ParseError(name + ": breakpoints must have strictly increasing y");
    for (const auto& [y, w] : p.breakpoints)
        if (w <= 0) throw ParseError(name + ": widths must be positive");
    return p;
}

RowProfile RowProfile::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open geometry file: " + path);
    return load(in, path);
}

void RowProfile::save(std::ostream& out) const {
    for (const auto& [y, w] : breakpoints) out << y << " " << w << "\n";
}

ContinuousDomain ContinuousDomain::make_profile(RowProfile p) {
    ContinuousDomain d;
    d.kind_ = Kind::Profile;
    d.profile_ = std::move(p);
    return d;
}

ContinuousDomain ContinuousDomain::make_rectangle(Rect2 r) {
    ContinuousDomain d;
    d.kind_ = Kind::Rectangle;
    d.rect_ = r;
    return d;
}

ContinuousDomain ContinuousDomain::make_slit(double gap) {
    if (!(gap > 0.0 && gap < 0.5))
        throw std::invalid_argument("slit domain requires 0 < d < 1/2");
    ContinuousDomain d;
    d.kind_ = Kind::Slit;
    d.rect_ = Rect2{1.0, -1.0, 1.0};
    d.slit_d_ = gap;
    return d;
}

bool ContinuousDomain::contains(double x, double y) const {
    switch (kind_) {
        case Kind::Profile: return profile_.inside(x, y);
        case Kind::Rectangle: return rect_.inside(x, y);
        case Kind::Slit: return rect_.inside(x, y);
    }
    return false;
}

namespace {

// Crossing the slit line between samples: linear y at the x sign change,
// exit iff |y_cross| >= d/2.
inline bool slit_crossing_exits(double x0, double y0, double x1, double y1, double half_gap) {
    if ((x0 > 0.0) == (x1 > 0.0)) return false;
    double y_cross = y0 + (y1 - y0) * (0.0 - x0) / (x1 - x0);
    return std::abs(y_cross) >= half_gap;
}

struct PathEvents {
    // first sample index (1-based) at which each exit fired; 0 = never
    int exit_u = 0, exit_r = 0, exit_u_half = 0, exit_r_half = 0;
};

// Bridge crossing probability for one rectangle between consecutive
// samples; exact per coordinate, sides and coordinates combined as
// independent (double crossings within one dt are negligible).
inline double rect_bridge_cross_prob(const Rect2& r, double x0, double y0, double x1, double y1,
                                     double dt) {
    auto side = [&](double d0, double d1) {
        if (d0 <= 0.0 || d1 <= 0.0) return 1.0;  // endpoint outside: certain crossing
        return std::exp(-2.0 * d0 * d1 / dt);
    };
    double px = 1.0 - (1.0 - side(r.half_width - x0, r.half_width - x1)) *
                          (1.0 - side(x0 + r.half_width, x1 + r.half_width));
    double py = 1.0 - (1.0 - side(r.y_hi - y0, r.y_hi - y1)) *
                          (1.0 - side(y0 - r.y_lo, y1 - r.y_lo));
    return 1.0 - (1.0 - px) * (1.0 - py);
}

PathEvents run_path(double zx, double zy, const ContinuousDomain& U, const ContinuousDomain& R,
                    int total_steps, double dt, CounterRng& rng, bool bridge) {
    PathEvents ev;
    double x = zx, y = zy;
    const double sqrt_dt = std::sqrt(dt);
    const bool slit = U.kind() == ContinuousDomain::Kind::Slit;
    const double half_gap = slit ? U.slit_gap() / 2.0 : 0.0;
    const bool bridge_u = bridge && U.kind() == ContinuousDomain::Kind::Rectangle;
    const bool bridge_r = bridge && R.kind() == ContinuousDomain::Kind::Rectangle;
    for (int j = 1; j <= total_steps; ++j) {
        auto [gx, gy] = rng.next_gaussian_pair();
        double nx = x + sqrt_dt * gx;
        double ny = y + sqrt_dt * gy;
        bool out_r = !R.contains(nx, ny);
        bool out_u = !U.contains(nx, ny);
        if (!out_u && slit) out_u = slit_crossing_exits(x, y, nx, ny, half_gap);
        if (bridge_u || bridge_r) {
            double u = rng.next_unit();
            if (bridge_r && !out_r)
                out_r = u < rect_bridge_cross_prob(R.rect(), x, y, nx, ny, dt);
            if (bridge_u && !out_u)
                out_u = u < rect_bridge_cross_prob(U.rect(), x, y, nx, ny, dt);
        }
        bool nonpos = nx <= 0.0;
        if (ev.exit_r == 0 && out_r) ev.exit_r = j;
        if (ev.exit_u == 0 && out_u) ev.exit_u = j;
        if (ev.exit_r_half == 0 && (out_r || nonpos)) ev.exit_r_half = j;
        if (ev.exit_u_half == 0 && (out_u || nonpos)) ev.exit_u_half = j;
        x = nx;
        y = ny;
        if (ev.exit_r != 0) break;  // U is inside R: every event has fired by now
    }
    return ev;
}

McEstimate make_ratio_estimate(std::uint64_t joint, std::uint64_t denom, std::uint64_t paths,
                               double dt, std::uint64_t seed) {
    McEstimate e;
    e.dt = dt;
    e.seed = seed;
    e.count = denom;
    if (denom == 0) {
        e.estimate = std::numeric_limits<double>::quiet_NaN();
        e.stderr_value = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    const double n = static_cast<double>(paths);
    const double pn = static_cast<double>(joint) / n;
    const double pd = static_cast<double>(denom) / n;
    const double ratio = pn / pd;
    // delta method for a ratio of correlated means; with indicator data
    // this reduces to sqrt(r(1-r)/denom_hits)
    const double var_n = pn * (1.0 - pn);
    const double var_d = pd * (1.0 - pd);
    const double cov = pn * (1.0 - pd);
    double v = (var_n - 2.0 * ratio * cov + ratio * ratio * var_d) / (n * pd * pd);
    e.estimate = ratio;
    e.stderr_value = std::sqrt(std::max(0.0, v));
    return e;
}

}  // namespace

bool simulate_exit_survives(double zx, double zy, const ContinuousDomain& domain, double s,
                            double dt, CounterRng rng, bool bridge) {
    if (!domain.contains(zx, zy))
        throw std::invalid_argument("simulate_exit_survives: start point outside domain");
    if (dt <= 0) throw std::invalid_argument("simulate_exit_survives: dt must be positive");
    int steps = static_cast<int>(std::floor(s / dt + 1e-9));
    PathEvents ev = run_path(zx, zy, domain, domain, steps, dt, rng, bridge);
    return ev.exit_u == 0;
}

ConditionalMc conditional_estimate(double zx, double zy, const ContinuousDomain& U,
                                   const ContinuousDomain& R, double s, double t, double dt,
                                   std::uint64_t count, std::uint64_t seed, int threads,
                                   bool bridge) {
    if (!U.contains(zx, zy) || zx <= 0.0)
        throw std::invalid_argument("conditional_estimate: z must lie in U+");
    if (dt <= 0 || s < 0 || t < 0) throw std::invalid_argument("conditional_estimate: bad run");
    if (R.kind() == ContinuousDomain::Kind::Rectangle) {
        const Rect2& r = R.rect();
        if (U.kind() == ContinuousDomain::Kind::Profile) {
            const RowProfile& p = U.profile();
            if (p.max_width() > r.half_width || p.y_lo() < r.y_lo || p.y_hi() > r.y_hi)
                throw std::invalid_argument("conditional_estimate: U not contained in R");
        } else if (U.kind() == ContinuousDomain::Kind::Slit) {
            const Rect2& u = U.rect();
            if (u.half_width > r.half_width || u.y_lo < r.y_lo || u.y_hi > r.y_hi)
                throw std::invalid_argument("conditional_estimate: U not contained in R");
        }
    }

    const int js = static_cast<int>(std::floor(s / dt + 1e-9));
    const int jt = static_cast<int>(std::floor(t / dt + 1e-9));
    const int total = std::max(js, jt);

    struct Tally {
        std::uint64_t joint_half = 0, denom_half = 0;
        std::uint64_t joint_full = 0, denom_full = 0;
    };
    const std::uint64_t chunk = 4096;
    const std::uint64_t nchunks = (count + chunk - 1) / chunk;
    std::vector<Tally> tallies(nchunks);
    CounterRng base = CounterRng(seed).derive("mc-paths");

    parallel_for(nchunks, threads, [&](std::size_t ci) {
        Tally tl;
        std::uint64_t begin = ci * chunk, end = std::min(count, begin + chunk);
        for (std::uint64_t p = begin; p < end; ++p) {
            CounterRng rng = base.derive(p);
            PathEvents ev = run_path(zx, zy, U, R, total, dt, rng, bridge);
            bool u_s = ev.exit_u == 0 || ev.exit_u > js;
            bool r_t = ev.exit_r == 0 || ev.exit_r > jt;
            bool uh_s = ev.exit_u_half == 0 || ev.exit_u_half > js;
            bool rh_t = ev.exit_r_half == 0 || ev.exit_r_half > jt;
            if (rh_t) {
                ++tl.denom_half;
                if (uh_s) ++tl.joint_half;
            }
            if (r_t) {
                ++tl.denom_full;
                if (u_s) ++tl.joint_full;
            }
        }
        tallies[ci] = tl;
    });

    Tally sum;
    for (const Tally& tl : tallies) {
        sum.joint_half += tl.joint_half;
        sum.denom_half += tl.denom_half;
        sum.joint_full += tl.joint_full;
        sum.denom_full += tl.denom_full;
    }

    ConditionalMc out;
    out.paths = count;
    out.denom_hits_half = sum.denom_half;
    out.denom_hits_full = sum.denom_full;
    out.left = make_ratio_estimate(sum.joint_half, sum.denom_half, count, dt, seed);
    out.right = make_ratio_estimate(sum.joint_full, sum.denom_full, count, dt, seed);
    out.denom_rate_full = static_cast<double>(sum.denom_full) / static_cast<double>(count);
    out.denom_rate_full_se =
        std::sqrt(out.denom_rate_full * (1.0 - out.denom_rate_full) /
                  static_cast<double>(count));
    return out;
}

std::vector<CounterexampleRow> counterexample_curve(std::vector<double> d_values, double dt,
                                                    std::uint64_t count, std::uint64_t seed,
                                                    int threads) {
    std::sort(d_values.begin(), d_values.end());
    std::vector<CounterexampleRow> rows;
    for (double d : d_values) {
        ContinuousDomain U = ContinuousDomain::make_slit(d);
        ContinuousDomain R = ContinuousDomain::make_rectangle(Rect2{1.0, -1.0, 1.0});
        ConditionalMc mc = conditional_estimate(d, 0.5, U, R, 1.0, 1.0, dt, count,
                                                seed ^ fnv1a64("counterexample"), threads);
        CounterexampleRow row;
        row.d = d;
        row.right = mc.right;
        row.denom_hits = mc.denom_hits_full;
        row.denom_rate = mc.denom_rate_full;
        row.denom_rate_se = mc.denom_rate_full_se;
        rows.push_back(row);
    }
    return rows;
}

namespace {

// max i with i*delta strictly below bound
int max_strict(double bound, double delta) {
    int i = static_cast<int>(std::floor(bound / delta + 1e-12));
    while (i * delta >= bound) --i;
    return i;
}

}  // namespace

LatticeDomain discretize_profile(const RowProfile& U, double delta) {
    std::vector<Point> pts;
    int j_hi = max_strict(U.y_hi(), delta);
    int j_lo = -max_strict(-U.y_lo(), delta);
    for (int j = j_lo; j <= j_hi; ++j) {
        double w = U.width_at(j * delta);
        int imax = max_strict(w, delta);
        for (int i = -imax; i <= imax; ++i) pts.push_back({i, j});
    }
    if (pts.empty()) throw std::invalid_argument("discretize_profile: no lattice points");
    return LatticeDomain(PointSet(2, std::move(pts)));
}

LatticeRect discretize_rect(const Rect2& R, double delta) {
    int hw = max_strict(R.half_width, delta);
    int yhi = max_strict(R.y_hi, delta);
    int ylo = -max_strict(-R.y_lo, delta);
    return LatticeRect(std::max(1, hw), {{ylo, yhi}});
}

ScalingResult scaling_limit_check(const RowProfile& U, const Rect2& R, double zx, double zy,
                                  double s, double t, const std::vector<double>& scales,
                                  double dt, std::uint64_t count, std::uint64_t seed,
                                  int threads) {
    ScalingResult res;
    ConditionalMc mc = conditional_estimate(zx, zy, ContinuousDomain::make_profile(U),
                                            ContinuousDomain::make_rectangle(R), s, t, dt,
                                            count, seed, threads);
    res.mc_left = mc.left;
    res.mc_right = mc.right;

    for (double delta : scales) {
        LatticeDomain dom = discretize_profile(U, delta);
        LatticeRect rect = discretize_rect(R, delta);
        if (!rect.contains_domain(dom))
            throw std::logic_error("scaling_limit_check: discretized domain escapes rect");
        Point z{static_cast<Coord>(std::lround(zx / delta)),
                static_cast<Coord>(std::lround(zy / delta))};
        if (z[0] < 1) z[0] = 1;
        if (!dom.points().contains(z))
            throw std::invalid_argument("scaling_limit_check: start maps outside the lattice "
                                        "domain at delta=" + std::to_string(delta));
        int M = static_cast<int>(std::lround(3.0 * s / (2.0 * delta * delta)));
        int N = static_cast<int>(std::lround(3.0 * t / (2.0 * delta * delta)));

        ScalingRow row;
        row.delta = delta;
        row.steps_m = M;
        row.steps_n = N;
        row.lattice_points = dom.points().size();
        row.discrete_left = conditional_exit_prob_f(z, dom.half(), rect.half_point_set(), M, N);
        row.discrete_right =
            conditional_exit_prob_f(z, dom.points(), rect.point_set(), M, N);
        row.mc_left = mc.left.estimate;
        row.mc_right = mc.right.estimate;
        row.mc_left_se = mc.left.stderr_value;
        row.mc_right_se = mc.right.stderr_value;
        res.rows.push_back(row);
    }
    return res;
}

}  // namespace exitwalk
