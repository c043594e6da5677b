#include "exitwalk/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "exitwalk/errors.hpp"
#include "exitwalk/rng.hpp"

namespace exitwalk {

std::string point_str(const Point& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p[i]);
    }
    return s + ")";
}

PointSet::PointSet(int dim, std::vector<Point> pts) : dim_(dim), pts_(std::move(pts)) {
    if (dim_ < 1) throw std::invalid_argument("PointSet: dimension must be >= 1");
    for (const Point& p : pts_) {
        if (static_cast<int>(p.size()) != dim_)
            throw std::invalid_argument("PointSet: point dimension mismatch");
    }
    std::sort(pts_.begin(), pts_.end());
    pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

bool PointSet::contains(const Point& p) const {
    return std::binary_search(pts_.begin(), pts_.end(), p);
}

std::size_t PointSet::index_of(const Point& p) const {
    auto it = std::lower_bound(pts_.begin(), pts_.end(), p);
    if (it == pts_.end() || *it != p) return npos;
    return static_cast<std::size_t>(it - pts_.begin());
}

bool PointSet::is_subset_of(const PointSet& other) const {
    if (dim_ != other.dim_) return false;
    return std::all_of(pts_.begin(), pts_.end(),
                       [&](const Point& p) { return other.contains(p); });
}

const std::vector<Point>& king_offsets(int dim) {
    static std::map<int, std::vector<Point>> cache;
    auto it = cache.find(dim);
    if (it != cache.end()) return it->second;
    std::vector<Point> offs;
    Point cur(dim, 0);
    // self-first ordering: generate in odometer order then rotate zero to front
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (int i = 0; i < dim; ++i) {
            cur[i] = static_cast<Coord>(c % 3) - 1;
            c /= 3;
        }
        offs.push_back(cur);
    }
    auto zero = std::find(offs.begin(), offs.end(), Point(dim, 0));
    std::iter_swap(offs.begin(), zero);
    return cache.emplace(dim, std::move(offs)).first->second;
}

std::vector<std::vector<std::uint32_t>> PointSet::neighbor_indices() const {
    const auto& offs = king_offsets(dim_);
    std::vector<std::vector<std::uint32_t>> nbr(pts_.size());
    Point q(dim_);
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        nbr[i].reserve(offs.size());
        for (const Point& d : offs) {
            for (int j = 0; j < dim_; ++j) q[j] = pts_[i][j] + d[j];
            std::size_t idx = index_of(q);
            if (idx != npos) nbr[i].push_back(static_cast<std::uint32_t>(idx));
        }
    }
    return nbr;
}

LatticeDomain::LatticeDomain(PointSet pts) : points_(std::move(pts)) {
    if (points_.empty()) throw std::invalid_argument("LatticeDomain: empty point set");
}

namespace {

Tail tail_of(const Point& p) { return Tail(p.begin() + 1, p.end()); }

// tail -> sorted x1 values
std::map<Tail, std::vector<Coord>> rows_of(const PointSet& ps) {
    std::map<Tail, std::vector<Coord>> rows;
    for (const Point& p : ps.points()) rows[tail_of(p)].push_back(p[0]);
    return rows;  // x1 values inherit the set's sort order within a tail
}

}  // namespace

const ValidationReport& LatticeDomain::validate() const {
    if (cached_) return *cached_;
    ValidationReport rep;

    rep.symmetric = true;
    for (const Point& p : points_.points()) {
        Point q = p;
        q[0] = -q[0];
        if (!points_.contains(q)) {
            rep.symmetric = false;
            rep.failures.push_back("symmetry: missing mirror of " + point_str(p));
            break;
        }
    }

    rep.convex_x = true;
    for (const auto& [tail, xs] : rows_of(points_)) {
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (xs[i] != xs[i - 1] + 1) {
                rep.convex_x = false;
                rep.failures.push_back("convexity: gap in row tail=" + point_str(tail));
                break;
            }
        }
        if (!rep.convex_x) break;
    }

    // BFS under king-move adjacency
    const auto nbr = points_.neighbor_indices();
    std::vector<char> seen(points_.size(), 0);
    std::deque<std::size_t> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::uint32_t w : nbr[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                queue.push_back(w);
            }
        }
    }
    rep.connected = reached == points_.size();
    if (!rep.connected) rep.failures.push_back("connectivity: domain splits into king-move components");

    cached_ = std::move(rep);
    return *cached_;
}

PointSet LatticeDomain::half() const {
    std::vector<Point> pos;
    for (const Point& p : points_.points())
        if (p[0] > 0) pos.push_back(p);
    return PointSet(dim(), std::move(pos));
}

bool LatticeDomain::row_nonempty(const Tail& tail) const {
    return row_interval(tail).has_value();
}

std::optional<std::pair<Coord, Coord>> LatticeDomain::row_interval(const Tail& tail) const {
    std::optional<std::pair<Coord, Coord>> iv;
    for (const Point& p : points_.points()) {
        if (std::equal(p.begin() + 1, p.end(), tail.begin(), tail.end())) {
            if (!iv)
                iv = {p[0], p[0]};
            else {
                iv->first = std::min(iv->first, p[0]);
                iv->second = std::max(iv->second, p[0]);
            }
        }
    }
    return iv;
}

Coord LatticeDomain::gamma(const Tail& tail) const {
    auto iv = row_interval(tail);
    if (!iv) throw std::invalid_argument("gamma: row " + point_str(tail) + " is empty");
    return iv->second;
}

LatticeDomain LatticeDomain::generate_random(std::uint64_t seed, int k, int max_extent) {
    if (k < 1) throw std::invalid_argument("generate_random: k must be >= 1");
    if (max_extent < 1) throw std::invalid_argument("generate_random: max_extent must be >= 1");
    CounterRng rng = CounterRng(seed).derive("domain-gen");

    if (k == 1) {
        Coord g = rng.next_int(0, max_extent);
        std::vector<Point> pts;
        for (Coord x = -g; x <= g; ++x) pts.push_back({x});
        return LatticeDomain(PointSet(1, std::move(pts)));
    }

    // Tail box, then a symmetric interval [-g, g] per present tail.
    int tail_extent = std::max(1, max_extent / 2);
    std::vector<std::pair<Coord, Coord>> tbounds;
    for (int j = 1; j < k; ++j) {
        Coord lo = -rng.next_int(0, tail_extent);
        Coord hi = rng.next_int(0, tail_extent);
        tbounds.push_back({lo, hi});
    }

    std::vector<Tail> tails;
    Tail cur(k - 1);
    std::function<void(int)> enumerate = [&](int j) {
        if (j == k - 1) {
            tails.push_back(cur);
            return;
        }
        for (Coord v = tbounds[j].first; v <= tbounds[j].second; ++v) {
            cur[j] = v;
            enumerate(j + 1);
        }
    };
    enumerate(0);

    std::map<Tail, Coord> width;  // present tails only
    for (const Tail& t : tails) {
        bool present = rng.next_int(0, 3) > 0;  // keep ~3/4
        Coord g = rng.next_int(0, max_extent);
        if (present) width[t] = g;
    }
    if (width.empty()) width[tails.front()] = rng.next_int(1, max_extent);

    // Repair connectivity: keep the tail component of the widest slab.
    // Every row contains x1 = 0, so tail-adjacency is domain adjacency.
    Tail widest = width.begin()->first;
    for (const auto& [t, g] : width)
        if (g > width[widest]) widest = t;

    auto tails_adjacent = [](const Tail& a, const Tail& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > 1) return false;
        return true;
    };
    std::map<Tail, char> kept;
    std::deque<Tail> queue{widest};
    kept[widest] = 1;
    while (!queue.empty()) {
        Tail t = queue.front();
        queue.pop_front();
        for (const auto& [u, g] : width) {
            (void)g;
            if (!kept.count(u) && tails_adjacent(t, u)) {
                kept[u] = 1;
                queue.push_back(u);
            }
        }
    }

    std::vector<Point> pts;
    for (const auto& [t, flag] : kept) {
        (void)flag;
        Coord g = width[t];
        Point p(k);
        std::copy(t.begin(), t.end(), p.begin() + 1);
        for (Coord x = -g; x <= g; ++x) {
            p[0] = x;
            pts.push_back(p);
        }
    }
    return LatticeDomain(PointSet(k, std::move(pts)));
}

LatticeRect::LatticeRect(Coord half_width, std::vector<std::pair<Coord, Coord>> bounds)
    : half_width_(half_width), bounds_(std::move(bounds)) {
    if (half_width_ < 1) throw std::invalid_argument("LatticeRect: half_width must be positive");
    for (const auto& [lo, hi] : bounds_)
        if (lo > hi) throw std::invalid_argument("LatticeRect: lo > hi");
}

bool LatticeRect::contains(const Point& p) const {
    if (static_cast<int>(p.size()) != dim())
        throw std::invalid_argument("LatticeRect::contains: dimension mismatch");
    if (std::abs(p[0]) > half_width_) return false;
    for (std::size_t j = 0; j < bounds_.size(); ++j)
        if (p[j + 1] < bounds_[j].first || p[j + 1] > bounds_[j].second) return false;
    return true;
}

bool LatticeRect::contains_domain(const LatticeDomain& dom) const {
    if (dom.dim() != dim())
        throw std::invalid_argument("contains_rect: dimension mismatch");
    return std::all_of(dom.points().points().begin(), dom.points().points().end(),
                       [&](const Point& p) { return contains(p); });
}

bool LatticeRect::tail_in_bounds(const Tail& tail) const {
    if (static_cast<int>(tail.size()) != dim() - 1)
        throw std::invalid_argument("tail_in_bounds: dimension mismatch");
    for (std::size_t j = 0; j < bounds_.size(); ++j)
        if (tail[j] < bounds_[j].first || tail[j] > bounds_[j].second) return false;
    return true;
}

PointSet LatticeRect::point_set() const {
    std::vector<Point> pts;
    Point p(dim());
    std::function<void(int)> rec = [&](int j) {
        if (j == dim()) {
            pts.push_back(p);
            return;
        }
        Coord lo = j == 0 ? -half_width_ : bounds_[j - 1].first;
        Coord hi = j == 0 ? half_width_ : bounds_[j - 1].second;
        for (Coord v = lo; v <= hi; ++v) {
            p[j] = v;
            rec(j + 1);
        }
    };
    rec(0);
    return PointSet(dim(), std::move(pts));
}

PointSet LatticeRect::half_point_set() const {
    PointSet full = point_set();
    std::vector<Point> pts;
    for (const Point& p : full.points())
        if (p[0] > 0) pts.push_back(p);
    return PointSet(dim(), std::move(pts));
}

LatticeRect LatticeRect::parse_line(const std::string& line) {
    std::istringstream iss(line);
    std::string tag;
    iss >> tag;
    if (tag != "rect") throw ParseError("rect line must start with 'rect': " + line);
    Coord hw;
    if (!(iss >> hw)) throw ParseError("rect line missing half width: " + line);
    std::vector<std::pair<Coord, Coord>> bounds;
    Coord lo, hi;
    while (iss >> lo) {
        if (!(iss >> hi)) throw ParseError("rect line has dangling bound: " + line);
        bounds.push_back({lo, hi});
    }
    return LatticeRect(hw, std::move(bounds));
}

std::string LatticeRect::to_line() const {
    std::string s = "rect " + std::to_string(half_width_);
    for (const auto& [lo, hi] : bounds_)
        s += " " + std::to_string(lo) + " " + std::to_string(hi);
    return s;
}

LatticeRect bounding_rect(const LatticeDomain& dom) {
    Coord hw = 1;
    std::vector<std::pair<Coord, Coord>> bounds(dom.dim() - 1,
                                                {std::numeric_limits<Coord>::max(),
                                                 std::numeric_limits<Coord>::min()});
    for (const Point& p : dom.points().points()) {
        hw = std::max(hw, std::abs(p[0]));
        for (int j = 1; j < dom.dim(); ++j) {
            bounds[j - 1].first = std::min(bounds[j - 1].first, p[j]);
            bounds[j - 1].second = std::max(bounds[j - 1].second, p[j]);
        }
    }
    return LatticeRect(hw, std::move(bounds));
}

void LatticeDomain::save(std::ostream& out) const {
    out << "dim " << dim() << "\n";
    for (const auto& [tail, xs] : rows_of(points_)) {
        out << "tail";
        for (Coord c : tail) out << " " << c;
        out << " : " << xs.front() << " " << xs.back() << "\n";
    }
}

LatticeDomain LatticeDomain::load(std::istream& in) {
    return load_domain_file(in).domain;
}

DomainFile load_domain_file(std::istream& in, const std::string& name) {
    std::string line;
    int lineno = 0;
    int dim = -1;
    std::vector<Point> pts;
    std::optional<LatticeRect> rect;

    auto fail = [&](const std::string& msg) {
        throw ParseError(name + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        std::istringstream iss(trimmed);
        std::string tag;
        iss >> tag;
        if (tag == "dim") {
            if (!(iss >> dim) || dim < 1) fail("invalid dimension");
        } else if (tag == "tail") {
            if (dim < 1) fail("'tail' before 'dim'");
            Tail tail;
            std::string tok;
            while (iss >> tok && tok != ":") {
                try {
                    tail.push_back(std::stoi(tok));
                } catch (const std::exception&) {
                    fail("bad tail coordinate '" + tok + "'");
                }
            }
            if (tok != ":") fail("tail line missing ':'");
            if (static_cast<int>(tail.size()) != dim - 1)
                fail("tail has " + std::to_string(tail.size()) + " coords, expected " +
                     std::to_string(dim - 1));
            Coord xmin, xmax;
            if (!(iss >> xmin >> xmax)) fail("tail line missing x-interval");
            if (xmin > xmax) fail("tail interval empty (xmin > xmax)");
            Point p(dim);
            std::copy(tail.begin(), tail.end(), p.begin() + 1);
            for (Coord x = xmin; x <= xmax; ++x) {
                p[0] = x;
                pts.push_back(p);
            }
        } else if (tag == "rect") {
            try {
                rect = LatticeRect::parse_line(trimmed);
            } catch (const ParseError& e) {
                fail(e.what());
            }
            if (rect->dim() != dim) fail("rect dimension mismatch");
        } else {
            fail("unknown directive '" + tag + "'");
        }
    }
    if (dim < 1) throw ParseError(name + ": missing 'dim' header");
    if (pts.empty()) throw ParseError(name + ": domain has no points");
    return DomainFile{LatticeDomain(PointSet(dim, std::move(pts))), std::move(rect)};
}

DomainFile load_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open domain file: " + path);
    return load_domain_file(in, path);
}

}  // namespace exitwalk
