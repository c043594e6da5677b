#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace exitwalk {

using Coord = int;
using Point = std::vector<Coord>;  // coords[0] is the distinguished first coordinate
using Tail = std::vector<Coord>;   // coords[1..k-1]

std::string point_str(const Point& p);

/// Immutable sorted set of lattice points of a common dimension.
/// Points are kept in lexicographic order, so iteration order (and
/// everything derived from it) is deterministic.
class PointSet {
public:
    PointSet() = default;
    PointSet(int dim, std::vector<Point> pts);

    int dim() const { return dim_; }
    std::size_t size() const { return pts_.size(); }
    bool empty() const { return pts_.empty(); }
    const std::vector<Point>& points() const { return pts_; }
    const Point& point(std::size_t i) const { return pts_[i]; }

    bool contains(const Point& p) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t index_of(const Point& p) const;

    bool is_subset_of(const PointSet& other) const;

    /// Indices of in-set points among the 3^k king-move neighbors of each
    /// point (offsets in {-1,0,1}^k, self included).
    std::vector<std::vector<std::uint32_t>> neighbor_indices() const;

private:
    int dim_ = 0;
    std::vector<Point> pts_;
};

/// All 3^k offsets in {-1,0,1}^k, self first.
const std::vector<Point>& king_offsets(int dim);

struct ValidationReport {
    bool symmetric = false;   // (x1,t) in D  <=>  (-x1,t) in D
    bool convex_x = false;    // per tail, admitted x1 values contiguous
    bool connected = false;   // king-move adjacency
    bool all_pass() const { return symmetric && convex_x && connected; }
    std::vector<std::string> failures;
};

class LatticeDomain {
public:
    explicit LatticeDomain(PointSet pts);

    int dim() const { return points_.dim(); }
    const PointSet& points() const { return points_; }

    const ValidationReport& validate() const;

    /// {p in D : p.x1 > 0}; may be empty.
    PointSet half() const;

    /// Max x1 in the row with the given tail; throws on empty row.
    Coord gamma(const Tail& tail) const;
    bool row_nonempty(const Tail& tail) const;
    /// [min x1, max x1] of the row, or nullopt when empty.
    std::optional<std::pair<Coord, Coord>> row_interval(const Tail& tail) const;

    /// Deterministic generator of domains satisfying all three domain
    /// hypotheses; see the domain-generation notes in the README.
    static LatticeDomain generate_random(std::uint64_t seed, int k, int max_extent);

    static LatticeDomain load(std::istream& in);
    void save(std::ostream& out) const;

private:
    PointSet points_;
    mutable std::optional<ValidationReport> cached_;
};

/// Axis-aligned box, symmetric in the first coordinate by construction:
/// |x1| <= half_width and lo_j <= x_j <= hi_j for j >= 2.
class LatticeRect {
public:
    LatticeRect(Coord half_width, std::vector<std::pair<Coord, Coord>> bounds);

    int dim() const { return 1 + static_cast<int>(bounds_.size()); }
    Coord half_width() const { return half_width_; }
    const std::vector<std::pair<Coord, Coord>>& bounds() const { return bounds_; }

    bool contains(const Point& p) const;
    bool contains_domain(const LatticeDomain& dom) const;
    bool tail_in_bounds(const Tail& tail) const;

    PointSet point_set() const;
    PointSet half_point_set() const;

    static LatticeRect parse_line(const std::string& line);
    std::string to_line() const;

private:
    Coord half_width_;
    std::vector<std::pair<Coord, Coord>> bounds_;
};

/// Bounding rect of a domain (smallest symmetric rect containing it).
LatticeRect bounding_rect(const LatticeDomain& dom);

struct DomainFile {
    LatticeDomain domain;
    std::optional<LatticeRect> rect;
};
DomainFile load_domain_file(std::istream& in, const std::string& name = "<domain>");
DomainFile load_domain_file(const std::string& path);

}  // namespace exitwalk
