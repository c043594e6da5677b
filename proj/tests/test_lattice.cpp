#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "exitwalk/errors.hpp"
#include "exitwalk/lattice.hpp"

using namespace exitwalk;

namespace {

LatticeDomain block(Coord x_half, Coord y_lo, Coord y_hi) {
    std::vector<Point> pts;
    for (Coord x = -x_half; x <= x_half; ++x)
        for (Coord y = y_lo; y <= y_hi; ++y) pts.push_back({x, y});
    return LatticeDomain(PointSet(2, std::move(pts)));
}

}  // namespace

TEST_CASE("validate: full 3x3 block passes everything") {
    LatticeDomain d = block(1, -1, 1);
    const auto& rep = d.validate();
    CHECK(rep.symmetric);
    CHECK(rep.convex_x);
    CHECK(rep.connected);
    CHECK(rep.all_pass());
}

TEST_CASE("validate: {(-1,0),(1,0)} is symmetric but neither convex nor connected") {
    LatticeDomain d(PointSet(2, {{-1, 0}, {1, 0}}));
    const auto& rep = d.validate();
    CHECK(rep.symmetric);
    CHECK_FALSE(rep.convex_x);
    CHECK_FALSE(rep.connected);
}

TEST_CASE("validate: {(0,0),(0,2)} fails connectivity under king moves") {
    LatticeDomain d(PointSet(2, {{0, 0}, {0, 2}}));
    const auto& rep = d.validate();
    CHECK(rep.symmetric);
    CHECK(rep.convex_x);
    CHECK_FALSE(rep.connected);
}

TEST_CASE("half: definition cases") {
    CHECK(block(1, 0, 0).half().points() == std::vector<Point>{{1, 0}});
    CHECK(LatticeDomain(PointSet(2, {{0, 0}, {0, 1}})).half().empty());
    PointSet h = block(2, 0, 2).half();
    CHECK(h.size() == 6);
    for (const Point& p : h.points()) {
        CHECK(p[0] > 0);
        CHECK(p[0] <= 2);
    }
}

TEST_CASE("half is a subset with empty nonpositive part") {
    LatticeDomain d = LatticeDomain::generate_random(99, 2, 4);
    PointSet h = d.half();
    CHECK(h.is_subset_of(d.points()));
    for (const Point& p : h.points()) CHECK(p[0] > 0);
    if (!h.empty()) {
        LatticeDomain hd{h};
        CHECK_FALSE(hd.validate().symmetric);
    }
}

TEST_CASE("contains_rect examples") {
    LatticeRect r1(2, {{-1, 1}});
    CHECK(r1.contains_domain(block(1, 0, 0)));
    LatticeRect r2(1, {{0, 0}});
    CHECK_FALSE(r2.contains_domain(block(2, 0, 0)));
    LatticeDomain d = block(2, -1, 1);
    CHECK(bounding_rect(d).contains_domain(d));
    CHECK_THROWS_AS(r1.contains_domain(LatticeDomain(PointSet(3, {{0, 0, 0}}))),
                    std::invalid_argument);
}

TEST_CASE("generated domains always validate") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        LatticeDomain d = LatticeDomain::generate_random(seed, 2, 4);
        CAPTURE(seed);
        REQUIRE(d.validate().all_pass());
    }
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        LatticeDomain d3 = LatticeDomain::generate_random(seed, 3, 3);
        CAPTURE(seed);
        REQUIRE(d3.validate().all_pass());
        LatticeDomain d1 = LatticeDomain::generate_random(seed, 1, 5);
        REQUIRE(d1.validate().all_pass());
    }
}

TEST_CASE("generation is deterministic per seed") {
    LatticeDomain a = LatticeDomain::generate_random(1, 2, 4);
    LatticeDomain b = LatticeDomain::generate_random(1, 2, 4);
    CHECK(a.points().points() == b.points().points());
    LatticeDomain c = LatticeDomain::generate_random(2, 3, 3);
    CHECK(c.dim() == 3);
    CHECK(c.validate().all_pass());
}

TEST_CASE("gamma and row intervals") {
    LatticeDomain d = block(2, 0, 0);
    CHECK(d.gamma({0}) == 2);
    CHECK_THROWS_AS(d.gamma({5}), std::invalid_argument);
    LatticeDomain narrow(PointSet(2, {{-1, 0}, {0, 0}, {1, 0}}));
    CHECK(narrow.gamma({0}) == 1);
    LatticeRect r(3, {{0, 0}});
    CHECK(LatticeDomain(r.point_set()).gamma({0}) == 3);
}

TEST_CASE("domain file round trip") {
    LatticeDomain d = LatticeDomain::generate_random(7, 2, 4);
    std::stringstream ss;
    d.save(ss);
    ss << "rect 9 -4 4\n";
    DomainFile df = load_domain_file(ss, "roundtrip");
    CHECK(df.domain.points().points() == d.points().points());
    REQUIRE(df.rect.has_value());
    CHECK(df.rect->half_width() == 9);
}

TEST_CASE("domain file parse errors carry line numbers") {
    {
        std::stringstream ss("dim 2\ntail 0 0 -1 1\n");  // missing ':'
        CHECK_THROWS_AS(load_domain_file(ss, "bad"), ParseError);
    }
    {
        std::stringstream ss("tail 0 : -1 1\n");  // tail before dim
        CHECK_THROWS_AS(load_domain_file(ss, "bad"), ParseError);
    }
    {
        std::stringstream ss("dim 2\n");  // no points
        CHECK_THROWS_AS(load_domain_file(ss, "bad"), ParseError);
    }
    {
        std::stringstream ss("dim 2\ntail 0 : 1 -1\n");  // empty interval
        CHECK_THROWS_AS(load_domain_file(ss, "bad"), ParseError);
    }
}

TEST_CASE("rect line parsing") {
    LatticeRect r = LatticeRect::parse_line("rect 3 -1 2");
    CHECK(r.half_width() == 3);
    CHECK(r.dim() == 2);
    CHECK(r.contains({3, 2}));
    CHECK_FALSE(r.contains({4, 0}));
    CHECK_FALSE(r.contains({0, -2}));
    CHECK(r.to_line() == "rect 3 -1 2");
    CHECK_THROWS_AS(LatticeRect::parse_line("rect 3 -1"), ParseError);
    CHECK_THROWS_AS(LatticeRect::parse_line("box 3"), ParseError);
}

TEST_CASE("k=1 domains work end to end") {
    LatticeDomain d = LatticeDomain::generate_random(5, 1, 6);
    CHECK(d.validate().all_pass());
    std::stringstream ss;
    d.save(ss);
    DomainFile df = load_domain_file(ss, "k1");
    CHECK(df.domain.points().points() == d.points().points());
}
