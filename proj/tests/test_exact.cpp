#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "exitwalk/errors.hpp"
#include "exitwalk/exact.hpp"
#include "exitwalk/verifier.hpp"

using namespace exitwalk;

namespace {

std::shared_ptr<PointSet> interval_1d(Coord lo, Coord hi) {
    std::vector<Point> pts;
    for (Coord x = lo; x <= hi; ++x) pts.push_back({x});
    return std::make_shared<PointSet>(1, std::move(pts));
}

std::shared_ptr<PointSet> block_2d(Coord x_half, Coord y_lo, Coord y_hi) {
    std::vector<Point> pts;
    for (Coord x = -x_half; x <= x_half; ++x)
        for (Coord y = y_lo; y <= y_hi; ++y) pts.push_back({x, y});
    return std::make_shared<PointSet>(2, std::move(pts));
}

}  // namespace

TEST_CASE("step: delta mass spreads uniformly over the 9 neighbors") {
    auto window = block_2d(1, -1, 1);
    ProbVector pv = delta_mass(window, {0, 0});
    ProbVector next = step(pv, window);
    CHECK(next.step_index == 1);
    REQUIRE(next.mass.size() == 9);
    for (const Rat& q : next.mass) CHECK(q == Rat(1, 9));
}

TEST_CASE("step: 1-D kill at a single point keeps 1/3") {
    auto dom = interval_1d(1, 1);
    ProbVector pv = delta_mass(dom, {1});
    ProbVector next = step(pv, dom);
    CHECK(next.total() == Rat(1, 3));
}

TEST_CASE("step: no absorption when the kill set covers the neighborhood") {
    auto small = block_2d(1, 0, 0);
    auto big = block_2d(3, -2, 2);
    ProbVector pv = delta_mass(small, {1, 0});
    Rat before = pv.total();
    ProbVector next = step(pv, big);
    CHECK(next.total() == before);
}

TEST_CASE("survival basics and the geometric single-point curve") {
    auto dom = interval_1d(1, 1);
    SurvivalCurve c = survival({1}, *dom, 6);
    REQUIRE(c.values.size() == 7);
    CHECK(c.values[0] == 1);
    Rat expect(1);
    for (int m = 1; m <= 6; ++m) {
        expect /= 3;
        CHECK(c.values[m] == expect);
    }
    // cross-check by the independent path-enumeration oracle
    for (int m = 1; m <= 6; ++m)
        CHECK(brute_force_joint({1}, *dom, *dom, m, m) == c.values[m]);

    auto window = block_2d(1, -1, 1);
    CHECK(survival({0, 0}, *window, 1).values[1] == 1);
    CHECK_THROWS_AS(survival({5}, *dom, 1), std::invalid_argument);
}

TEST_CASE("survival curves never increase") {
    auto dom = block_2d(2, 0, 2);
    SurvivalCurve c = survival({1, 1}, *dom, 12);
    for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] <= c.values[i - 1]);
}

TEST_CASE("survival is symmetric in the first coordinate on symmetric domains") {
    auto dom = block_2d(3, 0, 2);
    for (int m : {1, 4, 9}) {
        CHECK(survival({2, 1}, *dom, m).values[m] == survival({-2, 1}, *dom, m).values[m]);
    }
}

TEST_CASE("probability masses keep denominators dividing 3^(k*i)") {
    auto dom = block_2d(2, 0, 1);
    ProbVector pv = delta_mass(dom, {1, 0});
    for (int i = 1; i <= 8; ++i) {
        pv = step(pv, dom);
        for (const Rat& q : pv.mass) {
            CHECK(q >= 0);
            CHECK(denominator_divides_pow3(q, 2ul * i));
        }
        CHECK(pv.total() <= 1);
    }
}

TEST_CASE("joint survival: trivial and structural cases") {
    auto inner = interval_1d(1, 2);
    auto outer = interval_1d(-1, 4);
    CHECK(joint_survival({1}, *inner, *outer, 0, 0) == 1);
    // inner == outer collapses to plain survival at max(m, n)
    CHECK(joint_survival({1}, *inner, *inner, 2, 5) ==
          survival({1}, *inner, 5).values[5]);
    CHECK(joint_survival({1}, *inner, *inner, 5, 2) ==
          survival({1}, *inner, 5).values[5]);
    CHECK_THROWS_AS(joint_survival({1}, *outer, *inner, 1, 1), std::invalid_argument);
}

TEST_CASE("brute force oracle frozen values") {
    auto one = interval_1d(1, 1);
    CHECK(brute_force_joint({1}, *one, *one, 2, 2) == Rat(1, 9));
    CHECK(brute_force_joint({1}, *one, *one, 0, 0) == 1);
    CHECK_THROWS_AS(brute_force_joint({1}, *one, *one, 40, 0, 1000), CapExceeded);
}

TEST_CASE("DP equals the path oracle on random instances") {
    int checked = 0;
    for (std::uint64_t idx = 0; idx < 40; ++idx) {
        CorpusSpec spec;
        spec.seed = 1234;
        spec.instances = 40;
        spec.max_extent = 3;
        spec.m_max = 6;
        spec.n_max = 6;
        PropositionInstance inst = make_proposition_instance(spec, idx);
        if (std::max(inst.m, inst.n) > 6) continue;
        PointSet outer = inst.rect.point_set();
        Rat dp = joint_survival(inst.z, inst.domain.points(), outer, inst.m, inst.n);
        Rat oracle = brute_force_joint(inst.z, inst.domain.points(), outer, inst.m, inst.n);
        CAPTURE(inst.id);
        REQUIRE(dp == oracle);
        PointSet ih = inst.domain.half(), oh = inst.rect.half_point_set();
        REQUIRE(joint_survival(inst.z, ih, oh, inst.m, inst.n) ==
                brute_force_joint(inst.z, ih, oh, inst.m, inst.n));
        ++checked;
    }
    CHECK(checked >= 30);
}

TEST_CASE("conditional exit probability: trivial values and oracle ratio") {
    auto inner = interval_1d(1, 2);
    auto outer = interval_1d(-2, 3);
    CHECK(conditional_exit_prob({1}, *inner, *outer, 0, 4) == 1);
    CHECK(conditional_exit_prob({1}, *inner, *inner, 3, 5) == 1);
    Rat lhs = conditional_exit_prob({1}, *inner, *outer, 3, 4);
    Rat oracle = brute_force_joint({1}, *inner, *outer, 3, 4) /
                 brute_force_joint({1}, *outer, *outer, 4, 4);
    CHECK(lhs == oracle);
}

TEST_CASE("conditional exit probability is nonincreasing in m") {
    auto inner = block_2d(1, 0, 1);
    auto outer = block_2d(2, -1, 2);
    Rat prev(2);
    for (int m = 0; m <= 8; ++m) {
        Rat cur = conditional_exit_prob({1, 0}, *inner, *outer, m, 5);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("expected exit time: closed forms") {
    CHECK(expected_exit_time({1}, *interval_1d(1, 1)) == Rat(3, 2));
    auto two = interval_1d(1, 2);
    CHECK(expected_exit_time({1}, *two) == 3);
    CHECK(expected_exit_time({2}, *two) == 3);
}

TEST_CASE("expected exit time agrees with truncated survival sums") {
    auto dom = block_2d(2, 0, 1);
    Rat e = expected_exit_time({1, 1}, *dom);
    SurvivalCurve c = survival({1, 1}, *dom, 220);
    Rat partial(0);
    for (const Rat& s : c.values) partial += s;
    CHECK(partial <= e);
    CHECK(to_double(e - partial) < 1e-9);
}

TEST_CASE("expected exit time is monotone under domain inclusion") {
    auto inner = block_2d(1, 0, 1);
    auto outer = block_2d(2, -1, 2);
    CHECK(expected_exit_time({1, 0}, *inner) <= expected_exit_time({1, 0}, *outer));
}

TEST_CASE("conditional expected exit: geometric series case is exact") {
    auto one = interval_1d(1, 1);
    RatInterval iv = conditional_expected_exit({1}, *one, *one, 0, Rat(1, 1000000));
    CHECK(iv.lo <= Rat(3, 2));
    CHECK(iv.hi >= Rat(3, 2));
    CHECK(iv.width() <= Rat(1, 1000000));
}

TEST_CASE("conditional expected exit: per-m comparison carries to the sums") {
    auto inner = block_2d(2, 0, 2);
    LatticeDomain dom{*inner};
    auto inner_half = std::make_shared<PointSet>(dom.half());
    auto outer = block_2d(3, -1, 3);
    LatticeDomain odom{*outer};
    auto outer_half = std::make_shared<PointSet>(odom.half());
    Rat tol(1, 1000000000);
    RatInterval left = conditional_expected_exit({1, 1}, *inner_half, *outer_half, 3, tol);
    RatInterval right = conditional_expected_exit({1, 1}, *inner, *outer, 3, tol);
    CHECK(left.hi <= right.lo);
}

TEST_CASE("conditional expected exit respects the step cap") {
    auto big = block_2d(4, 0, 4);
    CHECK_THROWS_AS(
        conditional_expected_exit({1, 1}, *big, *big, 0, Rat(1, 1000000000), 10),
        CapExceeded);
}

TEST_CASE("float DP tracks the exact DP") {
    auto inner = block_2d(2, 0, 2);
    auto outer = block_2d(3, -1, 3);
    Rat exact_val = conditional_exit_prob({1, 1}, *inner, *outer, 5, 7);
    double approx = conditional_exit_prob_f({1, 1}, *inner, *outer, 5, 7);
    CHECK(std::abs(approx - to_double(exact_val)) < 1e-12);
}

TEST_CASE("exact result json carries decimal strings") {
    std::string j = exact_result_json("abc", {1, 0}, 2, 3, Rat(1, 3));
    CHECK(j.find("\"num\":\"1\"") != std::string::npos);
    CHECK(j.find("\"den\":\"3\"") != std::string::npos);
    CHECK(j.find("\"m\":2") != std::string::npos);
}
