#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "exitwalk/chain.hpp"
#include "exitwalk/errors.hpp"
#include "exitwalk/rng.hpp"

using namespace exitwalk;

namespace {

// Test-only oracle: enumerate every +/-1/0 path of length l from x and
// hand the (path, 3^-l weight) pairs to a visitor.
void for_each_path(int x, int l, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> path(l + 1);
    path[0] = x;
    std::function<void(int)> rec = [&](int depth) {
        if (depth == l) {
            visit(path);
            return;
        }
        for (int d = -1; d <= 1; ++d) {
            path[depth + 1] = path[depth] + d;
            rec(depth + 1);
        }
    };
    rec(0);
}

bool in_barrier(const std::vector<int>& path, const std::vector<int>& f, int from, int to) {
    for (int i = from; i <= to; ++i)
        if (path[i] < 1 || path[i] > f[i]) return false;
    return true;
}

}  // namespace

TEST_CASE("gamma examples via domains are covered in lattice tests; barrier IO here") {
    BarrierProblem bp;
    bp.n = 2;
    bp.m = 1;
    bp.f = {2, 2, 3};
    bp.h = {2, 1};
    bp.x = 1;
    bp.check();
    std::stringstream ss;
    bp.save(ss);
    BarrierProblem back = BarrierProblem::load(ss, "rt");
    CHECK(back.f == bp.f);
    CHECK(back.h == bp.h);
    CHECK(back.x == 1);

    std::stringstream bad1("2 1 1\n2 2 3\n");
    CHECK_THROWS_AS(BarrierProblem::load(bad1, "bad"), ParseError);
    std::stringstream bad2("2 1 1\n2 2 3\n3 1\n");  // h(0) > f(0)
    CHECK_THROWS_AS(BarrierProblem::load(bad2, "bad"), ParseError);
}

TEST_CASE("survival weights p: flat barrier hand values") {
    std::vector<int> f{2, 2, 2};
    WeightTable p = survival_weights_p(f, 0, 2);
    CHECK(p.at(2, 1) == 1);
    CHECK(p.at(2, 2) == 1);
    CHECK(p.at(2, 0) == 0);
    CHECK(p.at(2, 3) == 0);
    CHECK(p.at(1, 1) == Rat(2, 3));
    CHECK(p.at(1, 2) == Rat(2, 3));
    CHECK(p.at(0, 1) == Rat(4, 9));
    CHECK(p.at(0, 2) == Rat(4, 9));
    // indicator kills outside (0, f(k)]
    CHECK(p.at(1, 0) == 0);
    CHECK(p.at(1, 3) == 0);
}

TEST_CASE("survival weights p match the defining probabilities") {
    std::vector<int> f{2, 3, 1, 2, 2};
    WeightTable p = survival_weights_p(f, 0, 4);
    for (int k = 0; k <= 4; ++k) {
        for (int j = 1; j <= 3; ++j) {
            Rat total(0);
            int l = 4 - k;
            for_each_path(j, l, [&](const std::vector<int>& path) {
                bool ok = true;
                for (int i = 0; i <= l; ++i)
                    if (path[i] < 1 || path[i] > f[k + i]) ok = false;
                if (ok) total += inv_pow3(l);
            });
            CHECK(p.at(k, j) == total);
        }
    }
}

TEST_CASE("survival weights r: terminal indicator and one-step recursion") {
    std::vector<int> f{2, 2};
    WeightTable r = survival_weights_r(f, 0, 1, 1);
    CHECK(r.at(1, 1) == 1);
    CHECK(r.at(1, 2) == 0);
    CHECK(r.at(0, 1) == Rat(1, 3));
    CHECK(r.at(0, 2) == Rat(1, 3));
    CHECK(r.at(0, 0) == 0);
    CHECK_THROWS_AS(survival_weights_r(f, 0, 1, 3), std::invalid_argument);
}

TEST_CASE("r weights summed over endpoints give p weights") {
    std::vector<int> f{3, 2, 3, 2};
    WeightTable p = survival_weights_p(f, 0, 3);
    for (int k = 0; k <= 3; ++k) {
        for (int j = 0; j <= 4; ++j) {
            Rat sum(0);
            for (int beta = 1; beta <= f[3]; ++beta)
                sum += survival_weights_r(f, 0, 3, beta).at(k, j);
            CHECK(sum == p.at(k, j));
        }
    }
}

TEST_CASE("kernel_p: flat-barrier example row and terminal uniformity") {
    std::vector<int> f{2, 2, 2};
    ChainKernel k = kernel_p(f, 0, 2, 1);
    const KernelRow& row = k.row(0, 1);
    CHECK(row.p[0] == 0);          // to 0
    CHECK(row.p[1] == Rat(1, 2));  // stay at 1
    CHECK(row.p[2] == Rat(1, 2));  // to 2
    // last step: uniform over the in-barrier subset
    const KernelRow& last = k.row(1, 1);
    CHECK(last.p[0] == 0);
    CHECK(last.p[1] == Rat(1, 2));
    CHECK(last.p[2] == Rat(1, 2));
    const KernelRow& last2 = k.row(1, 2);
    CHECK(last2.p[0] == Rat(1, 2));
    CHECK(last2.p[1] == Rat(1, 2));
    CHECK(last2.p[2] == 0);
    CHECK_THROWS_AS(k.row(0, 2), std::out_of_range);  // unreachable at time 0
    CHECK_THROWS_AS(kernel_p(f, 0, 2, 3), std::invalid_argument);
}

TEST_CASE("kernel_p does not depend on the start state") {
    std::vector<int> f{3, 3, 2, 3, 3};
    ChainKernel k1 = kernel_p(f, 0, 4, 1);
    ChainKernel k3 = kernel_p(f, 0, 4, 3);
    for (int k = 0; k < 4; ++k) {
        for (const auto& [u, row] : k1.rows_at(k)) {
            if (!k3.has_row(k, u)) continue;
            const KernelRow& other = k3.row(k, u);
            for (int d = 0; d < 3; ++d) CHECK(row.p[d] == other.p[d]);
        }
    }
}

TEST_CASE("kernel rows always sum to exactly one") {
    std::vector<int> f{2, 4, 3, 1, 2, 3};
    ChainKernel kp = kernel_p(f, 0, 5, 2);
    for (int k = 0; k < 5; ++k)
        for (const auto& [u, row] : kp.rows_at(k)) {
            (void)u;
            CHECK(row.sum() == 1);
        }
    ChainKernel kr = kernel_r(f, 0, 5, 2, 1);
    for (int k = 0; k < 5; ++k)
        for (const auto& [u, row] : kr.rows_at(k)) {
            (void)u;
            CHECK(row.sum() == 1);
        }
}

TEST_CASE("kernel_p path law equals the conditioned path law, exactly") {
    std::vector<int> f{2, 3, 2, 2};
    const int b = 3, alpha = 2;
    ChainKernel kern = kernel_p(f, 0, b, alpha);

    std::map<std::vector<int>, Rat> oracle;
    Rat total(0);
    for_each_path(alpha, b, [&](const std::vector<int>& path) {
        if (in_barrier(path, f, 0, b)) {
            oracle[path] += inv_pow3(b);
            total += inv_pow3(b);
        }
    });
    REQUIRE(total > 0);
    for (auto& [path, w] : oracle) {
        Rat law(1);
        for (int k = 0; k < b; ++k) law *= kern.row(k, path[k]).p[path[k + 1] - path[k] + 1];
        CHECK(law == w / total);
    }
}

TEST_CASE("kernel_r: pinned step is deterministic and path law matches") {
    std::vector<int> f{2, 2};
    ChainKernel kern = kernel_r(f, 0, 1, 1, 2);
    const KernelRow& row = kern.row(0, 1);
    CHECK(row.p[0] == 0);
    CHECK(row.p[1] == 0);
    CHECK(row.p[2] == 1);

    std::vector<int> f2{3, 3, 3, 3, 2};
    const int b = 4, alpha = 2, beta = 1;
    ChainKernel kr = kernel_r(f2, 0, b, alpha, beta);
    std::map<std::vector<int>, Rat> oracle;
    Rat total(0);
    for_each_path(alpha, b, [&](const std::vector<int>& path) {
        if (in_barrier(path, f2, 0, b) && path[b] == beta) {
            oracle[path] += inv_pow3(b);
            total += inv_pow3(b);
        }
    });
    REQUIRE(total > 0);
    for (auto& [path, w] : oracle) {
        Rat law(1);
        for (int k = 0; k < b; ++k) law *= kr.row(k, path[k]).p[path[k + 1] - path[k] + 1];
        CHECK(law == w / total);
    }
    CHECK_THROWS_AS(kernel_r(f2, 0, 1, 1, 3), std::invalid_argument);  // unreachable endpoint
}

TEST_CASE("free kernels: reflected and unreflected rows") {
    ChainKernel psi = kernel_psi_free(0, 3, 5);
    const KernelRow& zero = psi.row(0, 0);
    CHECK(zero.p[0] == 0);
    CHECK(zero.p[1] == Rat(1, 3));
    CHECK(zero.p[2] == Rat(2, 3));
    const KernelRow& interior = psi.row(1, 2);
    for (int d = 0; d < 3; ++d) CHECK(interior.p[d] == Rat(1, 3));

    ChainKernel zeta = kernel_zeta_free(0, 3, -5, 5);
    for (int u = -2; u <= 2; ++u) CHECK(zeta.row(0, u).sum() == 1);

    // psi one-step law is the absolute-value push-forward of zeta
    for (int u : {-2, -1, 0, 1, 2}) {
        std::map<int, Rat> pushed;
        const KernelRow& zrow = zeta.row(0, u);
        for (int d = 0; d < 3; ++d) pushed[std::abs(u - 1 + d)] += zrow.p[d];
        const KernelRow& prow = psi.row(0, std::abs(u));
        std::map<int, Rat> direct;
        for (int d = 0; d < 3; ++d)
            if (prow.p[d] > 0) direct[std::abs(u) - 1 + d] += prow.p[d];
        CHECK(pushed == direct);
    }
}

TEST_CASE("chain distribution sums to one") {
    std::vector<int> f{2, 3, 2, 2, 3};
    ChainKernel kern = kernel_p(f, 0, 4, 1);
    auto dist = chain_distribution(kern, 1);
    REQUIRE(dist.size() == 5);
    for (const auto& layer : dist) {
        Rat total(0);
        for (const auto& [u, q] : layer) total += q;
        CHECK(total == 1);
    }
}

TEST_CASE("chain law from zeros: structural shapes") {
    std::vector<int> f{2, 2, 2, 2, 2, 2};
    SUBCASE("no zeros, m <= n: single P segment") {
        PiecewiseChainLaw law = chain_law_from_zeros(1, f, {}, 5);
        REQUIRE(law.segments.size() == 1);
        CHECK(law.segments[0].kernel.kind() == KernelKind::PType);
        CHECK(law.segments[0].kernel.time_begin() == 0);
        CHECK(law.segments[0].kernel.time_end() == 5);
    }
    SUBCASE("zeros at {2,4}: R, R, P segments") {
        PiecewiseChainLaw law = chain_law_from_zeros(1, f, {2, 4}, 5);
        REQUIRE(law.segments.size() == 3);
        CHECK(law.segments[0].kernel.kind() == KernelKind::RType);
        CHECK(law.segments[0].end_state == 1);
        CHECK(law.segments[1].kernel.kind() == KernelKind::RType);
        CHECK(law.segments[1].kernel.time_begin() == 3);
        CHECK(law.segments[1].kernel.time_end() == 3);
        CHECK(law.segments[2].kernel.kind() == KernelKind::PType);
        CHECK(law.segments[2].kernel.time_begin() == 5);
    }
    SUBCASE("m > n appends the reflected free kernel") {
        std::vector<int> fshort{2, 2, 2};
        PiecewiseChainLaw law = chain_law_from_zeros(1, fshort, {}, 6);
        REQUIRE(law.segments.size() == 2);
        CHECK(law.segments[0].kernel.kind() == KernelKind::PType);
        CHECK(law.segments[1].kernel.kind() == KernelKind::PsiFree);
        CHECK(law.segments[1].kernel.time_begin() == 2);
        CHECK(law.segments[1].kernel.time_end() == 6);
    }
    SUBCASE("infeasible zero placement is rejected") {
        CHECK_THROWS_AS(chain_law_from_zeros(3, f, {1}, 5), std::invalid_argument);
    }
}

TEST_CASE("chain law from zeros equals the enumerated conditional law") {
    auto check_instance = [&](int x, std::vector<int> f, std::vector<int> zeros, int l) {
        CAPTURE(x);
        CAPTURE(l);
        const int n = static_cast<int>(f.size()) - 1;
        PiecewiseChainLaw law = chain_law_from_zeros(x, f, zeros, l);

        std::map<std::vector<int>, Rat> oracle;
        Rat total(0);
        for_each_path(x, l, [&](const std::vector<int>& path) {
            // condition: |X| within f on [0,n], zeros exactly at the
            // given positions within (0,n]
            std::vector<int> zs;
            for (int i = 0; i <= n; ++i) {
                if (std::abs(path[i]) > f[i]) return;
                if (i > 0 && path[i] == 0) zs.push_back(i);
            }
            if (zs != zeros) return;
            std::vector<int> abs_path(path.size());
            for (std::size_t i = 0; i < path.size(); ++i) abs_path[i] = std::abs(path[i]);
            oracle[abs_path] += inv_pow3(l);
            total += inv_pow3(l);
        });
        REQUIRE(total > 0);
        for (auto& [abs_path, w] : oracle) {
            CAPTURE(abs_path);
            REQUIRE(law.path_prob(abs_path) == w / total);
        }
        // and the law puts zero mass on impossible paths
        std::vector<int> impossible(l + 1, x);
        impossible.back() = x + l + 5;
        CHECK(law.path_prob(impossible) == 0);
    };

    check_instance(1, {2, 2, 2, 2, 2, 2, 2}, {}, 6);
    check_instance(1, {2, 2, 2, 2, 2, 2, 2}, {2, 4}, 6);
    check_instance(2, {3, 3, 2, 2, 3, 3, 3}, {3}, 6);
    check_instance(1, {2, 2, 2, 2}, {1, 2}, 3);     // adjacent zeros
    check_instance(1, {2, 2, 2}, {}, 7);            // m > n, no zeros
    check_instance(1, {2, 2, 2}, {1, 2}, 7);        // m > n with zeros, ends at n
    check_instance(2, {2, 3, 3, 2}, {2}, 8);        // m > n with interior zero
}

TEST_CASE("interval event probabilities match enumeration") {
    std::vector<std::pair<int, int>> allowed{{1, 2}, {0, 2}, {-1, 1}, {1, 3}};
    Rat oracle(0);
    for_each_path(2, 3, [&](const std::vector<int>& path) {
        for (std::size_t i = 0; i < allowed.size(); ++i)
            if (path[i] < allowed[i].first || path[i] > allowed[i].second) return;
        oracle += inv_pow3(3);
    });
    CHECK(interval_event_prob(2, allowed) == oracle);
    // dead interval kills everything
    CHECK(interval_event_prob(1, {{1, 2}, {5, 4}, {0, 2}}) == 0);
    CHECK(interval_event_prob(3, {{1, 2}}) == 0);
}

TEST_CASE("admissible sequences: unit steps, nonempty rows, traversable chain") {
    std::vector<Point> pts;
    for (Coord x = -3; x <= 3; ++x) pts.push_back({x, 0});
    for (Coord x = -1; x <= 1; ++x) pts.push_back({x, 1});
    LatticeDomain dom(PointSet(2, std::move(pts)));

    AdmissibleSequence ok{{0, 0, 1}, {2, 0}};
    CHECK(ok.admissible_in(dom));
    AdmissibleSequence jump{{0, 2, 0}, {2, 0}};  // |step| > 1
    CHECK_FALSE(jump.admissible_in(dom));
    AdmissibleSequence empty_row{{0, 1, 2}, {2, 0}};  // row y=2 empty
    CHECK_FALSE(empty_row.admissible_in(dom));
    // x=3 cannot reach the narrow row y=1 in one step
    AdmissibleSequence pinched{{0, 1}, {3, 0}};
    CHECK_FALSE(pinched.admissible_in(dom));
    // but can after walking inward
    AdmissibleSequence fine{{0, 0, 0, 1}, {3, 0}};
    CHECK(fine.admissible_in(dom));
}
