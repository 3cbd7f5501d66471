#include <doctest.h>

#include "iselab/connect.hpp"

using namespace iselab;

namespace {

// exhaustively check both complement dualities on a marked domain
long duality_failures(const LatticeDomain& dom, const RectangleMarking& m) {
    CrossingTester ct(m);
    SpinConfiguration cfg;
    const int n = dom.n_verts();
    REQUIRE(n <= 18);
    cfg.s.assign(n, 1);
    long bad = 0;
    for (long g = 0; g < (1L << n); ++g) {
        for (int i = 0; i < n; ++i) cfg.s[i] = (g >> i) & 1 ? 1 : -1;
        if (ct.plus_crossing(cfg) == ct.minus_star_crossing(cfg)) ++bad;
        if (ct.star_crossing(cfg) == ct.minus_plus_crossing(cfg)) ++bad;
    }
    return bad;
}

}  // namespace

TEST_CASE("exhaustive planar duality on the 3x3 grid") {
    auto sq = Polygon::rectangle(0, 0, 1, 1);
    auto dom = discretize(sq, Rat(1, 4), {Rat(1, 2), Rat(1, 2)});
    auto m = mark_rectangle(dom, {Rat(0), Rat(1)}, {Rat(1), Rat(1)}, {Rat(1), Rat(0)},
                            {Rat(0), Rat(0)});
    CHECK(duality_failures(dom, m) == 0);
}

TEST_CASE("exhaustive planar duality on the 4x4 grid") {
    auto sq = Polygon::rectangle(0, 0, 1, 1);
    auto dom = discretize(sq, Rat(1, 5), {Rat(1, 2), Rat(1, 2)});
    auto m = mark_rectangle(dom, {Rat(0), Rat(1)}, {Rat(1), Rat(1)}, {Rat(1), Rat(0)},
                            {Rat(0), Rat(0)});
    CHECK(duality_failures(dom, m) == 0);
}

TEST_CASE("exhaustive planar duality with shifted marks and on the L-shape") {
    auto sq = Polygon::rectangle(0, 0, 1, 1);
    auto dom = discretize(sq, Rat(1, 5), {Rat(1, 2), Rat(1, 2)});
    auto shifted = mark_rectangle(dom, {Rat(1, 3), Rat(1)}, {Rat(1), Rat(2, 3)},
                                  {Rat(2, 3), Rat(0)}, {Rat(0), Rat(1, 5)});
    CHECK(duality_failures(dom, shifted) == 0);

    Polygon L;
    L.pts = {{0, 0}, {1, 0}, {1, Rat(1, 2)}, {Rat(1, 2), Rat(1, 2)}, {Rat(1, 2), 1}, {0, 1}};
    auto ldom = discretize(L, Rat(1, 6), {Rat(1, 4), Rat(1, 4)});
    auto lm = mark_rectangle(ldom, {Rat(0), Rat(1)}, {Rat(1, 2), Rat(2, 3)}, {Rat(1), Rat(0)},
                             {Rat(0), Rat(0)});
    CHECK(duality_failures(ldom, lm) == 0);
}

TEST_CASE("deterministic configurations") {
    auto sq = Polygon::rectangle(0, 0, 1, 1);
    auto dom = discretize(sq, Rat(1, 4), {Rat(1, 2), Rat(1, 2)});
    auto m = mark_rectangle(dom, {Rat(0), Rat(1)}, {Rat(1), Rat(1)}, {Rat(1), Rat(0)},
                            {Rat(0), Rat(0)});
    CrossingTester ct(m);
    SpinConfiguration cfg;
    cfg.s.assign(dom.n_verts(), 1);
    CHECK(ct.plus_crossing(cfg));
    CHECK(ct.star_crossing(cfg));
    CHECK(!ct.minus_star_crossing(cfg));
    for (auto& s : cfg.s) s = -1;
    CHECK(!ct.plus_crossing(cfg));
    CHECK(ct.minus_star_crossing(cfg));
}
