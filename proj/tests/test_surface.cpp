#include <doctest.h>

#include <numeric>
#include <random>

#include "pamarkov/surface.hpp"

using namespace pam;

namespace {

// Independent Euler-characteristic count: corner classes by union-find
// over the explicit corner identifications of the square complex.
int vertex_count_oracle(const std::vector<int>& right, const std::vector<int>& top) {
    int n = (int)right.size();
    std::vector<int> uf(4 * n);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    auto unite = [&](int a, int b) { uf[find(a)] = find(b); };
    auto id = [&](int sq, int c) { return 4 * sq + c; };
    for (int i = 0; i < n; ++i) {
        unite(id(i, BR), id(right[i], BL));  // right edge endpoints
        unite(id(i, TR), id(right[i], TL));
        unite(id(i, TL), id(top[i], BL));  // top edge endpoints
        unite(id(i, TR), id(top[i], BR));
    }
    int v = 0;
    for (int x = 0; x < 4 * n; ++x)
        if (find(x) == x) ++v;
    return v;
}

}  // namespace

TEST_CASE("one-square torus") {
    FlatSurface t = FlatSurface::torus();
    CHECK(t.num_squares() == 1);
    CHECK(t.genus() == 1);
    CHECK(t.num_vertices() == 1);
    CHECK(!t.is_cone(0));
    CHECK(t.cone_vertices().empty());
}

TEST_CASE("L-shaped three-square origami") {
    FlatSurface l({1, 0, 2}, {2, 1, 0});
    CHECK(l.genus() == 2);
    REQUIRE(l.num_vertices() == 1);
    CHECK(l.is_cone(0));
    CHECK(l.vertex_cycle(0).size() == 12);  // cone angle 6 pi
    CHECK(l.prongs(0) == 6);
    CHECK(vertex_count_oracle({1, 0, 2}, {2, 1, 0}) == 1);
}

TEST_CASE("two-square torus (area 2, no cone point)") {
    FlatSurface t2({1, 0}, {0, 1});
    CHECK(t2.genus() == 1);
    CHECK(t2.cone_vertices().empty());
    CHECK(t2.num_vertices() == vertex_count_oracle({1, 0}, {0, 1}));
}

TEST_CASE("euler characteristic matches the union-find oracle on random origamis") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + (int)(rng() % 5);
        std::vector<int> r(n), t(n);
        std::iota(r.begin(), r.end(), 0);
        std::iota(t.begin(), t.end(), 0);
        std::shuffle(r.begin(), r.end(), rng);
        std::shuffle(t.begin(), t.end(), rng);
        try {
            FlatSurface s(r, t);
            CHECK(s.num_vertices() == vertex_count_oracle(r, t));
            // Total cone excess 2 pi sum(m) = 2 pi (2g - 2).
            long excess = 0;
            for (int v = 0; v < s.num_vertices(); ++v)
                excess += (long)s.vertex_cycle(v).size() / 4 - 1;
            CHECK(excess == 2 * s.genus() - 2);
        } catch (const std::invalid_argument&) {
            // disconnected sample; skip
        }
    }
}

TEST_CASE("malformed input rejected") {
    CHECK_THROWS_AS(FlatSurface({0, 0}, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(FlatSurface({1, 0, 2, 3}, {0, 1, 3, 2}), std::invalid_argument);  // disconnected
}

TEST_CASE("boundary point canonicalization") {
    FlatSurface l({1, 0, 2}, {2, 1, 0});
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        int sq = (int)(rng() % 3);
        QuadNum y(mpq_class((long)(rng() % 97) + 1, 101));
        // The two chart representatives of an edge point compare equal.
        SurfacePoint a(sq, QuadNum(1), y);
        SurfacePoint b(l.right(sq), QuadNum(0), y);
        CHECK(l.same_point(a, b));
        SurfacePoint c(sq, y, QuadNum(1));
        SurfacePoint d(l.top(sq), y, QuadNum(0));
        CHECK(l.same_point(c, d));
        CHECK(!l.same_point(a, c));
    }
    // All corner representatives of the cone point agree.
    auto reps = l.representatives(SurfacePoint(0, QuadNum(0), QuadNum(0)));
    CHECK(reps.size() == 12);
    for (const auto& r : reps)
        CHECK(l.same_point(r, SurfacePoint(0, QuadNum(0), QuadNum(0))));
}
