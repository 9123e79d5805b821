#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "pamarkov/trace.hpp"

using namespace pam;

TEST_CASE("axis-aligned torus traces") {
    FlatSurface t = FlatSurface::torus();
    Germ g = normalize_germ(t, 0, {QuadNum(1, 4), QuadNum(1, 2)}, {QuadNum(1), QuadNum(0)});

    SUBCASE("no wrap") {
        auto tr = trace_displacement(t, g, {QuadNum(1, 2), QuadNum(0)});
        CHECK(tr.chunks.size() == 1);
        CHECK(tr.end.x == QuadNum(3, 4));
        CHECK(tr.end.y == QuadNum(1, 2));
        CHECK(!tr.truncated);
    }
    SUBCASE("one wrap") {
        auto tr = trace_displacement(t, g, {QuadNum(3, 2), QuadNum(0)});
        CHECK(tr.chunks.size() == 2);
        CHECK(tr.end.x == QuadNum(3, 4));
        CHECK(tr.end.y == QuadNum(1, 2));
    }
}

TEST_CASE("cone points truncate straight continuation") {
    FlatSurface l({1, 0, 2}, {2, 1, 0});
    // The diagonal from the center of square 0 aims at its top-right corner,
    // which belongs to the 6-prong cone point.
    Germ g = normalize_germ(l, 0, {QuadNum(1, 2), QuadNum(1, 2)}, {QuadNum(1), QuadNum(1)});
    auto tr = trace_displacement(l, g, {QuadNum(2), QuadNum(2)});
    CHECK(tr.truncated);
    CHECK(tr.stop_vertex == 0);
    CHECK(tr.end.x == QuadNum(1));
    CHECK(tr.end.y == QuadNum(1));
    CHECK(tr.completed == QuadNum(1, 4));
}

TEST_CASE("flat vertices pass straight through") {
    FlatSurface t2({1, 0}, {0, 1});  // all four corners of each square are flat
    Germ g = normalize_germ(t2, 0, {QuadNum(1, 2), QuadNum(1, 2)}, {QuadNum(1), QuadNum(1)});
    auto tr = trace_displacement(t2, g, {QuadNum(2), QuadNum(2)});
    CHECK(!tr.truncated);
    CHECK(tr.end.x == QuadNum(1, 2));
    CHECK(tr.end.y == QuadNum(1, 2));
}

TEST_CASE("concatenation equals one long trace after collinear merge") {
    FlatSurface l({1, 0, 2}, {2, 1, 0});
    QuadNum s2 = QuadNum::sqrt_of(2);
    Vec2q dir{QuadNum(1), s2 - QuadNum(1)};  // irrational slope, no corner hits
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        QuadNum x(mpq_class((long)(rng() % 89) + 1, 97));
        QuadNum y(mpq_class((long)(rng() % 89) + 1, 97));
        QuadNum l1(mpq_class((long)(rng() % 50) + 1, 13));
        QuadNum l2(mpq_class((long)(rng() % 50) + 1, 13));
        Germ g = normalize_germ(l, (int)(rng() % 3), {x, y}, dir);
        auto full = trace_displacement(l, g, {dir.x * (l1 + l2), dir.y * (l1 + l2)});
        auto first = trace_displacement(l, g, {dir.x * l1, dir.y * l1});
        Germ g2 = normalize_germ(l, first.end.square, {first.end.x, first.end.y}, dir);
        auto second = trace_displacement(l, g2, {dir.x * l2, dir.y * l2});
        REQUIRE(!full.truncated);
        std::vector<LeafChunk> cat = first.chunks;
        cat.insert(cat.end(), second.chunks.begin(), second.chunks.end());
        auto merged = merge_collinear(l, cat);
        auto ref = merge_collinear(l, full.chunks);
        REQUIRE(merged.size() == ref.size());
        for (size_t i = 0; i < merged.size(); ++i) {
            CHECK(merged[i].square == ref[i].square);
            CHECK(merged[i].a == ref[i].a);
            CHECK(merged[i].b == ref[i].b);
        }
    }
}

TEST_CASE("chunk endpoints lie on square boundaries or arc ends") {
    FlatSurface l({1, 0, 2}, {2, 1, 0});
    QuadNum s2 = QuadNum::sqrt_of(2);
    Vec2q dir{QuadNum(1), s2 - QuadNum(1)};
    Germ g = normalize_germ(l, 0, {QuadNum(1, 3), QuadNum(1, 7)}, dir);
    auto tr = trace_displacement(l, g, {dir.x * QuadNum(10), dir.y * QuadNum(10)});
    auto on_boundary = [](const Vec2q& p) {
        return p.x.is_zero() || p.x == QuadNum(1) || p.y.is_zero() || p.y == QuadNum(1);
    };
    for (size_t i = 0; i < tr.chunks.size(); ++i) {
        if (i > 0) CHECK(on_boundary(tr.chunks[i].a));
        if (i + 1 < tr.chunks.size()) CHECK(on_boundary(tr.chunks[i].b));
    }
}

TEST_CASE("interval shadow tracer reproduces exact traces") {
    FlatSurface l({1, 0, 2}, {2, 1, 0});
    QuadNum s2 = QuadNum::sqrt_of(2);
    Vec2q dir{QuadNum(1), s2 - QuadNum(1)};
    Germ g = normalize_germ(l, 1, {QuadNum(2, 7), QuadNum(3, 5)}, dir);
    Vec2q disp{dir.x * QuadNum(25), dir.y * QuadNum(25)};
    auto tr = trace_displacement(l, g, disp);
    REQUIRE(!tr.truncated);
    auto sh = oracle::shadow_trace(l, g.square, {oracle::Iv::from_qnum(g.p.x), oracle::Iv::from_qnum(g.p.y)},
                                   {oracle::Iv::from_qnum(disp.x), oracle::Iv::from_qnum(disp.y)},
                                   disp.x.sign(), disp.y.sign());
    REQUIRE(sh.ok);
    CHECK(sh.square == tr.end.square);
    CHECK(sh.chunks == (long)tr.chunks.size());
    CHECK(sh.end.x.encloses(tr.end.x));
    CHECK(sh.end.y.encloses(tr.end.y));
}

TEST_CASE("intersection of transverse chunks and symmetry") {
    FlatSurface t = FlatSurface::torus();
    // Horizontal arc y = 1/2 against vertical arc x = 1/4.
    MeasuredChunks h, v;
    h.chunks.push_back(LeafChunk{0, {QuadNum(0), QuadNum(1, 2)}, {QuadNum(1), QuadNum(1, 2)}});
    h.m0.push_back(QuadNum(0));
    h.m1.push_back(QuadNum(1));
    v.chunks.push_back(LeafChunk{0, {QuadNum(1, 4), QuadNum(0)}, {QuadNum(1, 4), QuadNum(1)}});
    v.m0.push_back(QuadNum(0));
    v.m1.push_back(QuadNum(1));
    auto xs = chunk_intersections(t, h, v);
    REQUIRE(xs.size() == 1);
    CHECK(xs[0].point.x == QuadNum(1, 4));
    CHECK(xs[0].point.y == QuadNum(1, 2));
    CHECK(xs[0].pos_a == QuadNum(1, 4));
    CHECK(xs[0].pos_b == QuadNum(1, 2));
    auto sx = chunk_intersections(t, v, h);
    REQUIRE(sx.size() == 1);
    CHECK(sx[0].pos_a == xs[0].pos_b);
    CHECK(sx[0].pos_b == xs[0].pos_a);

    // Disjoint squares give nothing.
    FlatSurface l({1, 0, 2}, {2, 1, 0});
    MeasuredChunks h2 = h, v2 = v;
    v2.chunks[0].square = 2;
    CHECK(chunk_intersections(l, h2, v2).empty());
}
