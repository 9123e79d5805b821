#include <doctest.h>

#include "pamarkov/firstpoints.hpp"

using namespace pam;

namespace {

PAMap cat_map() { return PAMap::make_torus(Mat2{2, 1, 1, 1}, {{mpq_class(0), mpq_class(0)}}); }

// Brute-force first-intersection check: scan all crossings of the closed
// initial segments and demand exactly one besides the shared basepoint.
bool brute_is_first(const PAMap& m, const FirstPoint& z) {
    auto sa = m.sep_chunks(STABLE, z.s_sep, QuadNum(0), z.s_pos);
    auto ua = m.sep_chunks(UNSTABLE, z.u_sep, QuadNum(0), z.u_pos);
    int count = 0;
    bool found = false;
    for (const auto& c : chunk_intersections(m.surface(), sa, ua)) {
        if (c.pos_a.sign() == 0 && c.pos_b.sign() == 0) continue;
        ++count;
        if (c.pos_a == z.s_pos && c.pos_b == z.u_pos) found = true;
    }
    return count == 1 && found;
}

}  // namespace

TEST_CASE("cat map first intersection representatives") {
    PAMap m = cat_map();
    auto reps = first_intersection_points(m);
    REQUIRE(reps.size() == 4);  // one orbit per separatrix pair
    for (const auto& z : reps) {
        CHECK(z.s_pos.sign() > 0);
        CHECK(z.u_pos.sign() > 0);
        CHECK(is_first_intersection(m, z.s_sep, z.u_sep, z.s_pos, z.u_pos));
        CHECK(brute_is_first(m, z));
        // z is the same surface point through both coordinates
        auto ps = m.point_at(STABLE, z.s_sep, z.s_pos);
        auto pu = m.point_at(UNSTABLE, z.u_sep, z.u_pos);
        CHECK(m.surface().same_point(ps, pu));
        CHECK(m.surface().same_point(ps, z.z));
    }
    // Golden values for the canonical representative on (S0, U0): the first
    // crossing of the positive separatrices sits at positions 1/sqrt(5).
    const FirstPoint& z0 = reps[0];
    CHECK(z0.s_sep == 0);
    CHECK(z0.u_sep == 0);
    CHECK(z0.s_pos == QuadNum(mpq_class(0), mpq_class(1, 5), 5));
    CHECK(z0.u_pos == QuadNum(mpq_class(0), mpq_class(1, 5), 5));
}

TEST_CASE("images of first intersection points are first intersection points") {
    PAMap m = cat_map();
    for (const auto& z : first_intersection_points(m)) {
        for (long k = 1; k <= 3; ++k) {
            FirstPoint w = transport_first_point(m, z, k);
            CHECK(is_first_intersection(m, w.s_sep, w.u_sep, w.s_pos, w.u_pos));
        }
    }
}

TEST_CASE("the second crossing along a separatrix is not a first intersection") {
    PAMap m = cat_map();
    auto z = first_intersection_points(m)[0];
    // Extend the stable segment past z to its next crossing with the same
    // unstable initial segment scaled up; that crossing has a crossing of
    // both segments strictly inside, so it fails the test.
    auto sa = m.sep_chunks(STABLE, z.s_sep, QuadNum(0), z.s_pos * QuadNum(8));
    auto ua = m.sep_chunks(UNSTABLE, z.u_sep, QuadNum(0), z.u_pos * QuadNum(8));
    auto xs = chunk_intersections(m.surface(), sa, ua);
    bool checked_some = false;
    for (const auto& c : xs) {
        if (c.pos_a.sign() == 0 || (c.pos_a == z.s_pos && c.pos_b == z.u_pos)) continue;
        if (c.pos_a > z.s_pos && c.pos_b > z.u_pos) {
            CHECK(!is_first_intersection(m, z.s_sep, z.u_sep, c.pos_a, c.pos_b));
            checked_some = true;
        }
    }
    CHECK(checked_some);
}

TEST_CASE("singular basepoints are rejected") {
    PAMap m = cat_map();
    CHECK_THROWS_AS(is_first_intersection(m, 0, 0, QuadNum(0), QuadNum(1)),
                    std::invalid_argument);
}

TEST_CASE("enumeration is deterministic and orbit-complete") {
    PAMap m = cat_map();
    auto a = first_intersection_points(m);
    auto b = first_intersection_points(m);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].s_sep == b[i].s_sep);
        CHECK(a[i].s_pos == b[i].s_pos);
        CHECK(a[i].u_sep == b[i].u_sep);
        CHECK(a[i].u_pos == b[i].u_pos);
    }
    // No two representatives lie on the same orbit: f^m images of one never
    // hit another within a generous power window.
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j) {
            if (i == j) continue;
            for (long mpow = -6; mpow <= 6; ++mpow) {
                FirstPoint w = transport_first_point(m, a[i], mpow);
                bool same = w.s_sep == a[j].s_sep && w.u_sep == a[j].u_sep &&
                            w.s_pos == a[j].s_pos && w.u_pos == a[j].u_pos;
                CHECK(!same);
            }
        }
}

TEST_CASE("L-origami representatives are stable across reruns") {
    PAMap m =
        PAMap::make_origami(FlatSurface({1, 0, 2}, {2, 1, 0}), Mat2{5, 2, 2, 1}, std::nullopt);
    auto a = first_intersection_points(m);
    auto b = first_intersection_points(m);
    CHECK(a.size() == 72);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].s_sep == b[i].s_sep);
        CHECK(a[i].s_pos == b[i].s_pos);
    }
    for (size_t i = 0; i < a.size(); i += 7)
        CHECK(is_first_intersection(m, a[i].s_sep, a[i].u_sep, a[i].s_pos, a[i].u_pos));
}
