#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "pamarkov/pamap.hpp"

using namespace pam;

namespace {

PAMap cat_map() { return PAMap::make_torus(Mat2{2, 1, 1, 1}, {{mpq_class(0), mpq_class(0)}}); }

PAMap l_map() {
    return PAMap::make_origami(FlatSurface({1, 0, 2}, {2, 1, 0}), Mat2{5, 2, 2, 1}, std::nullopt);
}

}  // namespace

TEST_CASE("cat map eigen data") {
    PAMap m = cat_map();
    CHECK(m.D() == 5);
    CHECK(m.lambda() == (QuadNum(3) + QuadNum::sqrt_of(5)) / QuadNum(2));
    CHECK(m.dir(UNSTABLE).x == QuadNum(1));
    CHECK(m.dir(UNSTABLE).y == (QuadNum::sqrt_of(5) - QuadNum(1)) / QuadNum(2));
    CHECK(m.num_seps(STABLE) == 2);
    CHECK(m.num_seps(UNSTABLE) == 2);
    for (const auto& s : m.seps(UNSTABLE)) CHECK(s.image == s.id);  // positive eigenvalues
    CHECK(m.du(m.dir(UNSTABLE)) == QuadNum(1));
    CHECK(m.ds(m.dir(STABLE)) == QuadNum(1));
    CHECK(m.du(m.dir(STABLE)).is_zero());
}

TEST_CASE("non-hyperbolic matrices rejected") {
    CHECK_THROWS_AS(PAMap::make_torus(Mat2{1, 1, 1, 0}, {{mpq_class(0), mpq_class(0)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PAMap::make_torus(Mat2{1, 1, 0, 1}, {{mpq_class(0), mpq_class(0)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PAMap::make_torus(Mat2{2, 1, 1, 1}, {}), std::invalid_argument);
    CHECK_THROWS_AS(
        PAMap::make_origami(FlatSurface({1, 0, 2}, {2, 1, 0}), Mat2{1, 1, 1, 0}, std::nullopt),
        std::invalid_argument);
}

TEST_CASE("marked orbit closure and periodicity") {
    PAMap m = PAMap::make_torus(Mat2{2, 1, 1, 1}, {{mpq_class(1, 2), mpq_class(1, 2)}});
    CHECK(m.singularities().size() == 3);  // {(1/2,1/2), (1/2,0), (0,1/2)}
    for (const auto& s : m.singularities()) {
        CHECK(s.period == 3);
        CHECK(s.orbit == 0);
        CHECK(s.prongs == 2);
    }
    SurfacePoint p(0, QuadNum(1, 2), QuadNum(1, 2));
    CHECK(m.surface().same_point(m.apply(p, 3), p));
    CHECK(!m.surface().same_point(m.apply(p, 1), p));
    // 6 stable separatrices across the orbit, permuted with the orbit.
    CHECK(m.num_seps(STABLE) == 6);
    for (const auto& s : m.seps(STABLE)) {
        int img = s.image;
        CHECK(m.seps(STABLE)[img].sing == m.singularities()[s.sing].image);
    }
}

TEST_CASE("apply composes and fixes the origin") {
    PAMap m = cat_map();
    SurfacePoint o(0, QuadNum(0), QuadNum(0));
    CHECK(m.surface().same_point(m.apply(o, 10), o));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        SurfacePoint p(0, QuadNum(mpq_class((long)(rng() % 100), 101)),
                       QuadNum(mpq_class((long)(rng() % 100), 101)));
        long a = (long)(rng() % 4), b = (long)(rng() % 4);
        auto q1 = m.apply(m.apply(p, a), b);
        auto q2 = m.apply(p, a + b);
        CHECK(m.surface().same_point(q1, q2));
        CHECK(m.surface().same_point(m.apply(m.apply(p, a), -a), p));
    }
}

TEST_CASE("gluing equivariance of the canonical representative") {
    PAMap m = cat_map();
    std::mt19937_64 rng(6);
    for (int i = 0; i < 100; ++i) {
        // random boundary points
        QuadNum t(mpq_class((long)(rng() % 100), 101));
        SurfacePoint p = (i % 2) ? SurfacePoint(0, QuadNum(0), t) : SurfacePoint(0, t, QuadNum(1));
        auto img_canon = m.apply(m.surface().canonical(p), 1);
        auto canon_img = m.surface().canonical(m.apply(p, 1));
        CHECK(m.surface().same_point(img_canon, canon_img));
    }
}

TEST_CASE("leaf position transport and measure scaling") {
    PAMap m = cat_map();
    std::mt19937_64 rng(8);
    for (int sep = 0; sep < 2; ++sep) {
        for (int i = 0; i < 10; ++i) {
            QuadNum pos(mpq_class((long)(rng() % 300) + 1, 100));
            auto [isep, ipos] = m.apply_leaf(UNSTABLE, sep, pos, 1);
            CHECK(ipos == pos * m.lambda());  // unstable arcs grow under f
            auto [ssep, spos] = m.apply_leaf(STABLE, sep, pos, -1);
            CHECK(spos == pos * m.lambda());  // stable arcs grow under f^-1
            // point transport matches the chart action of the map
            SurfacePoint p = m.point_at(UNSTABLE, sep, pos);
            SurfacePoint q = m.point_at(UNSTABLE, isep, ipos);
            CHECK(m.surface().same_point(m.apply(p, 1), q));
        }
    }
}

TEST_CASE("cat map unstable ray endpoint matches the interval shadow") {
    PAMap m = cat_map();
    SurfacePoint p = m.point_at(UNSTABLE, 0, QuadNum(1));
    // independent eigen data: slope from 256-bit sqrt(5)
    oracle::Iv s5 = oracle::Iv::sqrt_of(5);
    oracle::Iv one = oracle::Iv::from_long(1), two = oracle::Iv::from_long(2);
    oracle::Iv slope = (s5 - one) / two;
    auto sh = oracle::shadow_trace(m.surface(), 0, {oracle::Iv::from_long(0), oracle::Iv::from_long(0)},
                                   {one, slope}, 1, 1);
    REQUIRE(sh.ok);
    CHECK(sh.square == p.square);
    CHECK(sh.end.x.encloses(p.x));
    CHECK(sh.end.y.encloses(p.y));
}

TEST_CASE("L-origami map: construction, eigen data, separatrix structure") {
    PAMap m = l_map();
    CHECK(m.D() == 2);
    CHECK(m.lambda() == QuadNum(3) + QuadNum(2) * QuadNum::sqrt_of(2));
    CHECK(m.lambda() * m.lambda() == QuadNum(6) * m.lambda() - QuadNum(1));
    REQUIRE(m.singularities().size() == 1);
    CHECK(m.singularities()[0].prongs == 6);
    CHECK(m.num_seps(STABLE) == 6);
    CHECK(m.num_seps(UNSTABLE) == 6);
    // f fixes the singularity and permutes prongs respecting the cyclic
    // order: the permutation on cyclic prong indices is a rotation.
    const auto& seps = m.seps(UNSTABLE);
    int shift = -1;
    for (const auto& s : seps) {
        int d = (seps[s.image].prong - s.prong + 6) % 6;
        if (shift < 0) shift = d;
        CHECK(d == shift);
    }
}

TEST_CASE("torus as one-square origami agrees with the torus constructor") {
    PAMap t = cat_map();
    PAMap o = PAMap::make_origami(FlatSurface::torus(), Mat2{2, 1, 1, 1}, std::make_pair(0, 0));
    CHECK(o.lambda() == t.lambda());
    CHECK(o.D() == t.D());
    CHECK(o.dir(UNSTABLE).y == t.dir(UNSTABLE).y);
    CHECK(o.dir(STABLE).y == t.dir(STABLE).y);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 40; ++i) {
        SurfacePoint p(0, QuadNum(mpq_class((long)(rng() % 100), 101)),
                       QuadNum(mpq_class((long)(rng() % 100), 103)));
        CHECK(t.surface().same_point(o.apply(p, 1), t.apply(p, 1)));
        CHECK(t.surface().same_point(o.apply(p, -1), t.apply(p, -1)));
    }
}

TEST_CASE("origami roundtrip and negative powers") {
    PAMap m = l_map();
    std::mt19937_64 rng(10);
    for (int i = 0; i < 40; ++i) {
        SurfacePoint p((int)(rng() % 3), QuadNum(mpq_class((long)(rng() % 100), 101)),
                       QuadNum(mpq_class((long)(rng() % 100), 103)));
        CHECK(m.surface().same_point(m.apply(m.apply(p, 1), -1), p));
        CHECK(m.surface().same_point(m.apply(m.apply(p, -2), 2), p));
    }
    // cone point is fixed
    SurfacePoint c(0, QuadNum(0), QuadNum(0));
    CHECK(m.surface().same_point(m.apply(c, 1), c));
}

TEST_CASE("separatrix cycle structure matches between foliations at fixed singularities") {
    auto cycle_lengths = [](const PAMap& m, int fol, int sing_id) {
        std::vector<int> lens;
        std::vector<char> seen(m.num_seps(fol), 0);
        for (const auto& s : m.seps(fol)) {
            if (s.sing != sing_id || seen[s.id]) continue;
            int cur = s.id, len = 0;
            while (!seen[cur]) {
                seen[cur] = 1;
                cur = m.seps(fol)[cur].image;
                ++len;
            }
            lens.push_back(len);
        }
        std::sort(lens.begin(), lens.end());
        return lens;
    };
    for (PAMap m : {cat_map(), l_map()}) {
        for (const auto& sing : m.singularities()) {
            if (sing.image != sing.id) continue;  // only fixed singularities
            CHECK(cycle_lengths(m, STABLE, sing.id) == cycle_lengths(m, UNSTABLE, sing.id));
        }
    }
}

TEST_CASE("negative trace matrices are handled with sign tracking") {
    PAMap m = PAMap::make_torus(Mat2{-2, 1, 1, -1}, {{mpq_class(0), mpq_class(0)}});
    CHECK(m.eig_sign() == -1);
    CHECK(m.lambda() > QuadNum(1));
    // f swaps each separatrix with its opposite ray.
    for (const auto& s : m.seps(UNSTABLE)) {
        CHECK(m.seps(UNSTABLE)[s.image].sign == -s.sign);
    }
    // measure transport still expands unstable arcs
    auto [isep, ipos] = m.apply_leaf(UNSTABLE, 0, QuadNum(1), 1);
    CHECK(ipos == m.lambda());
    SurfacePoint p = m.point_at(UNSTABLE, 0, QuadNum(1));
    SurfacePoint q = m.point_at(UNSTABLE, isep, ipos);
    CHECK(m.surface().same_point(m.apply(p, 1), q));
}
