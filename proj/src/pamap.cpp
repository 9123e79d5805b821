#include "pamarkov/pamap.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace pam {

namespace {

// Cyclic position of a nonzero direction: 0=E, 1=open QI, 2=N, 3=QII,
// 4=W, 5=QIII, 6=S, 7=QIV.
int cyc8(const Vec2q& v) {
    int sx = v.x.sign(), sy = v.y.sign();
    if (sx > 0 && sy == 0) return 0;
    if (sx > 0 && sy > 0) return 1;
    if (sx == 0 && sy > 0) return 2;
    if (sx < 0 && sy > 0) return 3;
    if (sx < 0 && sy == 0) return 4;
    if (sx < 0 && sy < 0) return 5;
    if (sx == 0 && sy < 0) return 6;
    if (sx > 0 && sy < 0) return 7;
    throw std::invalid_argument("cyc8: zero direction");
}

// Quarter-sector (corner type) hosting a germ of the given direction,
// following the edge-run chart conventions of the tracer: a germ along N
// or E lives in the [E,N] sector, along W in [N,W], along S in [S,E].
int germ_quarter(const Vec2q& v) {
    static const int table[8] = {0, 0, 0, 1, 1, 2, 3, 3};
    return table[cyc8(v)];
}

// Number of germ-convention boundaries met sweeping counterclockwise over
// the angular interval (u, v]. Boundaries sit between the cyc8 positions
// {2,3}, {4,5}, {5,6} and {7,0}.
int conv_crossings(const Vec2q& u, const Vec2q& v) {
    static const bool boundary_after[8] = {false, false, true,  false,
                                           true,  true,  false, true};
    int pu = cyc8(u), pv = cyc8(v);
    if (pu == pv) {
        // Same ray or same open quadrant: a small CCW step stays in the
        // sector; a CW step means the CCW interval wraps the whole turn.
        return u.cross_sign(v) < 0 ? 4 : 0;
    }
    int cnt = 0;
    for (int p = pu; p != pv; p = (p + 1) % 8)
        if (boundary_after[p]) ++cnt;
    return cnt;
}

Vec2q quarter_ray(int q) {
    switch (q & 3) {
        case 0: return {QuadNum(1), QuadNum(0)};
        case 1: return {QuadNum(0), QuadNum(1)};
        case 2: return {QuadNum(-1), QuadNum(0)};
        default: return {QuadNum(0), QuadNum(-1)};
    }
}

int corner_of_point(const Vec2q& p) {
    bool x0 = p.x.is_zero(), y0 = p.y.is_zero();
    return x0 ? (y0 ? BL : TL) : (y0 ? BR : TR);
}

}  // namespace

// ---------------------------------------------------------------------------
// Eigen data

void PAMap::init_eigen() {
    long t = mat_.trace();
    if (mat_.det() != 1) throw std::invalid_argument("PAMap: determinant must be 1");
    if (t <= 2 && t >= -2) throw std::invalid_argument("PAMap: |trace| must exceed 2 (not hyperbolic)");
    if (mat_.b == 0 || mat_.c == 0)
        throw std::invalid_argument("PAMap: hyperbolic SL(2,Z) matrix cannot be triangular");
    auto [s, f] = square_free_part(t * t - 4);
    if (s == 1) throw std::invalid_argument("PAMap: trace^2 - 4 is a perfect square (parabolic data)");
    d_ = s;
    eig_sign_ = t > 0 ? 1 : -1;
    // Expanding eigenvalue mu_u = (t + sign(t) f sqrt(D)) / 2, lambda = |mu_u|.
    QuadNum sqrtD = QuadNum::sqrt_of(d_);
    QuadNum mu_u = (QuadNum(t) + QuadNum((long)(eig_sign_ * f)) * sqrtD) / QuadNum(2);
    QuadNum mu_s = (QuadNum(t) - QuadNum((long)(eig_sign_ * f)) * sqrtD) / QuadNum(2);
    lambda_ = mu_u * QuadNum((long)eig_sign_);
    m_u_ = (mu_u - QuadNum(mat_.a)) / QuadNum(mat_.b);
    m_s_ = (mu_s - QuadNum(mat_.a)) / QuadNum(mat_.b);
    dir_u_ = Vec2q(QuadNum(1), m_u_);
    dir_s_ = Vec2q(QuadNum(1), m_s_);
    // A dir = mu dir, exactly.
    Vec2q au = mat_.apply(dir_u_);
    if (!(au.x == mu_u && au.y == mu_u * m_u_))
        throw std::logic_error("PAMap: eigenvector identity failed");
}

QuadNum PAMap::du(const Vec2q& v) const { return (m_s_ * v.x - v.y) / (m_s_ - m_u_); }
QuadNum PAMap::ds(const Vec2q& v) const { return (v.y - m_u_ * v.x) / (m_s_ - m_u_); }

QuadNum PAMap::eigen_area() const {
    QuadNum det = (m_s_ - m_u_).abs();
    return QuadNum((long)surface().num_squares()) / det;
}

QuadNum PAMap::lambda_pow(long k) const {
    auto it = lambda_pow_cache_.find(k);
    if (it != lambda_pow_cache_.end()) return it->second;
    QuadNum r(1);
    QuadNum base = k >= 0 ? lambda_ : QuadNum(1) / lambda_;
    for (long i = 0; i < (k >= 0 ? k : -k); ++i) r = r * base;
    lambda_pow_cache_[k] = r;
    return r;
}

int PAMap::sep_image(int foliation, int sep, long power) const {
    int cur = sep;
    if (power >= 0)
        for (long i = 0; i < power; ++i) cur = seps_[foliation][cur].image;
    else {
        // invert the stored permutation per step
        for (long i = 0; i < -power; ++i) {
            int pre = -1;
            for (const auto& s : seps_[foliation])
                if (s.image == cur) {
                    pre = s.id;
                    break;
                }
            cur = pre;
        }
    }
    return cur;
}

QuadNum PAMap::pos_image(int foliation, const QuadNum& pos, long power) const {
    return pos * lambda_pow(foliation == UNSTABLE ? power : -power);
}

std::pair<int, QuadNum> PAMap::apply_leaf(int foliation, int sep, const QuadNum& pos,
                                          long power) const {
    return {sep_image(foliation, sep, power), pos_image(foliation, pos, power)};
}

// ---------------------------------------------------------------------------
// Torus construction

PAMap PAMap::make_torus(Mat2 a, const std::vector<std::pair<mpq_class, mpq_class>>& marked) {
    PAMap m;
    m.surf_ = std::make_shared<FlatSurface>(FlatSurface::torus());
    m.torus_ = true;
    m.mat_ = a;
    m.init_eigen();
    if (marked.empty())
        throw std::invalid_argument("make_torus: at least one marked periodic point is required");
    m.build_torus_singularities(marked);
    m.build_separatrices();
    m.link_separatrix_images();
    return m;
}

SurfacePoint PAMap::apply_torus_once(const SurfacePoint& p, bool inverse) const {
    Mat2 mm = inverse ? mat_.inverse() : mat_;
    QuadNum nx = QuadNum(mm.a) * p.x + QuadNum(mm.b) * p.y;
    QuadNum ny = QuadNum(mm.c) * p.x + QuadNum(mm.d) * p.y;
    return surface().canonical(SurfacePoint(0, nx.frac(), ny.frac()));
}

void PAMap::build_torus_singularities(
    const std::vector<std::pair<mpq_class, mpq_class>>& marked) {
    // Close the marked set under f. Rational points are genuinely periodic
    // (the map permutes the finite (1/N)-lattice); we verify and record the
    // period anyway.
    std::vector<SurfacePoint> pts;
    auto push_unique = [&](const SurfacePoint& sp) -> bool {
        for (const auto& q : pts)
            if (surface().same_point(q, sp)) return false;
        pts.push_back(sp);
        return true;
    };
    for (const auto& [x, y] : marked) {
        QuadNum qx(x), qy(y);
        if (qx.sign() < 0 || qy.sign() < 0 || qx >= QuadNum(1) || qy >= QuadNum(1)) {
            qx = qx.frac();
            qy = qy.frac();
        }
        push_unique(surface().canonical(SurfacePoint(0, qx, qy)));
    }
    mpz_class den_bound = 1;
    for (const auto& [x, y] : marked) {
        mpz_class l;
        mpz_lcm(l.get_mpz_t(), x.get_den().get_mpz_t(), y.get_den().get_mpz_t());
        mpz_lcm(den_bound.get_mpz_t(), den_bound.get_mpz_t(), l.get_mpz_t());
    }
    if (den_bound > 4096)
        throw std::invalid_argument("make_torus: marked denominators too large");
    long cap = mpz_class(den_bound * den_bound).get_si() + 1;
    for (size_t i = 0; i < pts.size(); ++i) {
        SurfacePoint img = apply_torus_once(pts[i], false);
        push_unique(img);
        if ((long)pts.size() > cap)
            throw std::invalid_argument("make_torus: marked point not periodic (orbit too large)");
    }
    // Assign ids, orbits, periods.
    std::sort(pts.begin(), pts.end(), SurfacePointLess{});
    sing_.clear();
    for (int i = 0; i < (int)pts.size(); ++i) {
        Singularity s;
        s.id = i;
        s.is_cone = false;
        s.point = pts[i];
        s.prongs = 2;
        sing_.push_back(s);
    }
    auto find_sing = [&](const SurfacePoint& sp) {
        for (const auto& s : sing_)
            if (surface().same_point(s.point, sp)) return s.id;
        throw std::logic_error("torus singularities not closed under f");
    };
    for (auto& s : sing_) s.image = find_sing(apply_torus_once(s.point, false));
    // Orbits and periods.
    std::vector<int> orbit(sing_.size(), -1);
    int norb = 0;
    for (int i = 0; i < (int)sing_.size(); ++i) {
        if (orbit[i] != -1) continue;
        int cur = i, len = 0;
        do {
            orbit[cur] = norb;
            cur = sing_[cur].image;
            ++len;
        } while (cur != i);
        int cur2 = i;
        do {
            sing_[cur2].period = len;
            cur2 = sing_[cur2].image;
        } while (cur2 != i);
        ++norb;
    }
    for (int i = 0; i < (int)sing_.size(); ++i) sing_[i].orbit = orbit[i];
}

// ---------------------------------------------------------------------------
// Origami construction

OrigamiAction propagate_origami(const FlatSurface& s, const Mat2& a, int i0, int j0) {
    OrigamiAction act;
    act.m = a;
    act.e_anchor.assign(s.num_squares(), Germ{-1, {}, {}});
    Vec2q aE = a.apply(Vec2q(QuadNum(1), QuadNum(0)));
    Vec2q aN = a.apply(Vec2q(QuadNum(0), QuadNum(1)));
    for (int q = 0; q < 4; ++q)
        act.xc4[q] = conv_crossings(a.apply(quarter_ray(q)), a.apply(quarter_ray(q + 1)));
    if (act.xc4[0] + act.xc4[1] + act.xc4[2] + act.xc4[3] != 4)
        throw std::logic_error("propagate_origami: quarter images do not sum to a full turn");

    auto sector_germ = [&](int v, long idx, const Vec2q& dir) -> Germ {
        const auto& cyc = s.vertex_cycle(v);
        long len = (long)cyc.size();
        Sector t = cyc[((idx % len) + len) % len];
        if (t.corner != germ_quarter(dir))
            throw std::invalid_argument("propagate_origami: sector type mismatch");
        auto cc = FlatSurface::corner_coords(t.corner);
        return normalize_germ(s, t.square, Vec2q(QuadNum((long)cc[0]), QuadNum((long)cc[1])), dir);
    };

    // Seed: the image germ of (i0, BL, A*E) anchored at the corner of j0.
    auto [v0, k0] = s.sector_vertex(j0, BL);
    act.e_anchor[i0] = sector_germ(v0, k0 + germ_quarter(aE), aE);

    auto germ_eq = [](const Germ& g, const Germ& h) {
        return g.square == h.square && g.p == h.p;  // directions equal by construction
    };

    // One gluing step. The image of square i's bottom (resp. left) edge is
    // traced from the anchor; the anchor of right(i) (resp. top(i)) is then
    // read off at the arrival vertex by rotating through the image of the
    // straight angle below (resp. right of) the shared edge. This stays
    // correct at cone vertices, where the chart-local continuation of the
    // traced line is not defined.
    auto edge_step = [&](int i, bool horizontal) -> std::pair<int, Germ> {
        Germ g0;
        Vec2q adir;
        if (horizontal) {
            g0 = act.e_anchor[i];
            adir = aE;
        } else {
            // image germ of (i, BL, N): rotate the anchor by XC(A e1 -> A e2].
            int c0 = corner_of_point(act.e_anchor[i].p);
            auto [v, k] = s.sector_vertex(act.e_anchor[i].square, c0);
            g0 = sector_germ(v, k + conv_crossings(aE, aN), aN);
            adir = aN;
        }
        TraceResult tr = trace_displacement(s, g0, adir);
        if (tr.truncated || !FlatSurface::is_corner_coords(tr.end.x, tr.end.y))
            return {-1, Germ{}};
        int tgt = horizontal ? s.right(i) : s.top(i);
        int vpre = s.sector_vertex(tgt, BL).first;
        long len = (long)s.vertex_cycle(vpre).size();
        Germ rev = normalize_germ(s, tr.end.square, Vec2q(tr.end.x, tr.end.y),
                                  Vec2q(-adir.x, -adir.y));
        auto [v2, k2] = s.sector_vertex(rev.square, corner_of_point(rev.p));
        if ((long)s.vertex_cycle(v2).size() != len) return {-1, Germ{}};
        long off = 0;
        if (horizontal) {
            // Rotate through the image of the straight angle below the edge.
            for (long m = 0; m + 2 < len; ++m) off += act.xc4[(2 + m) % 4];
        } else {
            off = act.xc4[3];
        }
        return {tgt, sector_germ(v2, k2 + off, aE)};
    };

    // Propagate over a spanning tree, then verify every edge relation, so a
    // wrong seed or a matrix outside the Veech group fails cleanly.
    std::vector<int> queue{i0};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        int i = queue[qi];
        for (bool horizontal : {true, false}) {
            auto [tgt, anchor] = edge_step(i, horizontal);
            if (tgt < 0) throw std::invalid_argument("propagate_origami: inconsistent propagation");
            if (act.e_anchor[tgt].square == -1) {
                act.e_anchor[tgt] = anchor;
                queue.push_back(tgt);
            }
        }
    }
    for (int i = 0; i < s.num_squares(); ++i)
        if (act.e_anchor[i].square == -1)
            throw std::invalid_argument("propagate_origami: propagation did not reach all squares");
    for (int i = 0; i < s.num_squares(); ++i)
        for (bool horizontal : {true, false}) {
            auto [tgt, anchor] = edge_step(i, horizontal);
            if (tgt < 0 || !germ_eq(anchor, act.e_anchor[tgt]))
                throw std::invalid_argument("propagate_origami: inconsistent propagation");
        }

    // Vertex images: the anchor of any square in the cycle determines them.
    act.vertex_image.assign(s.num_vertices(), -1);
    for (int i = 0; i < s.num_squares(); ++i) {
        int v = s.sector_vertex(i, BL).first;
        const Germ& an = act.e_anchor[i];
        int vi = s.sector_vertex(an.square, corner_of_point(an.p)).first;
        if (act.vertex_image[v] == -1)
            act.vertex_image[v] = vi;
        else if (act.vertex_image[v] != vi)
            throw std::invalid_argument("propagate_origami: vertex image mismatch");
    }
    for (int v = 0; v < s.num_vertices(); ++v) {
        int vi = act.vertex_image[v];
        if (vi < 0 || s.vertex_cycle(v).size() != s.vertex_cycle(vi).size())
            throw std::invalid_argument("propagate_origami: cone structure not preserved");
    }
    return act;
}

Germ PAMap::origami_germ_image(const OrigamiAction& act, const Sector& sec,
                               const Vec2q& dv) const {
    const FlatSurface& s = surface();
    auto [v, k] = s.sector_vertex(sec.square, sec.corner);
    const auto& cyc = s.vertex_cycle(v);
    // Reference BL sector is cycle[0]; its square owns the stored anchor.
    int ref_sq = cyc[0].square;
    const Germ& an = act.e_anchor[ref_sq];
    auto [v2, k2] = s.sector_vertex(an.square, corner_of_point(an.p));
    Vec2q aE = act.m.apply(Vec2q(QuadNum(1), QuadNum(0)));
    Vec2q adv = act.m.apply(dv);
    long off = 0;
    for (int q = 0; q < k; ++q) off += act.xc4[q % 4];
    off += conv_crossings(act.m.apply(quarter_ray(k % 4)), adv);
    const auto& icyc = s.vertex_cycle(v2);
    Sector tgt = icyc[(k2 + off) % (long)icyc.size()];
    if (tgt.corner != germ_quarter(adv))
        throw std::logic_error("origami_germ_image: sector type mismatch");
    auto tc = FlatSurface::corner_coords(tgt.corner);
    return normalize_germ(s, tgt.square, Vec2q(QuadNum((long)tc[0]), QuadNum((long)tc[1])), adv);
}

PAMap PAMap::make_origami(FlatSurface surf, Mat2 a, std::optional<std::pair<int, int>> seed) {
    PAMap m;
    m.surf_ = std::make_shared<FlatSurface>(std::move(surf));
    m.torus_ = false;
    m.mat_ = a;
    m.init_eigen();
    const FlatSurface& s = m.surface();
    std::shared_ptr<OrigamiAction> fwd;
    if (seed) {
        fwd = std::make_shared<OrigamiAction>(propagate_origami(s, a, seed->first, seed->second));
    } else {
        for (int j = 0; j < s.num_squares() && !fwd; ++j) {
            try {
                fwd = std::make_shared<OrigamiAction>(propagate_origami(s, a, 0, j));
            } catch (const std::invalid_argument&) {
            }
        }
        if (!fwd)
            throw std::invalid_argument(
                "make_origami: no consistent seed (matrix not in the Veech group?)");
    }
    m.act_fwd_ = fwd;

    // Inverse action: recover the anchors of f^-1 from the forward germ map.
    Mat2 ai = a.inverse();
    OrigamiAction inv;
    inv.m = ai;
    inv.e_anchor.assign(s.num_squares(), Germ{-1, {}, {}});
    Vec2q aiE = ai.apply(Vec2q(QuadNum(1), QuadNum(0)));
    for (int q = 0; q < 4; ++q)
        inv.xc4[q] = conv_crossings(ai.apply(quarter_ray(q)), ai.apply(quarter_ray(q + 1)));
    std::vector<int> vimg_inv(s.num_vertices(), -1);
    for (int v = 0; v < s.num_vertices(); ++v) vimg_inv[fwd->vertex_image[v]] = v;
    inv.vertex_image = vimg_inv;
    for (int i = 0; i < s.num_squares(); ++i) {
        Germ target = normalize_germ(s, i, Vec2q(QuadNum(0), QuadNum(0)), Vec2q(QuadNum(1), QuadNum(0)));
        int vt = s.sector_vertex(i, BL).first;
        int v = vimg_inv[vt];
        const auto& cyc = s.vertex_cycle(v);
        int want_type = germ_quarter(aiE);
        bool found = false;
        for (const Sector& sec : cyc) {
            if (sec.corner != want_type) continue;
            Germ g = m.origami_germ_image(*fwd, sec, aiE);
            // f maps the germ (sec, A^-1 E) to its image; we need the one
            // whose image is the E germ of square i.
            if (g.square == target.square && g.p == target.p) {
                auto tc = FlatSurface::corner_coords(sec.corner);
                inv.e_anchor[i] = normalize_germ(
                    s, sec.square, Vec2q(QuadNum((long)tc[0]), QuadNum((long)tc[1])), aiE);
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("make_origami: inverse anchor not found");
    }
    m.act_inv_ = std::make_shared<OrigamiAction>(std::move(inv));

    m.build_origami_singularities();
    m.build_separatrices();
    m.link_separatrix_images();
    return m;
}

void PAMap::build_origami_singularities() {
    const FlatSurface& s = surface();
    sing_.clear();
    std::vector<int> vert_to_sing(s.num_vertices(), -1);
    for (int v : s.cone_vertices()) {
        Singularity si;
        si.id = (int)sing_.size();
        si.is_cone = true;
        si.vertex = v;
        const Sector& sec = s.vertex_cycle(v)[0];
        auto cc = FlatSurface::corner_coords(sec.corner);
        si.point = s.canonical(
            SurfacePoint(sec.square, QuadNum((long)cc[0]), QuadNum((long)cc[1])));
        si.prongs = s.prongs(v);
        vert_to_sing[v] = si.id;
        sing_.push_back(si);
    }
    if (sing_.empty())
        throw std::invalid_argument(
            "make_origami: surface has no cone points; use make_torus for genus-1 data");
    for (auto& si : sing_) {
        int vi = act_fwd_->vertex_image[si.vertex];
        if (vert_to_sing[vi] < 0) throw std::logic_error("cone point image is not a cone point");
        si.image = vert_to_sing[vi];
    }
    std::vector<int> orbit(sing_.size(), -1);
    int norb = 0;
    for (int i = 0; i < (int)sing_.size(); ++i) {
        if (orbit[i] != -1) continue;
        int cur = i, len = 0;
        do {
            orbit[cur] = norb;
            cur = sing_[cur].image;
            ++len;
        } while (cur != i);
        int cur2 = i;
        do {
            sing_[cur2].period = len;
            cur2 = sing_[cur2].image;
        } while (cur2 != i);
        ++norb;
    }
    for (int i = 0; i < (int)sing_.size(); ++i) sing_[i].orbit = orbit[i];
}

// ---------------------------------------------------------------------------
// Separatrices

void PAMap::build_separatrices() {
    const FlatSurface& s = surface();
    sing_reps_.clear();
    for (const auto& si : sing_)
        for (const auto& r : s.representatives(si.point)) sing_reps_.push_back(r);

    for (int fol : {STABLE, UNSTABLE}) {
        seps_[fol].clear();
        const Vec2q& dv = dir(fol);
        for (const auto& si : sing_) {
            if (si.is_cone) {
                const auto& cyc = s.vertex_cycle(si.vertex);
                int prong = 0;
                for (int k = 0; k < (int)cyc.size(); ++k) {
                    const Sector& sec = cyc[k];
                    for (int sign : {+1, -1}) {
                        Vec2q g{dv.x * QuadNum((long)sign), dv.y * QuadNum((long)sign)};
                        if (cyc8(g) != 2 * sec.corner + 1) continue;  // open quadrant of corner
                        Separatrix sep;
                        sep.id = (int)seps_[fol].size();
                        sep.foliation = fol;
                        sep.sing = si.id;
                        sep.prong = prong++;
                        sep.sign = sign;
                        sep.sector = sec;
                        auto cc = FlatSurface::corner_coords(sec.corner);
                        sep.germ = normalize_germ(
                            s, sec.square, Vec2q(QuadNum((long)cc[0]), QuadNum((long)cc[1])), g);
                        sep.image = -1;
                        seps_[fol].push_back(sep);
                    }
                }
                if (prong != si.prongs)
                    throw std::logic_error("separatrix count does not match prong count");
            } else {
                for (int sign : {+1, -1}) {
                    Vec2q g{dv.x * QuadNum((long)sign), dv.y * QuadNum((long)sign)};
                    Separatrix sep;
                    sep.id = (int)seps_[fol].size();
                    sep.foliation = fol;
                    sep.sing = si.id;
                    sep.prong = sign > 0 ? 0 : 1;
                    sep.sign = sign;
                    sep.sector = Sector{-1, -1};
                    sep.germ = normalize_germ(s, si.point.square, Vec2q(si.point.x, si.point.y), g);
                    sep.image = -1;
                    seps_[fol].push_back(sep);
                }
            }
        }
        cache_[fol].assign(seps_[fol].size(), SepCache{});
    }
}

void PAMap::link_separatrix_images() {
    const FlatSurface& s = surface();
    for (int fol : {STABLE, UNSTABLE}) {
        for (auto& sep : seps_[fol]) {
            const Singularity& base = sing_[sep.sing];
            int img_sign = sep.sign * eig_sign_;
            int img_sing = base.image;
            int found = -1;
            if (base.is_cone) {
                Germ ig = origami_germ_image(*act_fwd_, sep.sector,
                                             Vec2q(dir(fol).x * QuadNum((long)sep.sign),
                                                   dir(fol).y * QuadNum((long)sep.sign)));
                for (const auto& cand : seps_[fol]) {
                    if (cand.sing != img_sing || cand.sign != img_sign) continue;
                    if (cand.germ.square == ig.square && cand.germ.p == ig.p) {
                        found = cand.id;
                        break;
                    }
                }
            } else {
                for (const auto& cand : seps_[fol]) {
                    if (cand.sing == img_sing && cand.sign == img_sign) {
                        found = cand.id;
                        break;
                    }
                }
            }
            if (found < 0) throw std::logic_error("separatrix image not found");
            sep.image = found;
        }
        // The image assignment must be a bijection.
        std::set<int> imgs;
        for (const auto& sep : seps_[fol]) imgs.insert(sep.image);
        if ((int)imgs.size() != (int)seps_[fol].size())
            throw std::logic_error("separatrix image map is not a bijection");
    }
}

// ---------------------------------------------------------------------------
// Leaf tracing with per-separatrix caches

void PAMap::extend_cache(int foliation, int sep, const QuadNum& to) const {
    SepCache& c = cache_[foliation][sep];
    if (c.chunks.empty()) {
        c.length = QuadNum(0);
        c.cont = seps_[foliation][sep].germ;
    }
    while (c.length < to) {
        QuadNum step = to - c.length;
        if (step < QuadNum(1)) step = QuadNum(1);
        Vec2q disp{c.cont.dir.x * step, c.cont.dir.y * step};
        TraceResult tr = trace_displacement(surface(), c.cont, disp, &sing_reps_);
        if (tr.truncated)
            throw std::logic_error("leaf ray met a singularity (impossible for rational data)");
        for (auto& ch : tr.chunks) {
            LeafChunk abs = ch;
            abs.t0 = c.length + ch.t0 * step;
            abs.t1 = c.length + ch.t1 * step;
            c.chunks.push_back(abs);
        }
        c.length += step;
        c.cont = tr.final_germ;
        c.cont.dir = seps_[foliation][sep].germ.dir;
    }
}

SurfacePoint PAMap::point_at(int foliation, int sep, const QuadNum& pos) const {
    if (pos.sign() < 0) throw std::invalid_argument("point_at: negative position");
    if (pos.is_zero()) return sing_[seps_[foliation][sep].sing].point;
    extend_cache(foliation, sep, pos);
    const SepCache& c = cache_[foliation][sep];
    // Binary search for the chunk containing pos.
    int lo = 0, hi = (int)c.chunks.size() - 1;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        if (c.chunks[mid].t1 < pos)
            lo = mid + 1;
        else
            hi = mid;
    }
    const LeafChunk& ch = c.chunks[lo];
    QuadNum t = pos - ch.t0;
    const Vec2q& d = seps_[foliation][sep].germ.dir;
    return SurfacePoint(ch.square, ch.a.x + d.x * t, ch.a.y + d.y * t);
}

MeasuredChunks PAMap::sep_chunks(int foliation, int sep, const QuadNum& lo,
                                 const QuadNum& hi) const {
    if (lo.sign() < 0 || hi < lo) throw std::invalid_argument("sep_chunks: bad interval");
    MeasuredChunks out;
    if (hi == lo) return out;
    extend_cache(foliation, sep, hi);
    const SepCache& c = cache_[foliation][sep];
    const Vec2q& d = seps_[foliation][sep].germ.dir;
    for (const auto& ch : c.chunks) {
        if (ch.t1 <= lo || ch.t0 >= hi) continue;
        LeafChunk cl = ch;
        if (ch.t0 < lo) {
            cl.t0 = lo;
            cl.a = Vec2q{ch.a.x + d.x * (lo - ch.t0), ch.a.y + d.y * (lo - ch.t0)};
        }
        if (ch.t1 > hi) {
            cl.t1 = hi;
            cl.b = Vec2q{ch.a.x + d.x * (hi - ch.t0), ch.a.y + d.y * (hi - ch.t0)};
        }
        out.m0.push_back(cl.t0);
        out.m1.push_back(cl.t1);
        out.chunks.push_back(std::move(cl));
    }
    return out;
}

LeafArcData PAMap::sep_arc(int foliation, int sep, const QuadNum& lo, const QuadNum& hi) const {
    LeafArcData a;
    a.foliation = foliation;
    a.sep = sep;
    a.lo = lo;
    a.hi = hi;
    a.chunks = sep_chunks(foliation, sep, lo, hi);
    return a;
}

LeafArcData PAMap::trace_leaf(int foliation, int sep, const QuadNum& from, const QuadNum& to) const {
    return sep_arc(foliation, sep, from, to);
}

// ---------------------------------------------------------------------------
// Point action

int PAMap::singularity_at(const SurfacePoint& p) const {
    for (const auto& si : sing_)
        if (surface().same_point(si.point, p)) return si.id;
    return -1;
}

SurfacePoint PAMap::apply_origami_once(const SurfacePoint& p, bool inverse) const {
    const FlatSurface& s = surface();
    const OrigamiAction& act = inverse ? *act_inv_ : *act_fwd_;
    if (FlatSurface::is_corner_coords(p.x, p.y)) {
        int v = s.vertex_at(p);
        int vi = act.vertex_image[v];
        const Sector& sec = s.vertex_cycle(vi)[0];
        auto cc = FlatSurface::corner_coords(sec.corner);
        return s.canonical(SurfacePoint(sec.square, QuadNum((long)cc[0]), QuadNum((long)cc[1])));
    }
    // Anchor at the square's BL corner: trace the image of the straight
    // segment from the corner to p.
    Vec2q dv{p.x, p.y};
    Germ g = origami_germ_image(act, Sector{p.square, BL}, dv);
    TraceResult tr = trace_displacement(s, g, act.m.apply(dv));
    if (tr.truncated) throw std::logic_error("apply: image segment met a cone point");
    return s.canonical(tr.end);
}

SurfacePoint PAMap::apply(const SurfacePoint& p, long power) const {
    SurfacePoint cur = surface().canonical(p);
    bool inv = power < 0;
    for (long i = 0; i < (inv ? -power : power); ++i)
        cur = torus_ ? apply_torus_once(cur, inv) : apply_origami_once(cur, inv);
    return cur;
}

}  // namespace pam
