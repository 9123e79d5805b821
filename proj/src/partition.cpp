#include "pamarkov/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>

namespace pam {

namespace {

struct PointLess {
    bool operator()(const Vec2q& a, const Vec2q& b) const {
        int c = a.x.cmp(b.x);
        if (c != 0) return c < 0;
        return a.y.cmp(b.y) < 0;
    }
};

struct QLess {
    bool operator()(const QuadNum& a, const QuadNum& b) const { return a.cmp(b) < 0; }
};

struct BBox {
    double xlo, xhi, ylo, yhi;
    bool disjoint(const BBox& o) const {
        return xhi < o.xlo || o.xhi < xlo || yhi < o.ylo || o.yhi < ylo;
    }
};

BBox bbox_of(const std::vector<Vec2q>& pts) {
    BBox b{1e300, -1e300, 1e300, -1e300};
    for (const Vec2q& p : pts) {
        auto ix = p.x.approx_interval(), iy = p.y.approx_interval();
        b.xlo = std::min(b.xlo, ix.first);
        b.xhi = std::max(b.xhi, ix.second);
        b.ylo = std::min(b.ylo, iy.first);
        b.yhi = std::max(b.yhi, iy.second);
    }
    return b;
}

BBox bbox_of_seg(const Vec2q& a, const Vec2q& b) { return bbox_of({a, b}); }

struct Seg {
    Vec2q a, b;
    int kind;  // 0 stable, 1 unstable, 2 boundary
    int sep = -1;
    QuadNum m0, m1;
};

struct Edge {
    int u, v;
    int kind;
    int sep;
    QuadNum mu, mv;
};

struct SquareArr {
    std::vector<Vec2q> nodes;
    std::map<Vec2q, int, PointLess> node_id;
    std::vector<Edge> edges;
    std::vector<int> cell_of_he;                // per half-edge (2*e, 2*e+1)
    std::vector<std::vector<int>> cell_cycles;  // per local cell, list of half-edges
    int ncells = 0;
};

int he_from(const SquareArr& A, int he) {
    const Edge& e = A.edges[he / 2];
    return he % 2 == 0 ? e.u : e.v;
}
int he_to(const SquareArr& A, int he) {
    const Edge& e = A.edges[he / 2];
    return he % 2 == 0 ? e.v : e.u;
}

// Exact CCW ordering of nonzero directions.
bool dir_less(const Vec2q& a, const Vec2q& b) {
    auto cyc = [](const Vec2q& v) {
        int sx = v.x.sign(), sy = v.y.sign();
        if (sx > 0 && sy == 0) return 0;
        if (sx > 0 && sy > 0) return 1;
        if (sx == 0 && sy > 0) return 2;
        if (sx < 0 && sy > 0) return 3;
        if (sx < 0 && sy == 0) return 4;
        if (sx < 0 && sy < 0) return 5;
        if (sx == 0 && sy < 0) return 6;
        return 7;
    };
    int ca = cyc(a), cb = cyc(b);
    if (ca != cb) return ca < cb;
    return a.cross_sign(b) > 0;
}

QuadNum shoelace2(const std::vector<Vec2q>& poly) {
    QuadNum s(0);
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2q& p = poly[i];
        const Vec2q& q = poly[(i + 1) % poly.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return s;  // twice the signed area
}

}  // namespace

// ---------------------------------------------------------------------------
// Rectangle extraction

std::vector<PRect> extract_rectangles(const PAMap& map, const StarGraph& gs_eff,
                                      const StarGraph& gu_eff) {
    const FlatSurface& S = map.surface();
    const int nsq = S.num_squares();
    const QuadNum zero(0), one(1);

    // Segments per square: boundary frame plus all graph chunks.
    std::vector<std::vector<Seg>> segs(nsq);
    for (int sq = 0; sq < nsq; ++sq) {
        Vec2q c00(zero, zero), c10(one, zero), c11(one, one), c01(zero, one);
        segs[sq].push_back(Seg{c00, c10, 2});
        segs[sq].push_back(Seg{c10, c11, 2});
        segs[sq].push_back(Seg{c01, c11, 2});
        segs[sq].push_back(Seg{c00, c01, 2});
    }
    for (const StarGraph* g : {&gs_eff, &gu_eff}) {
        for (int i = 0; i < (int)g->len.size(); ++i) {
            if (g->len[i].sign() <= 0) continue;
            MeasuredChunks mc = map.sep_chunks(g->foliation, i, zero, g->len[i]);
            for (size_t k = 0; k < mc.chunks.size(); ++k) {
                const LeafChunk& ch = mc.chunks[k];
                segs[ch.square].push_back(
                    Seg{ch.a, ch.b, g->foliation == STABLE ? 0 : 1, i, mc.m0[k], mc.m1[k]});
            }
        }
    }

    // Node set with per-segment memberships recorded at creation: segment
    // endpoints, stable x unstable crossings (bbox-prefiltered exact
    // solves), and gluing-propagated edge subdivision points. Leaf chunks
    // never run along square edges (eigen slopes are irrational), so these
    // are the only incidences.
    struct NodeAcc {
        std::map<Vec2q, int, PointLess> id;
        std::vector<Vec2q> pts;
        std::vector<std::vector<std::pair<int, QuadNum>>> on_seg;  // per segment: (node, param)
        int get(const Vec2q& p) {
            auto [it, fresh] = id.emplace(p, (int)pts.size());
            if (fresh) pts.push_back(p);
            return it->second;
        }
    };
    std::vector<NodeAcc> acc(nsq);
    auto note_on = [&](int sq, int seg_idx, const Vec2q& p, const QuadNum& t) {
        int ni = acc[sq].get(p);
        acc[sq].on_seg[seg_idx].push_back({ni, t});
    };
    for (int sq = 0; sq < nsq; ++sq) {
        acc[sq].on_seg.resize(segs[sq].size());
        std::vector<BBox> segbb;
        segbb.reserve(segs[sq].size());
        for (const Seg& s : segs[sq]) segbb.push_back(bbox_of_seg(s.a, s.b));
        for (int si = 0; si < (int)segs[sq].size(); ++si) {
            const Seg& s = segs[sq][si];
            note_on(sq, si, s.a, zero);
            note_on(sq, si, s.b, one);
            // Graph endpoints on square edges subdivide boundary edges too.
            for (const Vec2q& p : {s.a, s.b}) {
                if (s.kind != 2) {
                    if (p.y.is_zero()) note_on(sq, 0, p, p.x);
                    if (p.x == one) note_on(sq, 1, p, p.y);
                    if (p.y == one) note_on(sq, 2, p, p.x);
                    if (p.x.is_zero()) note_on(sq, 3, p, p.y);
                }
            }
        }
        for (int si = 0; si < (int)segs[sq].size(); ++si) {
            const Seg& s = segs[sq][si];
            if (s.kind != 0) continue;
            Vec2q u = s.b - s.a;
            for (int ti = 0; ti < (int)segs[sq].size(); ++ti) {
                const Seg& t = segs[sq][ti];
                if (t.kind != 1 || segbb[si].disjoint(segbb[ti])) continue;
                Vec2q v = t.b - t.a;
                QuadNum det = u.x * v.y - u.y * v.x;
                if (det.sign() == 0) continue;
                Vec2q w = t.a - s.a;
                QuadNum tt = (w.x * v.y - w.y * v.x) / det;
                QuadNum rr = (w.x * u.y - w.y * u.x) / det;
                if (tt.sign() < 0 || (tt - one).sign() > 0 || rr.sign() < 0 ||
                    (rr - one).sign() > 0)
                    continue;
                Vec2q p{s.a.x + u.x * tt, s.a.y + u.y * tt};
                note_on(sq, si, p, tt);
                note_on(sq, ti, p, rr);
            }
        }
    }
    // Propagate edge nodes to the glued partner edges (their boundary
    // subdivisions must agree; edge nodes only ever land on edges).
    for (int sq = 0; sq < nsq; ++sq) {
        std::vector<Vec2q> pts = acc[sq].pts;
        for (const Vec2q& p : pts) {
            if (p.y.is_zero()) note_on(S.top_inv(sq), 2, Vec2q{p.x, one}, p.x);
            if (p.x == one) note_on(S.right(sq), 3, Vec2q{zero, p.y}, p.y);
            if (p.y == one) note_on(S.top(sq), 0, Vec2q{p.x, zero}, p.x);
            if (p.x.is_zero()) note_on(S.right_inv(sq), 1, Vec2q{one, p.y}, p.y);
        }
    }

    // Build edges by splitting segments at their incident nodes, then the
    // rotation system and the face cycles.
    std::vector<SquareArr> arr(nsq);
    for (int sq = 0; sq < nsq; ++sq) {
        SquareArr& A = arr[sq];
        A.nodes = acc[sq].pts;
        A.node_id = acc[sq].id;
        for (int si = 0; si < (int)segs[sq].size(); ++si) {
            const Seg& s = segs[sq][si];
            auto& on = acc[sq].on_seg[si];
            std::sort(on.begin(), on.end(),
                      [](const auto& l, const auto& r) { return l.second.cmp(r.second) < 0; });
            on.erase(std::unique(on.begin(), on.end(),
                                 [](const auto& l, const auto& r) { return l.first == r.first; }),
                     on.end());
            for (size_t k = 0; k + 1 < on.size(); ++k) {
                Edge e;
                e.u = on[k].first;
                e.v = on[k + 1].first;
                e.kind = s.kind;
                e.sep = s.sep;
                if (s.kind != 2) {
                    e.mu = s.m0 + on[k].second * (s.m1 - s.m0);
                    e.mv = s.m0 + on[k + 1].second * (s.m1 - s.m0);
                }
                A.edges.push_back(e);
            }
        }
        // Dedup identical edges (chunks can repeat when graphs share a
        // separatrix arc).
        std::sort(A.edges.begin(), A.edges.end(), [](const Edge& a, const Edge& b) {
            if (a.u != b.u) return a.u < b.u;
            if (a.v != b.v) return a.v < b.v;
            return a.kind < b.kind;
        });
        A.edges.erase(std::unique(A.edges.begin(), A.edges.end(),
                                  [](const Edge& a, const Edge& b) {
                                      return a.u == b.u && a.v == b.v && a.kind == b.kind &&
                                             a.sep == b.sep;
                                  }),
                      A.edges.end());

        // Rotation system.
        std::vector<std::vector<int>> out(A.nodes.size());  // half-edges per node
        for (int e = 0; e < (int)A.edges.size(); ++e) {
            out[A.edges[e].u].push_back(2 * e);
            out[A.edges[e].v].push_back(2 * e + 1);
        }
        auto he_dir = [&](int he) {
            return Vec2q{A.nodes[he_to(A, he)].x - A.nodes[he_from(A, he)].x,
                         A.nodes[he_to(A, he)].y - A.nodes[he_from(A, he)].y};
        };
        for (auto& v : out)
            std::sort(v.begin(), v.end(),
                      [&](int h1, int h2) { return dir_less(he_dir(h1), he_dir(h2)); });
        // next(h): at head(h), the out-edge immediately clockwise of rev(h).
        std::vector<int> nxt(2 * A.edges.size(), -1);
        for (int he = 0; he < (int)nxt.size(); ++he) {
            int v = he_to(A, he);
            int rev = he ^ 1;
            const auto& ring = out[v];
            int pos = -1;
            for (int k = 0; k < (int)ring.size(); ++k)
                if (ring[k] == rev) pos = k;
            if (pos < 0) throw std::logic_error("arrangement: rotation ring broken");
            nxt[he] = ring[(pos + (int)ring.size() - 1) % ring.size()];
        }
        A.cell_of_he.assign(2 * A.edges.size(), -1);
        for (int he = 0; he < (int)A.cell_of_he.size(); ++he) {
            if (A.cell_of_he[he] != -1) continue;
            std::vector<int> cyc;
            int cur = he;
            do {
                cyc.push_back(cur);
                A.cell_of_he[cur] = -2;  // visiting
                cur = nxt[cur];
            } while (cur != he);
            // Signed area decides interior cells vs the outer walk.
            std::vector<Vec2q> poly;
            for (int h : cyc) poly.push_back(A.nodes[he_from(A, h)]);
            int sgn = shoelace2(poly).sign();
            if (sgn > 0) {
                int id = A.ncells++;
                for (int h : cyc) A.cell_of_he[h] = id;
                A.cell_cycles.push_back(cyc);
            } else {
                bool all_boundary = true;
                for (int h : cyc)
                    if (A.edges[h / 2].kind != 2) all_boundary = false;
                if (!all_boundary)
                    throw AssemblyError(
                        "arrangement: floating boundary component (graphs incompatible?)");
                for (int h : cyc) A.cell_of_he[h] = -1;
            }
        }
    }

    // Glue cells across square edges (union-find on global cell ids).
    std::vector<int> base(nsq + 1, 0);
    for (int sq = 0; sq < nsq; ++sq) base[sq + 1] = base[sq] + arr[sq].ncells;
    int total = base[nsq];
    std::vector<int> uf(total);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    auto unite = [&](int a, int b) { uf[find(a)] = find(b); };

    struct Glue {
        int cell_a, cell_b;  // global ids
        int sq_a;            // chart of side a
        int dir;             // 0: a's right edge -> right(sq), 1: a's top edge
    };
    std::vector<Glue> glues;
    for (int sq = 0; sq < nsq; ++sq) {
        SquareArr& A = arr[sq];
        for (int e = 0; e < (int)A.edges.size(); ++e) {
            if (A.edges[e].kind != 2) continue;
            const Vec2q& pa = A.nodes[A.edges[e].u];
            const Vec2q& pb = A.nodes[A.edges[e].v];
            int dir;
            int tsq;
            Vec2q qa, qb;
            if (pa.x == one && pb.x == one) {
                dir = 0;
                tsq = S.right(sq);
                qa = Vec2q{zero, pa.y};
                qb = Vec2q{zero, pb.y};
            } else if (pa.y == one && pb.y == one) {
                dir = 1;
                tsq = S.top(sq);
                qa = Vec2q{pa.x, zero};
                qb = Vec2q{pb.x, zero};
            } else {
                continue;  // left/bottom edges are handled from the partner side
            }
            SquareArr& B = arr[tsq];
            auto ia = B.node_id.find(qa), ib = B.node_id.find(qb);
            if (ia == B.node_id.end() || ib == B.node_id.end())
                throw std::logic_error("arrangement: gluing nodes missing");
            int pe = -1;
            for (int e2 = 0; e2 < (int)B.edges.size(); ++e2) {
                const Edge& E2 = B.edges[e2];
                if (E2.kind != 2) continue;
                if ((E2.u == ia->second && E2.v == ib->second) ||
                    (E2.u == ib->second && E2.v == ia->second)) {
                    pe = e2;
                    break;
                }
            }
            if (pe < 0) throw std::logic_error("arrangement: partner edge missing");
            int ca = std::max(A.cell_of_he[2 * e], A.cell_of_he[2 * e + 1]);
            int cb = std::max(B.cell_of_he[2 * pe], B.cell_of_he[2 * pe + 1]);
            if (ca < 0 || cb < 0) throw std::logic_error("arrangement: boundary piece without cell");
            unite(base[sq] + ca, base[tsq] + cb);
            glues.push_back(Glue{base[sq] + ca, base[tsq] + cb, sq, dir});
        }
    }

    // Development offsets per global cell, face by face.
    Vec2q e1{one, zero}, e2{zero, one};
    QuadNum du_e1 = map.du(e1), ds_e1 = map.ds(e1);
    QuadNum du_e2 = map.du(e2), ds_e2 = map.ds(e2);
    std::map<int, std::vector<int>> faces;  // root -> global cells
    for (int c = 0; c < total; ++c) faces[find(c)].push_back(c);
    std::vector<std::vector<Glue>> glue_of_face_idx;
    std::map<int, int> root_index;
    {
        int idx = 0;
        for (auto& [root, cells] : faces) root_index[root] = idx++;
        glue_of_face_idx.resize(faces.size());
        for (const Glue& g : glues) glue_of_face_idx[root_index[find(g.cell_a)]].push_back(g);
    }

    std::vector<PRect> rects;
    for (auto& [root, cells] : faces) {
        std::map<int, std::pair<QuadNum, QuadNum>> off;  // global cell -> (off_u, off_s)
        off[cells[0]] = {QuadNum(0), QuadNum(0)};
        const auto& gl = glue_of_face_idx[root_index[root]];
        bool progress = true;
        while (progress) {
            progress = false;
            for (const Glue& g : gl) {
                QuadNum d_u = g.dir == 0 ? du_e1 : du_e2;
                QuadNum d_s = g.dir == 0 ? ds_e1 : ds_e2;
                auto a = off.find(g.cell_a), b = off.find(g.cell_b);
                if (a != off.end() && b == off.end()) {
                    off[g.cell_b] = {a->second.first + d_u, a->second.second + d_s};
                    progress = true;
                } else if (b != off.end() && a == off.end()) {
                    off[g.cell_a] = {b->second.first - d_u, b->second.second - d_s};
                    progress = true;
                } else if (a != off.end() && b != off.end()) {
                    if (!(a->second.first + d_u == b->second.first &&
                          a->second.second + d_s == b->second.second))
                        throw AssemblyError("face development inconsistent (not a disk)");
                }
            }
        }
        if ((int)off.size() != (int)cells.size())
            throw AssemblyError("face development incomplete");

        PRect r;
        QuadNum area2(0);
        bool first = true;
        auto em_u = [&](const Vec2q& p) { return map.du(p); };
        auto em_s = [&](const Vec2q& p) { return map.ds(p); };
        // Developed cells and the bounding box.
        for (int c : cells) {
            int sq = int(std::upper_bound(base.begin(), base.end(), c) - base.begin()) - 1;
            int local = c - base[sq];
            const SquareArr& A = arr[sq];
            DevCell dc;
            dc.square = sq;
            dc.off_u = off[c].first;
            dc.off_s = off[c].second;
            for (int h : A.cell_cycles[local]) dc.poly.push_back(A.nodes[he_from(A, h)]);
            std::vector<Vec2q> dev;
            for (const Vec2q& p : dc.poly) {
                QuadNum u = dc.off_u + em_u(p), s = dc.off_s + em_s(p);
                if (first) {
                    r.u1 = r.u2 = u;
                    r.s1 = r.s2 = s;
                    first = false;
                } else {
                    if (u < r.u1) r.u1 = u;
                    if (u > r.u2) r.u2 = u;
                    if (s < r.s1) r.s1 = s;
                    if (s > r.s2) r.s2 = s;
                }
                dev.push_back(Vec2q{s, u});  // develop as (horizontal, vertical)
            }
            area2 += shoelace2(dev).abs();
            r.cells.push_back(std::move(dc));
        }
        if (area2 != (r.u2 - r.u1) * (r.s2 - r.s1) * QuadNum(2))
            throw AssemblyError("face does not fill its development box");

        // Graph edges must develop onto the box boundary; collect side arcs.
        std::vector<std::pair<QuadNum, SideArc>> side_s[2], side_u[2];
        for (size_t ci = 0; ci < cells.size(); ++ci) {
            int c = cells[ci];
            int sq = r.cells[ci].square;
            const SquareArr& A = arr[sq];
            int local = c - base[sq];
            for (int h : A.cell_cycles[local]) {
                const Edge& e = A.edges[h / 2];
                if (e.kind == 2) continue;
                QuadNum ua = r.cells[ci].off_u + em_u(A.nodes[e.u]);
                QuadNum sa = r.cells[ci].off_s + em_s(A.nodes[e.u]);
                QuadNum ub = r.cells[ci].off_u + em_u(A.nodes[e.v]);
                QuadNum sb = r.cells[ci].off_s + em_s(A.nodes[e.v]);
                SideArc arc{e.sep, e.mu < e.mv ? e.mu : e.mv, e.mu < e.mv ? e.mv : e.mu};
                if (e.kind == 0) {
                    if (!(ua == ub)) throw std::logic_error("stable edge not horizontal");
                    int which = ua == r.u1 ? 0 : (ua == r.u2 ? 1 : -1);
                    if (which < 0) throw AssemblyError("stable arc inside a face");
                    side_s[which].push_back({sa < sb ? sa : sb, arc});
                } else {
                    if (!(sa == sb)) throw std::logic_error("unstable edge not vertical");
                    int which = sa == r.s1 ? 0 : (sa == r.s2 ? 1 : -1);
                    if (which < 0) throw AssemblyError("unstable arc inside a face");
                    side_u[which].push_back({ua < ub ? ua : ub, arc});
                }
            }
        }
        auto finish_side = [](std::vector<std::pair<QuadNum, SideArc>>& v) {
            std::sort(v.begin(), v.end(), [](const auto& l, const auto& r) {
                int c = l.first.cmp(r.first);
                if (c != 0) return c < 0;
                return l.second.lo.cmp(r.second.lo) < 0;
            });
            std::vector<SideArc> out;
            for (auto& [pos, a] : v) {
                if (!out.empty() && out.back().sep == a.sep && out.back().hi == a.lo)
                    out.back().hi = a.hi;
                else if (!out.empty() && out.back().sep == a.sep && out.back().lo == a.hi)
                    out.back().lo = a.lo;
                else
                    out.push_back(a);
            }
            return out;
        };
        for (int w : {0, 1}) {
            r.side_stable[w] = finish_side(side_s[w]);
            r.side_unstable[w] = finish_side(side_u[w]);
            if (r.side_stable[w].empty() || r.side_unstable[w].empty())
                throw AssemblyError("face side without graph arcs");
        }

        // Corners: developed box corners realized by cell vertices.
        bool have[2][2] = {{false, false}, {false, false}};
        for (const DevCell& dc : r.cells) {
            for (const Vec2q& p : dc.poly) {
                QuadNum u = dc.off_u + em_u(p), s = dc.off_s + em_s(p);
                int si = s == r.s1 ? 0 : (s == r.s2 ? 1 : -1);
                int ui = u == r.u1 ? 0 : (u == r.u2 ? 1 : -1);
                if (si >= 0 && ui >= 0 && !have[si][ui]) {
                    r.corner[si][ui] = S.canonical(SurfacePoint(dc.square, p.x, p.y));
                    have[si][ui] = true;
                }
            }
        }
        if (!(have[0][0] && have[0][1] && have[1][0] && have[1][1]))
            throw AssemblyError("face corner not realized by a cell vertex");

        // Interior witness: centroid of the first cell (cells are convex).
        {
            const DevCell& dc = r.cells[0];
            QuadNum cx(0), cy(0);
            for (const Vec2q& p : dc.poly) {
                cx += p.x;
                cy += p.y;
            }
            QuadNum k((long)dc.poly.size());
            r.witness = SurfacePoint(dc.square, cx / k, cy / k);
        }
        rects.push_back(std::move(r));
    }

    std::sort(rects.begin(), rects.end(), [&](const PRect& a, const PRect& b) {
        return rect_key(map, a) < rect_key(map, b);
    });
    for (int i = 0; i < (int)rects.size(); ++i) rects[i].id = i;
    return rects;
}

MarkovPartition build_partition(const PAMap& map, const GraphData& gd, long n) {
    if (n < gd.coeff.n)
        throw std::invalid_argument("build_partition: n < n(z)");
    MarkovPartition mp;
    mp.n = n;
    mp.z = gd.z;
    mp.gs = gd.gs.g;
    mp.gu = gd.gu.g;
    mp.gu_eff = iterate_graph(map, gd.gu.g, n);
    mp.rects = extract_rectangles(map, mp.gs, mp.gu_eff);
    QuadNum total(0);
    for (const auto& r : mp.rects) total += r.area();
    if (total != map.eigen_area())
        throw AssemblyError("partition areas do not sum to the surface area");
    return mp;
}

// ---------------------------------------------------------------------------
// Cuts and validators

namespace {

// Clip the segment [a,b] (chart coords) to a convex CCW polygon; returns the
// parameter interval [t0,t1] or nothing.
std::optional<std::pair<QuadNum, QuadNum>> clip_to_poly(const Vec2q& a, const Vec2q& b,
                                                        const std::vector<Vec2q>& poly) {
    QuadNum t0(0), t1(1);
    Vec2q d = b - a;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2q& p = poly[i];
        const Vec2q& q = poly[(i + 1) % poly.size()];
        Vec2q ev = q - p;
        // inside: cross(ev, x - p) >= 0
        QuadNum f0 = ev.x * (a.y - p.y) - ev.y * (a.x - p.x);
        QuadNum f1 = ev.x * (b.y - p.y) - ev.y * (b.x - p.x);
        int s0 = f0.sign(), s1 = f1.sign();
        if (s0 < 0 && s1 < 0) return std::nullopt;
        if (s0 >= 0 && s1 >= 0) continue;
        QuadNum ts = f0 / (f0 - f1);
        if (s0 < 0) {
            if (ts > t0) t0 = ts;
        } else {
            if (ts < t1) t1 = ts;
        }
        if (t1 <= t0) return std::nullopt;
    }
    if (t1 <= t0) return std::nullopt;
    return std::make_pair(t0, t1);
}

}  // namespace

namespace {

// One clipped piece of a graph chunk inside a cell, in developed frame.
std::optional<DevPiece> clip_piece(const PAMap& map, const DevCell& dc, bool vertical,
                                   const LeafChunk& ch, int sep, const QuadNum& m0,
                                   const QuadNum& m1) {
    auto clip = clip_to_poly(ch.a, ch.b, dc.poly);
    if (!clip) return std::nullopt;
    auto [t0, t1] = *clip;
    Vec2q pa{ch.a.x + (ch.b.x - ch.a.x) * t0, ch.a.y + (ch.b.y - ch.a.y) * t0};
    Vec2q pb{ch.a.x + (ch.b.x - ch.a.x) * t1, ch.a.y + (ch.b.y - ch.a.y) * t1};
    QuadNum ua = dc.off_u + map.du(pa), ub = dc.off_u + map.du(pb);
    QuadNum sa = dc.off_s + map.ds(pa), sb = dc.off_s + map.ds(pb);
    DevPiece piece;
    piece.sep = sep;
    QuadNum ma = m0 + (m1 - m0) * t0;
    QuadNum mb = m0 + (m1 - m0) * t1;
    piece.pos_lo = ma < mb ? ma : mb;
    piece.pos_hi = ma < mb ? mb : ma;
    if (vertical) {
        if (!(sa == sb)) throw std::logic_error("partition_cuts: skewed piece");
        piece.level = sa;
        piece.span_lo = ua < ub ? ua : ub;
        piece.span_hi = ua < ub ? ub : ua;
    } else {
        if (!(ua == ub)) throw std::logic_error("partition_cuts: skewed piece");
        piece.level = ua;
        piece.span_lo = sa < sb ? sa : sb;
        piece.span_hi = sa < sb ? sb : sa;
    }
    if (piece.span_hi == piece.span_lo) return std::nullopt;  // corner touch
    return piece;
}

std::vector<CutLine> assemble_cut_lines(const PRect& r, bool vertical,
                                        std::map<QuadNum, std::vector<DevPiece>, QLess>& lines) {
    QuadNum lvl_lo = vertical ? r.s1 : r.u1, lvl_hi = vertical ? r.s2 : r.u2;
    QuadNum span_lo = vertical ? r.u1 : r.s1, span_hi = vertical ? r.u2 : r.s2;
    std::vector<CutLine> out;
    for (auto& [level, pieces] : lines) {
        if (level == lvl_lo || level == lvl_hi) continue;  // the rectangle's own sides
        if (level < lvl_lo || level > lvl_hi)
            throw std::logic_error("partition_cuts: level outside the rectangle");
        CutLine cl;
        cl.level = level;
        cl.pieces = std::move(pieces);
        std::sort(cl.pieces.begin(), cl.pieces.end(),
                  [](const DevPiece& a, const DevPiece& b) { return a.span_lo.cmp(b.span_lo) < 0; });
        QuadNum cov = span_lo;
        bool full = true;
        for (const DevPiece& p : cl.pieces) {
            if (p.span_lo > cov) {
                full = false;
                break;
            }
            if (p.span_hi > cov) cov = p.span_hi;
        }
        cl.full = full && cov == span_hi;
        out.push_back(std::move(cl));
    }
    return out;
}

}  // namespace

std::vector<std::vector<CutLine>> partition_cuts(const PAMap& map, const MarkovPartition& mp,
                                                 const StarGraph& g) {
    const bool vertical = g.foliation == UNSTABLE;
    // Per-square index of (rect, cell) with bounding boxes.
    struct Entry {
        int rect;
        int cell;
        BBox bb;
    };
    std::vector<std::vector<Entry>> index(map.surface().num_squares());
    for (const PRect& r : mp.rects)
        for (int ci = 0; ci < (int)r.cells.size(); ++ci)
            index[r.cells[ci].square].push_back(Entry{r.id, ci, bbox_of(r.cells[ci].poly)});

    std::vector<std::map<QuadNum, std::vector<DevPiece>, QLess>> lines(mp.rects.size());
    for (int sep = 0; sep < (int)g.len.size(); ++sep) {
        if (g.len[sep].sign() <= 0) continue;
        MeasuredChunks mc = map.sep_chunks(g.foliation, sep, QuadNum(0), g.len[sep]);
        for (size_t k = 0; k < mc.chunks.size(); ++k) {
            const LeafChunk& ch = mc.chunks[k];
            BBox chb = bbox_of_seg(ch.a, ch.b);
            for (const Entry& e : index[ch.square]) {
                if (chb.disjoint(e.bb)) continue;
                auto piece = clip_piece(map, mp.rects[e.rect].cells[e.cell], vertical, ch, sep,
                                        mc.m0[k], mc.m1[k]);
                if (piece) lines[e.rect][piece->level].push_back(*piece);
            }
        }
    }
    std::vector<std::vector<CutLine>> out(mp.rects.size());
    for (const PRect& r : mp.rects) out[r.id] = assemble_cut_lines(r, vertical, lines[r.id]);
    return out;
}

std::vector<CutLine> transverse_cuts(const PAMap& map, const PRect& r, const StarGraph& g) {
    const bool vertical = g.foliation == UNSTABLE;
    std::map<QuadNum, std::vector<DevPiece>, QLess> lines;
    std::vector<BBox> cell_bb;
    cell_bb.reserve(r.cells.size());
    for (const DevCell& dc : r.cells) cell_bb.push_back(bbox_of(dc.poly));
    for (int sep = 0; sep < (int)g.len.size(); ++sep) {
        if (g.len[sep].sign() <= 0) continue;
        MeasuredChunks mc = map.sep_chunks(g.foliation, sep, QuadNum(0), g.len[sep]);
        for (size_t k = 0; k < mc.chunks.size(); ++k) {
            const LeafChunk& ch = mc.chunks[k];
            BBox chb = bbox_of_seg(ch.a, ch.b);
            for (size_t ci = 0; ci < r.cells.size(); ++ci) {
                if (r.cells[ci].square != ch.square || chb.disjoint(cell_bb[ci])) continue;
                auto piece =
                    clip_piece(map, r.cells[ci], vertical, ch, sep, mc.m0[k], mc.m1[k]);
                if (piece) lines[piece->level].push_back(*piece);
            }
        }
    }
    return assemble_cut_lines(r, vertical, lines);
}

bool rect_contains(const PAMap& map, const PRect& r, const SurfacePoint& p) {
    auto reps = map.surface().representatives(p);
    for (const DevCell& dc : r.cells) {
        for (const auto& rep : reps) {
            if (rep.square != dc.square) continue;
            bool inside = true;
            for (size_t i = 0; i < dc.poly.size() && inside; ++i) {
                const Vec2q& a = dc.poly[i];
                const Vec2q& b = dc.poly[(i + 1) % dc.poly.size()];
                QuadNum cr = (b.x - a.x) * (rep.y - a.y) - (b.y - a.y) * (rep.x - a.x);
                if (cr.sign() < 0) inside = false;
            }
            if (inside) return true;
        }
    }
    return false;
}

std::string rect_key(const PAMap& map, const PRect& r) {
    std::vector<std::string> cs;
    for (int a : {0, 1})
        for (int b : {0, 1}) {
            const SurfacePoint& c = r.corner[a][b];
            cs.push_back(std::to_string(c.square) + ":" + c.x.str() + ":" + c.y.str());
        }
    std::sort(cs.begin(), cs.end());
    return cs[0] + "|" + cs[1] + "|" + cs[2] + "|" + cs[3];
}

MarkovReport validate_markov(const PAMap& map, const MarkovPartition& mp) {
    MarkovReport rep;
    // (a) boundary invariance, exactly on the star graphs.
    rep.boundary_ok = true;
    for (int i = 0; i < (int)mp.gs.len.size(); ++i) {
        int img = map.sep_image(STABLE, i, 1);
        if (mp.gs.len[i] / map.lambda() > mp.gs.len[img]) {
            rep.boundary_ok = false;
            rep.issues.push_back("stable boundary not f-invariant at separatrix " +
                                 std::to_string(i));
        }
    }
    for (int j = 0; j < (int)mp.gu_eff.len.size(); ++j) {
        int pre = map.sep_image(UNSTABLE, j, -1);
        if (mp.gu_eff.len[j] / map.lambda() > mp.gu_eff.len[pre]) {
            rep.boundary_ok = false;
            rep.issues.push_back("unstable boundary not f^-1-invariant at separatrix " +
                                 std::to_string(j));
        }
    }
    // (b) direct subrectangle verdict: the image of the unstable boundary
    // cuts every rectangle in full-height vertical lines, and the preimage
    // of the stable boundary in full-width horizontal lines.
    rep.subrect_ok = true;
    StarGraph f_gu = iterate_graph(map, mp.gu_eff, 1);
    StarGraph fi_gs = iterate_graph(map, mp.gs, -1);
    auto vcuts = partition_cuts(map, mp, f_gu);
    auto hcuts = partition_cuts(map, mp, fi_gs);
    for (const PRect& r : mp.rects) {
        for (const CutLine& cl : vcuts[r.id]) {
            if (!cl.full) {
                rep.subrect_ok = false;
                rep.issues.push_back("rect " + std::to_string(r.id) +
                                     ": partial vertical image cut at s=" +
                                     std::to_string(cl.level.approx()));
            }
        }
        for (const CutLine& cl : hcuts[r.id]) {
            if (!cl.full) {
                rep.subrect_ok = false;
                rep.issues.push_back("rect " + std::to_string(r.id) +
                                     ": partial horizontal preimage cut at u=" +
                                     std::to_string(cl.level.approx()));
            }
        }
    }
    // (c) cover and disjointness: rectangle areas sum to the surface area
    // and per-square cell areas sum to the square areas.
    rep.cover_ok = true;
    QuadNum total(0);
    std::vector<QuadNum> per_square(map.surface().num_squares(), QuadNum(0));
    for (const PRect& r : mp.rects) {
        total += r.area();
        for (const DevCell& dc : r.cells) per_square[dc.square] += shoelace2(dc.poly).abs();
    }
    if (total != map.eigen_area()) {
        rep.cover_ok = false;
        rep.issues.push_back("areas do not sum to the surface area");
    }
    for (int sq = 0; sq < (int)per_square.size(); ++sq)
        if (per_square[sq] != QuadNum(2)) {
            rep.cover_ok = false;
            rep.issues.push_back("square " + std::to_string(sq) + " not exactly covered");
        }
    return rep;
}

AdaptedReport validate_adapted(const PAMap& map, const MarkovPartition& mp,
                               long period_safety_factor) {
    AdaptedReport rep;
    rep.corner_ok = true;
    for (const auto& sing : map.singularities()) {
        for (const PRect& r : mp.rects) {
            if (!rect_contains(map, r, sing.point)) continue;
            bool is_corner = false;
            for (int a : {0, 1})
                for (int b : {0, 1})
                    if (map.surface().same_point(r.corner[a][b], sing.point)) is_corner = true;
            if (!is_corner) {
                rep.corner_ok = false;
                rep.issues.push_back("singularity " + std::to_string(sing.id) +
                                     " meets rect " + std::to_string(r.id) +
                                     " but is not a corner");
            }
        }
    }
    // Periodic boundary points: on a leaf interval [0, L] the equation
    // lambda^{+-m} x = x (per power m with sigma^m fixing the separatrix)
    // has only x = 0, so the only candidates are the singular bases. The
    // scan below records that constructively.
    rep.periodic_ok = true;
    long P = 1;
    for (int fol : {STABLE, UNSTABLE}) {
        std::vector<char> seen(map.num_seps(fol), 0);
        for (int i = 0; i < map.num_seps(fol); ++i) {
            if (seen[i]) continue;
            long len = 0;
            int cur = i;
            do {
                seen[cur] = 1;
                cur = map.sep_image(fol, cur, 1);
                ++len;
            } while (cur != i);
            P = std::lcm(P, len);
        }
    }
    P *= period_safety_factor;
    for (long m = 1; m <= P; ++m) {
        for (int fol : {STABLE, UNSTABLE}) {
            const StarGraph& g = fol == STABLE ? mp.gs : mp.gu_eff;
            for (int i = 0; i < (int)g.len.size(); ++i) {
                if (map.sep_image(fol, i, m) != i) continue;
                // x * lambda^{+-m} = x has the unique solution x = 0: the
                // base singularity, which is periodic by construction.
                QuadNum coef = QuadNum(1) - map.lambda_pow(fol == STABLE ? -m : m);
                if (coef.sign() == 0) {
                    rep.periodic_ok = false;
                    rep.issues.push_back("degenerate period equation");
                }
            }
        }
    }
    return rep;
}

}  // namespace pam
