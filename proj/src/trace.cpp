#include "pamarkov/trace.hpp"

#include <stdexcept>

namespace pam {

Germ normalize_germ(const FlatSurface& s, int square, Vec2q p, Vec2q dir) {
    if (dir.x.is_zero() && dir.y.is_zero())
        throw std::invalid_argument("normalize_germ: zero direction");
    const QuadNum one(1);
    int dx = dir.x.sign(), dy = dir.y.sign();
    for (int iter = 0; iter < 8; ++iter) {
        bool changed = false;
        if (p.x == one && dx > 0) {
            square = s.right(square);
            p.x = QuadNum(0);
            changed = true;
        } else if (p.x.is_zero() && dx < 0) {
            square = s.right_inv(square);
            p.x = one;
            changed = true;
        } else if (p.x == one && dx == 0) {
            square = s.right(square);
            p.x = QuadNum(0);
            changed = true;
        }
        if (p.y == one && dy > 0) {
            square = s.top(square);
            p.y = QuadNum(0);
            changed = true;
        } else if (p.y.is_zero() && dy < 0) {
            square = s.top_inv(square);
            p.y = one;
            changed = true;
        } else if (p.y == one && dy == 0) {
            square = s.top(square);
            p.y = QuadNum(0);
            changed = true;
        }
        if (!changed) return Germ{square, p, dir};
    }
    throw std::logic_error("normalize_germ: did not stabilize");
}

namespace {

// Earliest stop point on the open-at-start segment a + t*d, t in (0, 1].
std::optional<QuadNum> first_stop_on_segment(const Vec2q& a, const Vec2q& d, int square,
                                             const std::vector<SurfacePoint>& stops) {
    std::optional<QuadNum> best;
    for (const auto& sp : stops) {
        if (sp.square != square) continue;
        QuadNum t;
        if (!d.x.is_zero()) {
            t = (sp.x - a.x) / d.x;
            if (a.y + t * d.y != sp.y) continue;
        } else if (!d.y.is_zero()) {
            t = (sp.y - a.y) / d.y;
            if (a.x != sp.x) continue;
        } else {
            continue;
        }
        if (t.sign() <= 0 || (t - 1).sign() > 0) continue;
        if (!best || t < *best) best = t;
    }
    return best;
}

}  // namespace

TraceResult trace_displacement(const FlatSurface& s, const Germ& start, const Vec2q& disp,
                               const std::vector<SurfacePoint>* stops, int max_chunks) {
    TraceResult res;
    const QuadNum zero(0), one(1);
    int sq = start.square;
    Vec2q p = start.p;
    Vec2q r = disp;  // remaining displacement
    QuadNum done(0);  // fraction of |disp| completed
    QuadNum remaining_frac(1);

    int dxs = disp.x.sign(), dys = disp.y.sign();
    if (dxs == 0 && dys == 0) {
        res.end = SurfacePoint(sq, p.x, p.y);
        res.completed = one;
        res.final_germ = start;
        return res;
    }

    auto emit = [&](const Vec2q& a, const Vec2q& b, const QuadNum& t0, const QuadNum& t1) {
        res.chunks.push_back(LeafChunk{sq, a, b, t0, t1});
    };

    while ((int)res.chunks.size() < max_chunks) {
        // Parameters (relative to remaining displacement) to each wall.
        bool has_tx = dxs != 0, has_ty = dys != 0;
        QuadNum tx, ty;
        if (has_tx) tx = dxs > 0 ? (one - p.x) / r.x : p.x / -r.x;
        if (has_ty) ty = dys > 0 ? (one - p.y) / r.y : p.y / -r.y;

        QuadNum tmin;
        int which;  // 0: x wall, 1: y wall, 2: both (corner)
        if (has_tx && has_ty) {
            int c = tx.cmp(ty);
            tmin = c <= 0 ? tx : ty;
            which = c < 0 ? 0 : (c > 0 ? 1 : 2);
        } else if (has_tx) {
            tmin = tx;
            which = 0;
        } else {
            tmin = ty;
            which = 1;
        }

        if (tmin >= one) {
            // Ends inside this square (possibly exactly on a wall).
            Vec2q b{p.x + r.x, p.y + r.y};
            if (stops) {
                auto t = first_stop_on_segment(p, r, sq, *stops);
                if (t && *t < one) {
                    Vec2q bb{p.x + r.x * *t, p.y + r.y * *t};
                    emit(p, bb, done, done + *t * remaining_frac);
                    res.end = SurfacePoint(sq, bb.x, bb.y);
                    res.truncated = res.stopped_at_marked = true;
                    res.completed = done + *t * remaining_frac;
                    return res;
                }
            }
            emit(p, b, done, one);
            res.end = SurfacePoint(sq, b.x, b.y);
            res.completed = one;
            res.final_germ = Germ{sq, b, disp};
            return res;
        }

        Vec2q hit{p.x + r.x * tmin, p.y + r.y * tmin};
        QuadNum t1 = done + tmin * remaining_frac;
        if (stops) {
            auto t = first_stop_on_segment(p, r, sq, *stops);
            if (t && *t <= tmin) {
                Vec2q bb{p.x + r.x * *t, p.y + r.y * *t};
                QuadNum tt = done + *t * remaining_frac;
                emit(p, bb, done, tt);
                res.end = SurfacePoint(sq, bb.x, bb.y);
                res.truncated = res.stopped_at_marked = true;
                res.completed = tt;
                return res;
            }
        }
        emit(p, hit, done, t1);
        done = t1;
        remaining_frac = one - done;
        r = Vec2q{disp.x * remaining_frac, disp.y * remaining_frac};

        // Corner detection also covers axis-parallel runs hitting a corner.
        bool at_corner = FlatSurface::is_corner_coords(hit.x, hit.y);
        if (at_corner) {
            SurfacePoint cp(sq, hit.x, hit.y);
            int v = s.vertex_at(cp);
            if (s.is_cone(v)) {
                res.end = cp;
                res.truncated = true;
                res.stop_vertex = v;
                res.completed = done;
                return res;
            }
            // Flat vertex: pass through, x crossing first where applicable.
            if (dxs > 0)
                sq = s.right(sq);
            else if (dxs < 0)
                sq = s.right_inv(sq);
            if (dys > 0)
                sq = s.top(sq);
            else if (dys < 0)
                sq = s.top_inv(sq);
            p.x = dxs > 0 ? zero : (dxs < 0 ? one : hit.x);
            p.y = dys > 0 ? zero : (dys < 0 ? one : hit.y);
            // Axis runs keep one coordinate; re-apply edge conventions.
            if (dxs == 0 && p.x == one) {
                sq = s.right(sq);
                p.x = zero;
            }
            if (dys == 0 && p.y == one) {
                sq = s.top(sq);
                p.y = zero;
            }
            continue;
        }

        if (which == 0) {
            sq = dxs > 0 ? s.right(sq) : s.right_inv(sq);
            p = Vec2q{dxs > 0 ? zero : one, hit.y};
        } else if (which == 1) {
            sq = dys > 0 ? s.top(sq) : s.top_inv(sq);
            p = Vec2q{hit.x, dys > 0 ? zero : one};
        } else {
            throw std::logic_error("trace: corner case escaped detection");
        }
    }
    throw std::runtime_error("trace_displacement: chunk cap exceeded");
}

std::vector<LeafChunk> merge_collinear(const FlatSurface& s, const std::vector<LeafChunk>& cs) {
    std::vector<LeafChunk> out;
    for (const auto& c : cs) {
        if (!out.empty()) {
            LeafChunk& l = out.back();
            if (l.square == c.square && l.b == c.a) {
                Vec2q u = l.b - l.a, v = c.b - c.a;
                if (u.cross_sign(v) == 0 && (u.x * v.x + u.y * v.y).sign() >= 0) {
                    l.b = c.b;
                    l.t1 = c.t1;
                    continue;
                }
            }
        }
        out.push_back(c);
    }
    return out;
}

std::vector<ArcCrossing> chunk_intersections(const FlatSurface& s, const MeasuredChunks& a,
                                             const MeasuredChunks& b) {
    std::vector<ArcCrossing> out;
    // Bucket b's chunks per square with double bounding boxes for pruning.
    struct BEntry {
        int idx;
        double xlo, xhi, ylo, yhi;
    };
    std::vector<std::vector<BEntry>> buckets(s.num_squares());
    auto bbox = [](const LeafChunk& c) {
        auto ax = c.a.x.approx_interval(), bx = c.b.x.approx_interval();
        auto ay = c.a.y.approx_interval(), by = c.b.y.approx_interval();
        return std::array<double, 4>{std::min(ax.first, bx.first), std::max(ax.second, bx.second),
                                     std::min(ay.first, by.first), std::max(ay.second, by.second)};
    };
    for (int j = 0; j < (int)b.chunks.size(); ++j) {
        auto bb = bbox(b.chunks[j]);
        buckets[b.chunks[j].square].push_back(BEntry{j, bb[0], bb[1], bb[2], bb[3]});
    }
    for (int i = 0; i < (int)a.chunks.size(); ++i) {
        const LeafChunk& ca = a.chunks[i];
        auto ab = bbox(ca);
        Vec2q u = ca.b - ca.a;
        for (const BEntry& e : buckets[ca.square]) {
            if (e.xhi < ab[0] || ab[1] < e.xlo || e.yhi < ab[2] || ab[3] < e.ylo) continue;
            const LeafChunk& cb = b.chunks[e.idx];
            Vec2q v = cb.b - cb.a;
            QuadNum det = u.x * v.y - u.y * v.x;
            if (det.sign() == 0) continue;  // parallel chunks never cross transversally
            Vec2q w = cb.a - ca.a;
            QuadNum t = (w.x * v.y - w.y * v.x) / det;
            QuadNum r = (w.x * u.y - w.y * u.x) / det;
            if (t.sign() < 0 || (t - 1).sign() > 0 || r.sign() < 0 || (r - 1).sign() > 0) continue;
            QuadNum pa = a.m0[i] + t * (a.m1[i] - a.m0[i]);
            QuadNum pb = b.m0[e.idx] + r * (b.m1[e.idx] - b.m0[e.idx]);
            out.push_back(ArcCrossing{SurfacePoint(ca.square, ca.a.x + u.x * t, ca.a.y + u.y * t),
                                      pa, pb});
        }
    }
    // A crossing on a shared square edge is found from both charts: dedupe
    // by the exact position pair.
    std::sort(out.begin(), out.end(), [](const ArcCrossing& l, const ArcCrossing& r) {
        int c = l.pos_a.cmp(r.pos_a);
        if (c != 0) return c < 0;
        return l.pos_b.cmp(r.pos_b) < 0;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const ArcCrossing& l, const ArcCrossing& r) {
                              return l.pos_a == r.pos_a && l.pos_b == r.pos_b;
                          }),
              out.end());
    return out;
}

}  // namespace pam
