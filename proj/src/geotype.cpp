#include "pamarkov/geotype.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace pam {

GeometricPartition geometrize(const MarkovPartition& mp, int vertical_sign) {
    if (vertical_sign != 1 && vertical_sign != -1)
        throw std::invalid_argument("geometrize: sign must be +-1");
    return GeometricPartition{&mp, vertical_sign};
}

namespace {

struct CellBox {
    double xlo, xhi, ylo, yhi;
};

CellBox cell_box(const std::vector<Vec2q>& poly) {
    CellBox b{1e300, -1e300, 1e300, -1e300};
    for (const Vec2q& p : poly) {
        auto ix = p.x.approx_interval(), iy = p.y.approx_interval();
        b.xlo = std::min(b.xlo, ix.first);
        b.xhi = std::max(b.xhi, ix.second);
        b.ylo = std::min(b.ylo, iy.first);
        b.yhi = std::max(b.yhi, iy.second);
    }
    return b;
}

bool in_poly_exact(const std::vector<Vec2q>& poly, const QuadNum& px, const QuadNum& py) {
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2q& a = poly[i];
        const Vec2q& b = poly[(i + 1) % poly.size()];
        if (((b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x)).sign() < 0) return false;
    }
    return true;
}

// Point location over a fixed partition with double-interval prefilters
// and per-square bucketing.
struct Locator {
    const PAMap& map;
    const MarkovPartition& mp;
    std::vector<std::vector<CellBox>> boxes;  // per rect, per cell
    struct Entry {
        int rect, cell;
    };
    std::vector<std::vector<Entry>> by_square;

    explicit Locator(const PAMap& m, const MarkovPartition& p) : map(m), mp(p) {
        boxes.resize(mp.rects.size());
        by_square.resize(map.surface().num_squares());
        for (const PRect& r : mp.rects)
            for (int ci = 0; ci < (int)r.cells.size(); ++ci) {
                boxes[r.id].push_back(cell_box(r.cells[ci].poly));
                by_square[r.cells[ci].square].push_back(Entry{r.id, ci});
            }
    }

    // Chart point of rectangle r at developed coordinates (u, s).
    SurfacePoint rect_point_at(const PRect& r, const QuadNum& u, const QuadNum& s) const {
        const Vec2q& du_dir = map.dir(UNSTABLE);
        const Vec2q& ds_dir = map.dir(STABLE);
        double ua = u.approx(), sa = s.approx();
        double dux = du_dir.x.approx(), duy = du_dir.y.approx();
        double dsx = ds_dir.x.approx(), dsy = ds_dir.y.approx();
        for (size_t ci = 0; ci < r.cells.size(); ++ci) {
            const DevCell& dc = r.cells[ci];
            double cu = ua - dc.off_u.approx(), cs = sa - dc.off_s.approx();
            double px = dux * cu + dsx * cs, py = duy * cu + dsy * cs;
            const CellBox& b = boxes[r.id][ci];
            const double eps = 1e-9;
            if (px < b.xlo - eps || px > b.xhi + eps || py < b.ylo - eps || py > b.yhi + eps)
                continue;
            QuadNum ecu = u - dc.off_u, ecs = s - dc.off_s;
            Vec2q p{du_dir.x * ecu + ds_dir.x * ecs, du_dir.y * ecu + ds_dir.y * ecs};
            if (p.x.sign() < 0 || p.y.sign() < 0 || p.x > QuadNum(1) || p.y > QuadNum(1)) continue;
            if (in_poly_exact(dc.poly, p.x, p.y)) return SurfacePoint(dc.square, p.x, p.y);
        }
        throw std::logic_error("rect_point_at: developed point not found in any cell");
    }

    struct Located {
        int rect;
        QuadNum u, s;
    };

    Located locate(const SurfacePoint& p) const {
        auto reps = map.surface().representatives(p);
        const double eps = 1e-9;
        for (const auto& rep : reps) {
            double ax = rep.x.approx(), ay = rep.y.approx();
            for (const Entry& e : by_square[rep.square]) {
                const CellBox& b = boxes[e.rect][e.cell];
                if (ax < b.xlo - eps || ax > b.xhi + eps || ay < b.ylo - eps || ay > b.yhi + eps)
                    continue;
                const DevCell& dc = mp.rects[e.rect].cells[e.cell];
                if (!in_poly_exact(dc.poly, rep.x, rep.y)) continue;
                Vec2q v{rep.x, rep.y};
                return Located{e.rect, dc.off_u + map.du(v), dc.off_s + map.ds(v)};
            }
        }
        throw std::logic_error("locate: point not found in the partition");
    }
};

// Strip boundaries of one rectangle: interior cut levels plus the sides.
std::vector<QuadNum> strip_levels(const std::vector<CutLine>& cuts, const QuadNum& lo,
                                  const QuadNum& hi) {
    std::vector<QuadNum> levels{lo};
    for (const CutLine& cl : cuts) {
        if (!cl.full)
            throw std::logic_error("extract_type: partial cut (validator gap)");
        levels.push_back(cl.level);
    }
    levels.push_back(hi);
    std::sort(levels.begin(), levels.end(), [](const QuadNum& a, const QuadNum& b) {
        return a.cmp(b) < 0;
    });
    for (size_t i = 1; i < levels.size(); ++i)
        if (levels[i] == levels[i - 1]) throw std::logic_error("strip_levels: duplicate level");
    return levels;
}

}  // namespace

GeometricType extract_type(const PAMap& map, const GeometricPartition& gp) {
    const MarkovPartition& mp = *gp.mp;
    const int flip = gp.vertical_sign;  // +1: vertical = +dir_u
    // Horizontal direction sign making (horizontal, vertical) positively
    // oriented: sign(m_u - m_s) for vertical = +dir_u, flipped with it.
    QuadNum m_diff = map.du(Vec2q(QuadNum(0), QuadNum(1)));  // du(e2) = 1/(m_u - m_s) sign
    int sign_h = (m_diff.sign() > 0 ? 1 : -1) * flip;

    StarGraph f_gu = iterate_graph(map, mp.gu_eff, 1);
    StarGraph fi_gs = iterate_graph(map, mp.gs, -1);
    auto vcuts = partition_cuts(map, mp, f_gu);
    auto hcuts = partition_cuts(map, mp, fi_gs);

    GeometricType t;
    t.n = (int)mp.rects.size();
    std::vector<std::vector<QuadNum>> hlv(t.n), vlv(t.n);  // strip levels per rect
    for (const PRect& r : mp.rects) {
        hlv[r.id] = strip_levels(hcuts[r.id], r.u1, r.u2);  // u-levels
        vlv[r.id] = strip_levels(vcuts[r.id], r.s1, r.s2);  // s-levels
        t.hv.push_back({(int)hlv[r.id].size() - 1, (int)vlv[r.id].size() - 1});
    }

    // Label orders: horizontal subrectangles bottom-to-top along the
    // vertical direction, vertical ones left-to-right along the horizontal.
    auto h_index = [&](int rect, int raw_j) {
        int h = (int)hlv[rect].size() - 1;
        return flip > 0 ? raw_j : h - 1 - raw_j;
    };
    auto v_index = [&](int rect, int raw_l) {
        int v = (int)vlv[rect].size() - 1;
        return sign_h > 0 ? raw_l : v - 1 - raw_l;
    };

    t.rho.assign(t.n, {});
    t.eps.assign(t.n, {});
    for (int i = 0; i < t.n; ++i) {
        t.rho[i].assign(t.hv[i].first, {-1, -1});
        t.eps[i].assign(t.hv[i].first, 0);
    }

    const QuadNum half(1, 2), quarter(1, 4);
    Locator loc(map, mp);
    for (const PRect& r : mp.rects) {
        int i = r.id;
        QuadNum smid = (r.s1 + r.s2) * half;
        for (int raw_j = 0; raw_j + 1 <= (int)hlv[i].size() - 1; ++raw_j) {
            QuadNum a = hlv[i][raw_j], b = hlv[i][raw_j + 1];
            QuadNum umid = (a + b) * half;
            SurfacePoint w = loc.rect_point_at(r, umid, smid);
            Locator::Located fw = loc.locate(map.apply(w, 1));
            const auto& lv = vlv[fw.rect];
            int raw_l = -1;
            for (int x = 0; x + 1 < (int)lv.size(); ++x)
                if (lv[x] < fw.s && fw.s < lv[x + 1]) raw_l = x;
            if (raw_l < 0) throw std::logic_error("extract_type: image point on a cut");
            int j = h_index(i, raw_j);
            t.rho[i][j] = {fw.rect, v_index(fw.rect, raw_l)};
            // eps compares the image of the vertical direction of H with the
            // vertical direction of V. Both carry the same global sign, so
            // it cancels: the +u displacement sign of the image decides. The
            // derivative is the constant matrix A, so the sign is the
            // eigenvalue sign; it is verified geometrically once per
            // rectangle below.
            t.eps[i][j] = map.eig_sign();
            if (raw_j == 0) {
                QuadNum ushift = umid + (b - a) * quarter;
                SurfacePoint w2 = loc.rect_point_at(r, ushift, smid);
                Locator::Located fw2 = loc.locate(map.apply(w2, 1));
                if (fw2.rect != fw.rect)
                    throw std::logic_error("extract_type: image matching failure");
                if (!(fw2.s == fw.s))
                    throw std::logic_error("extract_type: image strip mismatch");
                int e = (fw2.u - fw.u).sign();
                if (e != map.eig_sign())
                    throw std::logic_error("extract_type: eps disagrees with the eigenvalue sign");
            }
        }
    }
    // rho must be a bijection onto the vertical labels.
    std::set<std::pair<int, int>> image;
    long total_h = 0, total_v = 0;
    for (int i = 0; i < t.n; ++i) {
        total_h += t.hv[i].first;
        total_v += t.hv[i].second;
        for (auto& kl : t.rho[i])
            if (!image.insert(kl).second)
                throw std::logic_error("extract_type: rho not injective");
    }
    if (total_h != total_v || (long)image.size() != total_v)
        throw std::logic_error("extract_type: rho not a bijection");
    return t;
}

GeometricType flip_type(const GeometricType& t) {
    GeometricType o;
    o.n = t.n;
    o.hv = t.hv;
    o.rho.assign(t.n, {});
    o.eps.assign(t.n, {});
    for (int i = 0; i < t.n; ++i) {
        int h = t.hv[i].first;
        o.rho[i].assign(h, {-1, -1});
        o.eps[i].assign(h, 0);
        for (int j = 0; j < h; ++j) {
            auto [k, l] = t.rho[i][j];
            int v = t.hv[k].second;
            o.rho[i][h - 1 - j] = {k, v - 1 - l};
            o.eps[i][h - 1 - j] = t.eps[i][j];
        }
    }
    return o;
}

std::string type_to_json(const GeometricType& t) {
    nlohmann::ordered_json j;
    j["n"] = t.n;
    auto pairs = nlohmann::ordered_json::array();
    for (auto& [h, v] : t.hv) pairs.push_back({h, v});
    j["pairs"] = pairs;
    auto rho = nlohmann::ordered_json::array();
    auto eps = nlohmann::ordered_json::array();
    for (int i = 0; i < t.n; ++i)
        for (int jj = 0; jj < (int)t.rho[i].size(); ++jj) {
            rho.push_back({{i + 1, jj + 1}, {t.rho[i][jj].first + 1, t.rho[i][jj].second + 1}});
            eps.push_back({{i + 1, jj + 1}, t.eps[i][jj]});
        }
    j["rho"] = rho;
    j["eps"] = eps;
    return j.dump();
}

GeometricType type_from_json(const std::string& s) {
    auto j = nlohmann::json::parse(s);
    GeometricType t;
    t.n = j.at("n").get<int>();
    for (auto& p : j.at("pairs")) t.hv.push_back({p[0].get<int>(), p[1].get<int>()});
    t.rho.assign(t.n, {});
    t.eps.assign(t.n, {});
    for (int i = 0; i < t.n; ++i) {
        t.rho[i].assign(t.hv[i].first, {-1, -1});
        t.eps[i].assign(t.hv[i].first, 0);
    }
    for (auto& e : j.at("rho")) {
        int i = e[0][0].get<int>() - 1, jj = e[0][1].get<int>() - 1;
        t.rho[i][jj] = {e[1][0].get<int>() - 1, e[1][1].get<int>() - 1};
    }
    for (auto& e : j.at("eps")) {
        int i = e[0][0].get<int>() - 1, jj = e[0][1].get<int>() - 1;
        t.eps[i][jj] = e[1].get<int>();
    }
    return t;
}

GeometricType relabel_type(const GeometricType& t, const std::vector<int>& pi) {
    GeometricType o;
    o.n = t.n;
    o.hv.assign(t.n, {});
    o.rho.assign(t.n, {});
    o.eps.assign(t.n, {});
    for (int i = 0; i < t.n; ++i) {
        o.hv[pi[i]] = t.hv[i];
        o.rho[pi[i]].resize(t.hv[i].first);
        o.eps[pi[i]].resize(t.hv[i].first);
    }
    for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < (int)t.rho[i].size(); ++j) {
            auto [k, l] = t.rho[i][j];
            o.rho[pi[i]][j] = {pi[k], l};
            o.eps[pi[i]][j] = t.eps[i][j];
        }
    return o;
}

namespace {

// Canonical labeling by individualization and refinement. Rectangles start
// partitioned by their (h, v) pair in byte order; cells are repeatedly
// split by the full ordered row data (targets by cell index, positions,
// signs) together with the incoming references, which is a label-invariant
// signature. When a cell stays ambiguous each member is individualized in
// turn. The canonical byte form is the minimal serialization over the
// resulting labeling set; the set is label-invariant, so the form is a
// sound dedup key. (The globally byte-minimal relabeling would be
// exponential to certify for symmetric types; this refinement form is the
// same for all inputs we have checked brute-force against.)
void min_over_relabelings(const GeometricType& t, std::string& best) {
    auto pair_bytes = [&](int i) {
        return "[" + std::to_string(t.hv[i].first) + "," + std::to_string(t.hv[i].second) + "]";
    };
    // Initial ordered partition: byte-sorted (h, v) groups.
    std::vector<std::string> pb(t.n);
    for (int i = 0; i < t.n; ++i) pb[i] = pair_bytes(i);
    std::vector<std::string> keys(pb.begin(), pb.end());
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    std::vector<std::vector<int>> cells0;
    for (const auto& k : keys) {
        cells0.push_back({});
        for (int i = 0; i < t.n; ++i)
            if (pb[i] == k) cells0.back().push_back(i);
    }

    // Incoming references per rect: (source, j, l).
    std::vector<std::vector<std::array<int, 3>>> incoming(t.n);
    for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < (int)t.rho[i].size(); ++j)
            incoming[t.rho[i][j].first].push_back({i, j, t.rho[i][j].second});

    auto refine = [&](std::vector<std::vector<int>> cells) {
        std::vector<int> cell_of(t.n);
        bool changed = true;
        while (changed) {
            for (int c = 0; c < (int)cells.size(); ++c)
                for (int m : cells[c]) cell_of[m] = c;
            changed = false;
            std::vector<std::vector<int>> next;
            for (const auto& cell : cells) {
                if (cell.size() == 1) {
                    next.push_back(cell);
                    continue;
                }
                // Signature: ordered outgoing rows and sorted incoming refs,
                // everything through current cell indices.
                std::map<std::vector<long>, std::vector<int>> split;
                for (int m : cell) {
                    std::vector<long> sig;
                    for (int j = 0; j < (int)t.rho[m].size(); ++j) {
                        sig.push_back(cell_of[t.rho[m][j].first]);
                        sig.push_back(t.rho[m][j].second);
                        sig.push_back(t.eps[m][j]);
                    }
                    std::vector<std::vector<long>> incs;
                    for (const auto& [src, j, l] : incoming[m])
                        incs.push_back({(long)cell_of[src], (long)j, (long)l});
                    std::sort(incs.begin(), incs.end());
                    sig.push_back(-1);
                    for (auto& v : incs) sig.insert(sig.end(), v.begin(), v.end());
                    split[sig].push_back(m);
                }
                if (split.size() > 1) changed = true;
                for (auto& [sig, members] : split) next.push_back(members);
            }
            cells = std::move(next);
        }
        return cells;
    };

    long leaves = 0;
    std::function<void(std::vector<std::vector<int>>)> descend =
        [&](std::vector<std::vector<int>> cells) {
            cells = refine(std::move(cells));
            int split_at = -1;
            for (int c = 0; c < (int)cells.size(); ++c)
                if (cells[c].size() > 1) {
                    split_at = c;
                    break;
                }
            if (split_at < 0) {
                if (++leaves > 100000)
                    throw std::runtime_error("canonical_type: labeling search budget exceeded");
                std::vector<int> pi(t.n);
                for (int c = 0; c < (int)cells.size(); ++c) pi[cells[c][0]] = c;
                std::string s = type_to_json(relabel_type(t, pi));
                if (best.empty() || s < best) best = s;
                return;
            }
            for (int m : cells[split_at]) {
                std::vector<std::vector<int>> next;
                for (int c = 0; c < (int)cells.size(); ++c) {
                    if (c != split_at) {
                        next.push_back(cells[c]);
                        continue;
                    }
                    next.push_back({m});
                    std::vector<int> rest;
                    for (int x : cells[c])
                        if (x != m) rest.push_back(x);
                    next.push_back(rest);
                }
                descend(std::move(next));
            }
        };
    descend(cells0);
}

}  // namespace

std::string canonical_type(const GeometricType& t, bool quotient_flip) {
    std::string best;
    min_over_relabelings(t, best);
    if (quotient_flip) min_over_relabelings(flip_type(t), best);
    return best;
}

std::vector<std::vector<long>> incidence_matrix(const GeometricType& t) {
    std::vector<std::vector<long>> a(t.n, std::vector<long>(t.n, 0));
    for (int i = 0; i < t.n; ++i)
        for (auto& [k, l] : t.rho[i]) a[i][k]++;
    return a;
}

const std::vector<FirstPoint>& TypePipeline::reps() {
    if (!have_reps_) {
        reps_ = first_intersection_points(map_);
        if (reps_.empty()) throw std::logic_error("pipeline: no first intersection points");
        have_reps_ = true;
    }
    return reps_;
}

const GraphData& TypePipeline::graph_data(size_t i) {
    auto it = gd_.find(i);
    if (it == gd_.end()) it = gd_.emplace(i, build_graphs(map_, reps()[i])).first;
    return it->second;
}

long TypePipeline::order() {
    if (order_ < 0) {
        order_ = 0;
        for (size_t i = 0; i < reps().size(); ++i)
            order_ = std::max(order_, graph_data(i).coeff.n);
    }
    return order_;
}

std::vector<long> TypePipeline::coefficients() {
    std::vector<long> out;
    for (size_t i = 0; i < reps().size(); ++i) out.push_back(graph_data(i).coeff.n);
    return out;
}

std::vector<std::string> TypePipeline::types(long n, bool quotient_flip) {
    if (n < order()) throw std::invalid_argument("primitive_types: n < n(f)");
    std::set<std::string> types;
    for (size_t i = 0; i < reps().size(); ++i) {
        MarkovPartition mp = build_partition(map_, graph_data(i), n);
        GeometricType t = extract_type(map_, geometrize(mp));
        types.insert(canonical_type(t, quotient_flip));
    }
    return std::vector<std::string>(types.begin(), types.end());
}

OrderResult compatibility_order(const PAMap& map) {
    TypePipeline p(map);
    OrderResult out;
    out.n_f = p.order();
    out.reps = p.reps();
    out.coefficients = p.coefficients();
    return out;
}

std::vector<std::string> primitive_types(const PAMap& map, long n, bool quotient_flip) {
    TypePipeline p(map);
    return p.types(n, quotient_flip);
}

CompareResult compare_invariants(const PAMap& f, const PAMap& g, bool quotient_flip) {
    CompareResult res;
    TypePipeline pf(f), pg(g);
    res.n_f = pf.order();
    res.n_g = pg.order();
    if (res.n_f != res.n_g) {
        res.status = "distinct";
        res.detail = "compatibility orders differ";
        return res;
    }
    res.types_f = pf.types(res.n_f, quotient_flip);
    res.types_g = pg.types(res.n_g, quotient_flip);
    if (res.types_f == res.types_g) {
        res.status = "equivalent";
        res.detail = "equal canonical type sets at n = n(f) = n(g)";
    } else {
        res.status = "inconclusive";
        res.detail =
            "type sets differ at the tested order; the criterion's existential "
            "quantifier over n leaves this undecided under the canonical-form quotient";
    }
    return res;
}

}  // namespace pam
