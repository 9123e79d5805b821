#include "pamarkov/graphs.hpp"

#include <algorithm>
#include <stdexcept>

namespace pam {

LeafArcData primitive_segment(const PAMap& map, const FirstPoint& z) {
    if (z.u_pos.sign() <= 0) throw std::invalid_argument("primitive_segment: z at a singularity");
    return map.sep_arc(UNSTABLE, z.u_sep, QuadNum(0), z.u_pos);
}

StarGraph unstable_seed_family(const PAMap& map, const FirstPoint& z) {
    StarGraph g;
    g.foliation = UNSTABLE;
    g.len.assign(map.num_seps(UNSTABLE), QuadNum(0));
    int sep = z.u_sep;
    QuadNum m = z.u_pos;
    const int cap = 4 * map.num_seps(UNSTABLE) + 8;
    for (int i = 0; i <= cap; ++i) {
        if (m <= g.len[sep]) break;  // pullback contained in the accumulated union
        if (i == cap) throw std::runtime_error("unstable_seed_family: iteration cap exceeded");
        if (g.len[sep] < m) g.len[sep] = m;
        sep = map.sep_image(UNSTABLE, sep, -1);
        m = m / map.lambda();
    }
    // Post-check: the union is f^-1-invariant.
    for (int j = 0; j < map.num_seps(UNSTABLE); ++j) {
        if (g.len[j].is_zero()) continue;
        int pre = map.sep_image(UNSTABLE, j, -1);
        if (g.len[j] / map.lambda() > g.len[pre])
            throw std::logic_error("unstable_seed_family: union not f^-1-invariant");
    }
    return g;
}

namespace {

// Materialized chunks of every interval of a star graph.
struct GraphChunks {
    std::vector<int> sep;             // graph separatrix per entry
    std::vector<MeasuredChunks> arcs;  // chunks of [0, len[sep]]
};

GraphChunks materialize(const PAMap& map, const StarGraph& g) {
    GraphChunks out;
    for (int i = 0; i < (int)g.len.size(); ++i) {
        if (g.len[i].sign() <= 0) continue;
        out.sep.push_back(i);
        out.arcs.push_back(map.sep_chunks(g.foliation, i, QuadNum(0), g.len[i]));
    }
    return out;
}

// All crossings of the transverse separatrix prefix [lo_hint, M] with the
// graph union, as (pos on the separatrix, graph sep, pos on it).
struct GraphCrossing {
    QuadNum pos;    // along the query separatrix
    int g_sep;      // graph separatrix hit
    QuadNum g_pos;  // position along it
};

std::vector<GraphCrossing> crossings_with_graph(const PAMap& map, int fol, int sep,
                                                const QuadNum& m_hi, const GraphChunks& gc) {
    MeasuredChunks prefix = map.sep_chunks(fol, sep, QuadNum(0), m_hi);
    std::vector<GraphCrossing> out;
    for (size_t a = 0; a < gc.arcs.size(); ++a) {
        for (const auto& c : chunk_intersections(map.surface(), prefix, gc.arcs[a])) {
            // Arcs based at the same singularity share that endpoint; a
            // position-(0,0) touch is not a transverse crossing. Leaf
            // interiors never contain singularities, so mixed zeros are bugs.
            if (c.pos_a.sign() == 0 || c.pos_b.sign() == 0) {
                if (c.pos_a.sign() != 0 || c.pos_b.sign() != 0)
                    throw std::logic_error("leaf interior crossing at a singularity");
                continue;
            }
            out.push_back(GraphCrossing{c.pos_a, gc.sep[a], c.pos_b});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const GraphCrossing& l, const GraphCrossing& r) { return l.pos < r.pos; });
    return out;
}

}  // namespace

AdaptedGraph generate_graph(const PAMap& map, const StarGraph& seeds, int target,
                            int trace_cap_doublings) {
    if (seeds.foliation == target)
        throw std::invalid_argument("generate_graph: seeds must be transverse to the target");
    // Seeds must be f^-1-invariant (unstable) or f-invariant (stable).
    long dir = seeds.foliation == UNSTABLE ? -1 : 1;
    for (int j = 0; j < (int)seeds.len.size(); ++j) {
        if (seeds.len[j].is_zero()) continue;
        int img = map.sep_image(seeds.foliation, j, dir);
        if (seeds.len[j] / map.lambda() > seeds.len[img])
            throw std::invalid_argument("generate_graph: seed union is not invariant");
    }
    GraphChunks gc = materialize(map, seeds);
    AdaptedGraph ag;
    ag.g.foliation = target;
    ag.g.len.assign(map.num_seps(target), QuadNum(0));
    ag.tip.assign(map.num_seps(target), GraphTip{});
    for (int i = 0; i < map.num_seps(target); ++i) {
        QuadNum hi(1);
        bool done = false;
        for (int d = 0; d <= trace_cap_doublings && !done; ++d) {
            auto xs = crossings_with_graph(map, target, i, hi, gc);
            if (!xs.empty()) {
                ag.g.len[i] = xs[0].pos;
                ag.tip[i] = GraphTip{xs[0].g_sep, xs[0].g_pos};
                done = true;
            } else {
                hi = hi * QuadNum(2);
            }
        }
        if (!done) throw std::runtime_error("generate_graph: separatrix failed to hit the seeds");
    }
    // Adaptedness post-check: every interval nontrivial and the union
    // invariant in the right direction.
    long gdir = target == STABLE ? 1 : -1;
    for (int i = 0; i < map.num_seps(target); ++i) {
        if (ag.g.len[i].sign() <= 0) throw std::logic_error("generate_graph: empty interval");
        int img = map.sep_image(target, i, gdir);
        if (ag.g.len[i] / map.lambda() > ag.g.len[img])
            throw std::logic_error("generate_graph: generated union is not invariant");
    }
    return ag;
}

StarGraph iterate_graph(const PAMap& map, const StarGraph& g, long n) {
    StarGraph out;
    out.foliation = g.foliation;
    out.len.assign(g.len.size(), QuadNum(0));
    for (int j = 0; j < (int)g.len.size(); ++j) {
        int src = map.sep_image(g.foliation, j, -n);
        out.len[j] = map.pos_image(g.foliation, g.len[src], n);
    }
    return out;
}

namespace {

// Blocking structure of one crossing seen from a rail on the transverse
// foliation: which sides of the rail's leaf the graph material touches.
struct BlockEvent {
    QuadNum pos;  // along the rail's separatrix
    bool plus;    // blocks the +side (increasing transverse coordinate)
    bool minus;
};

// Transverse-coordinate direction sign of motion along a graph separatrix:
// moving away from the base of separatrix i changes the coordinate
// measured by the graph foliation's own form with this sign.
int sep_coord_sign(const PAMap& map, int foliation, int sep) {
    return map.seps(foliation)[sep].sign;
}

std::vector<BlockEvent> block_events(const PAMap& map, const AdaptedGraph& ag, int rail_fol,
                                     int rail_sep, const QuadNum& m_hi, const GraphChunks& gc) {
    std::vector<BlockEvent> out;
    for (const auto& c : crossings_with_graph(map, rail_fol, rail_sep, m_hi, gc)) {
        BlockEvent e;
        e.pos = c.pos;
        if (c.g_pos < ag.g.len[c.g_sep]) {
            e.plus = e.minus = true;  // interior crossing
        } else {
            // Tip touch: material extends toward decreasing position, i.e.
            // in transverse-coordinate direction -sign(separatrix germ).
            int side = -sep_coord_sign(map, ag.foliation(), c.g_sep);
            e.plus = side > 0;
            e.minus = side < 0;
        }
        out.push_back(e);
    }
    return out;  // sorted by pos (crossings_with_graph sorts)
}

}  // namespace

std::vector<Rail> extreme_rails(const PAMap& map, const AdaptedGraph& ag,
                                int trace_cap_doublings) {
    int rail_fol = 1 - ag.foliation();
    std::vector<Rail> rails;

    // Per rail separatrix: cached block events up to a growing horizon.
    std::vector<QuadNum> horizon(map.num_seps(rail_fol), QuadNum(1));
    std::vector<int> doublings(map.num_seps(rail_fol), 0);
    std::vector<char> computed(map.num_seps(rail_fol), 0);
    std::vector<std::vector<BlockEvent>> events(map.num_seps(rail_fol));
    GraphChunks gc = materialize(map, ag.g);
    auto ensure_events = [&](int sep, const QuadNum& beyond) {
        while (true) {
            if (computed[sep]) {
                for (const auto& e : events[sep])
                    if (e.pos > beyond && e.plus && e.minus) return;  // covers searches past `beyond`
                horizon[sep] = horizon[sep] * QuadNum(2);
                if (++doublings[sep] > trace_cap_doublings)
                    throw std::runtime_error("extreme_rails: trace cap exceeded");
            }
            events[sep] = block_events(map, ag, rail_fol, sep, horizon[sep], gc);
            computed[sep] = 1;
        }
    };
    auto first_block_above = [&](int sep, const QuadNum& from, int side) -> QuadNum {
        ensure_events(sep, from);
        for (const auto& e : events[sep])
            if (e.pos > from && (side > 0 ? e.plus : e.minus)) return e.pos;
        throw std::logic_error("extreme_rails: no block above (density violated?)");
    };
    auto first_block_below = [&](int sep, const QuadNum& from, int side) -> QuadNum {
        ensure_events(sep, from);
        QuadNum best(0);
        for (const auto& e : events[sep]) {
            if (e.pos >= from) break;
            if (side > 0 ? e.plus : e.minus) best = e.pos;
        }
        return best;  // 0 = the base singularity
    };

    // (a) Singular prong germs of the rail foliation: both sides.
    for (int j = 0; j < map.num_seps(rail_fol); ++j) {
        for (int side : {+1, -1}) {
            QuadNum hi = first_block_above(j, QuadNum(0), side);
            rails.push_back(Rail{j, QuadNum(0), hi, false, side});
        }
    }
    // (b) Graph interval tips: the two one-sided extensions on the material
    // side of the tip's own interval.
    for (int i = 0; i < map.num_seps(ag.foliation()); ++i) {
        const GraphTip& t = ag.tip[i];
        if (t.t_sep < 0) throw std::logic_error("extreme_rails: graph has no tip data");
        int side = -sep_coord_sign(map, ag.foliation(), i);
        QuadNum up = first_block_above(t.t_sep, t.t_pos, side);
        QuadNum down = first_block_below(t.t_sep, t.t_pos, side);
        rails.push_back(Rail{t.t_sep, t.t_pos, up, true, side});
        rails.push_back(Rail{t.t_sep, down, t.t_pos, true, side});
    }

    std::sort(rails.begin(), rails.end(), [](const Rail& a, const Rail& b) {
        if (a.sep != b.sep) return a.sep < b.sep;
        int c = a.lo.cmp(b.lo);
        if (c != 0) return c < 0;
        return a.hi.cmp(b.hi) < 0;
    });
    rails.erase(std::unique(rails.begin(), rails.end(),
                            [](const Rail& a, const Rail& b) {
                                return a.sep == b.sep && a.lo == b.lo && a.hi == b.hi;
                            }),
                rails.end());
    return rails;
}

CompatPair make_compat_pair(const PAMap& map, const AdaptedGraph& gs, const AdaptedGraph& gu) {
    if (gs.foliation() != STABLE || gu.foliation() != UNSTABLE)
        throw std::invalid_argument("make_compat_pair: graphs must be (stable, unstable)");
    CompatPair p;
    p.gs = gs;
    p.gu = gu;
    p.ex_u = extreme_rails(map, gs);
    p.ex_s = extreme_rails(map, gu);
    return p;
}

CompatReport is_compatible_at(const PAMap& map, const CompatPair& pair, long n) {
    CompatReport rep;
    rep.ok = true;
    auto fail = [&](const std::string& kind, int fol, int sep, const QuadNum& pos) {
        rep.ok = false;
        rep.failures.push_back(CompatFailure{kind, fol, sep, pos});
    };
    // Length of f^n(gu) on unstable separatrix j.
    auto gu_len_at = [&](int j) {
        int src = map.sep_image(UNSTABLE, j, -n);
        return pair.gu.g.len[src] * map.lambda_pow(n);
    };
    // Tips of gs must lie in f^n(gu).
    for (int i = 0; i < (int)pair.gs.g.len.size(); ++i) {
        const GraphTip& t = pair.gs.tip[i];
        if (t.t_pos > gu_len_at(t.t_sep)) fail("endpoint", STABLE, i, t.t_pos);
    }
    // Tips of f^n(gu) must lie in gs.
    for (int j = 0; j < (int)pair.gu.g.len.size(); ++j) {
        const GraphTip& t = pair.gu.tip[j];
        int isep = map.sep_image(STABLE, t.t_sep, n);
        QuadNum ipos = map.pos_image(STABLE, t.t_pos, n);
        if (ipos > pair.gs.g.len[isep]) fail("endpoint", UNSTABLE, j, ipos);
    }
    // Extreme u-rails of gs must be contained in f^n(gu).
    for (const auto& r : pair.ex_u)
        if (r.hi > gu_len_at(r.sep)) fail("rail", STABLE, r.sep, r.hi);
    // Extreme s-rails of gu, transported by f^n, must be contained in gs.
    for (const auto& r : pair.ex_s) {
        int isep = map.sep_image(STABLE, r.sep, n);
        QuadNum ihi = map.pos_image(STABLE, r.hi, n);
        if (ihi > pair.gs.g.len[isep]) fail("rail", UNSTABLE, r.sep, ihi);
    }
    return rep;
}

namespace {

long cycle_of(const PAMap& map, int fol, int sep, std::vector<int>& out_cycle) {
    out_cycle.clear();
    int cur = sep;
    do {
        out_cycle.push_back(cur);
        cur = map.sep_image(fol, cur, 1);
    } while (cur != sep);
    return (long)out_cycle.size();
}

// Smallest n >= 0 with lambda^n * base >= target (or > target when strict).
long growth_threshold(const PAMap& map, const QuadNum& base, const QuadNum& target,
                      bool strict = false) {
    long n = 0;
    QuadNum v = base;
    while (strict ? v <= target : v < target) {
        v = v * map.lambda();
        ++n;
        if (n > 100000) throw std::logic_error("growth_threshold runaway");
    }
    return n;
}

}  // namespace

Coefficient compatibility_coefficient(const PAMap& map, const CompatPair& pair) {
    Coefficient out;
    // Forever bound: each condition "c <= lambda^n * len[sigma^-n(j)]" (or
    // its stable mirror) holds for all n past growth_threshold(minimal
    // cycle length, c).
    long forever = 0;
    std::vector<int> cyc;
    auto fold = [&](int fol, int sep, const QuadNum& c) {
        cycle_of(map, fol, sep, cyc);
        const StarGraph& g = fol == UNSTABLE ? pair.gu.g : pair.gs.g;
        QuadNum lmin = g.len[cyc[0]];
        for (int s : cyc)
            if (g.len[s] < lmin) lmin = g.len[s];
        if (lmin.sign() <= 0) throw std::logic_error("compatibility: empty graph interval");
        forever = std::max(forever, growth_threshold(map, lmin, c));
    };
    for (int i = 0; i < (int)pair.gs.g.len.size(); ++i)
        fold(UNSTABLE, pair.gs.tip[i].t_sep, pair.gs.tip[i].t_pos);
    for (int j = 0; j < (int)pair.gu.g.len.size(); ++j)
        fold(STABLE, pair.gu.tip[j].t_sep, pair.gu.tip[j].t_pos);
    for (const auto& r : pair.ex_u) fold(UNSTABLE, r.sep, r.hi);
    for (const auto& r : pair.ex_s) fold(STABLE, r.sep, r.hi);
    out.forever_bound = forever;

    // The Lemma's constructive bound from global extremes: lambda^n G > F
    // and lambda^n G >= M per foliation, with G the minimal interval, F the
    // farthest endpoint, M the farthest extreme-rail reach.
    auto global_bound = [&](int rail_fol) {
        const StarGraph& g = rail_fol == UNSTABLE ? pair.gu.g : pair.gs.g;
        const auto& tips = rail_fol == UNSTABLE ? pair.gs.tip : pair.gu.tip;
        const auto& ex = rail_fol == UNSTABLE ? pair.ex_u : pair.ex_s;
        QuadNum G = g.len[0];
        for (const auto& l : g.len)
            if (l < G) G = l;
        QuadNum F(0), M(0);
        for (const auto& t : tips)
            if (t.t_pos > F) F = t.t_pos;
        for (const auto& r : ex)
            if (r.hi > M) M = r.hi;
        return std::max(growth_threshold(map, G, F, true), growth_threshold(map, G, M));
    };
    out.paper_bound = std::max(global_bound(UNSTABLE), global_bound(STABLE));

    // Exact n(z): scan to the forever bound; n(z) is the start of the final
    // all-compatible suffix.
    long nz = 0;
    for (long n = forever; n-- > 0;) {
        if (!is_compatible_at(map, pair, n).ok) {
            nz = n + 1;
            break;
        }
    }
    out.n = nz;
    return out;
}

GraphData build_graphs(const PAMap& map, const FirstPoint& z) {
    GraphData d;
    d.z = z;
    d.seeds = unstable_seed_family(map, z);
    d.gs = generate_graph(map, d.seeds, STABLE);
    StarGraph stable_seeds = d.gs.g;
    d.gu = generate_graph(map, stable_seeds, UNSTABLE);
    d.pair = make_compat_pair(map, d.gs, d.gu);
    d.coeff = compatibility_coefficient(map, d.pair);
    return d;
}

}  // namespace pam
