#include "pamarkov/firstpoints.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pam {

namespace {

// Drop the shared-basepoint touch at positions (0,0); a crossing with
// exactly one zero position would put a singularity in a leaf interior.
std::vector<ArcCrossing> drop_base_touch(std::vector<ArcCrossing> xs) {
    std::vector<ArcCrossing> out;
    for (auto& c : xs) {
        if (c.pos_a.sign() == 0 && c.pos_b.sign() == 0) continue;
        if (c.pos_a.sign() == 0 || c.pos_b.sign() == 0)
            throw std::logic_error("leaf interior crossing at a singularity");
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

bool is_first_intersection(const PAMap& map, int s_sep, int u_sep, const QuadNum& s_pos,
                           const QuadNum& u_pos) {
    if (s_pos.sign() <= 0 || u_pos.sign() <= 0)
        throw std::invalid_argument("is_first_intersection: positions must be positive");
    MeasuredChunks sa = map.sep_chunks(STABLE, s_sep, QuadNum(0), s_pos);
    MeasuredChunks ua = map.sep_chunks(UNSTABLE, u_sep, QuadNum(0), u_pos);
    auto xs = drop_base_touch(chunk_intersections(map.surface(), sa, ua));
    if (xs.size() != 1) return false;
    return xs[0].pos_a == s_pos && xs[0].pos_b == u_pos;
}

FirstPoint transport_first_point(const PAMap& map, const FirstPoint& z, long power) {
    FirstPoint w;
    w.s_sep = map.sep_image(STABLE, z.s_sep, power);
    w.u_sep = map.sep_image(UNSTABLE, z.u_sep, power);
    w.s_pos = map.pos_image(STABLE, z.s_pos, power);
    w.u_pos = map.pos_image(UNSTABLE, z.u_pos, power);
    w.z = map.point_at(STABLE, w.s_sep, w.s_pos);
    w.pair_period = z.pair_period;
    return w;
}

std::vector<FirstPoint> first_intersection_points(const PAMap& map, int trace_cap_doublings) {
    const long ns = map.num_seps(STABLE), nu = map.num_seps(UNSTABLE);

    // Orbits of separatrix pairs under (sigma_s, sigma_u).
    std::vector<std::vector<int>> seen(ns, std::vector<int>(nu, 0));
    std::vector<FirstPoint> reps;

    for (int s0 = 0; s0 < ns; ++s0) {
        for (int u0 = 0; u0 < nu; ++u0) {
            if (seen[s0][u0]) continue;
            long k = 0;
            {
                int s = s0, u = u0;
                do {
                    seen[s][u] = 1;
                    s = map.sep_image(STABLE, s, 1);
                    u = map.sep_image(UNSTABLE, u, 1);
                    ++k;
                } while (!(s == s0 && u == u0));
            }
            // Density search for an anchor crossing z0 on this pair: grow the
            // unstable prefix against a unit stable prefix.
            QuadNum ls(1), lu(1);
            std::vector<ArcCrossing> found;
            for (int d = 0; d <= trace_cap_doublings; ++d) {
                MeasuredChunks sa = map.sep_chunks(STABLE, s0, QuadNum(0), ls);
                MeasuredChunks ua = map.sep_chunks(UNSTABLE, u0, QuadNum(0), lu);
                found = drop_base_touch(chunk_intersections(map.surface(), sa, ua));
                if (!found.empty()) break;
                lu = lu * QuadNum(2);
                if (d == trace_cap_doublings)
                    throw std::runtime_error("first_intersection_points: density search cap");
            }
            const ArcCrossing* z0 = &found[0];
            for (const auto& c : found)
                if (c.pos_b < z0->pos_b) z0 = &c;
            QuadNum a0 = z0->pos_a, b0 = z0->pos_b;

            // All crossings in the compact box [0,a0]^s x [0, lambda^k b0]^u.
            QuadNum bhi = b0 * map.lambda_pow(k);
            MeasuredChunks sa = map.sep_chunks(STABLE, s0, QuadNum(0), a0);
            MeasuredChunks ua = map.sep_chunks(UNSTABLE, u0, QuadNum(0), bhi);
            // sorted by pos_a
            auto xs = drop_base_touch(chunk_intersections(map.surface(), sa, ua));

            // First intersection points = Pareto-minimal crossings; keep the
            // representatives inside the stable fundamental window.
            QuadNum alo = a0 / map.lambda_pow(k);
            QuadNum best_b;
            bool have_best = false;
            for (const auto& c : xs) {
                bool frontier = !have_best || c.pos_b < best_b;
                if (frontier) {
                    best_b = c.pos_b;
                    have_best = true;
                } else {
                    continue;
                }
                if (c.pos_a <= alo || c.pos_a > a0) continue;
                FirstPoint fp;
                fp.s_sep = s0;
                fp.u_sep = u0;
                fp.s_pos = c.pos_a;
                fp.u_pos = c.pos_b;
                fp.z = map.surface().canonical(c.point);
                fp.pair_period = k;
                reps.push_back(fp);
            }
        }
    }

    // Canonicalize each representative along its orbit: minimal
    // (stable separatrix id, stable position) over one pair period.
    for (auto& fp : reps) {
        FirstPoint best = fp;
        for (long m = 1; m < fp.pair_period; ++m) {
            FirstPoint w = transport_first_point(map, fp, m);
            if (w.s_sep < best.s_sep || (w.s_sep == best.s_sep && w.s_pos < best.s_pos)) best = w;
        }
        fp = best;
    }
    std::sort(reps.begin(), reps.end(), [](const FirstPoint& a, const FirstPoint& b) {
        if (a.s_sep != b.s_sep) return a.s_sep < b.s_sep;
        int c = a.s_pos.cmp(b.s_pos);
        if (c != 0) return c < 0;
        if (a.u_sep != b.u_sep) return a.u_sep < b.u_sep;
        return a.u_pos.cmp(b.u_pos) < 0;
    });
    // Defensive duplicate check (distinct representatives must be distinct
    // points; pairs are unique per point, so no cross-pair merging arises).
    for (size_t i = 1; i < reps.size(); ++i)
        if (reps[i].s_sep == reps[i - 1].s_sep && reps[i].s_pos == reps[i - 1].s_pos &&
            reps[i].u_sep == reps[i - 1].u_sep && reps[i].u_pos == reps[i - 1].u_pos)
            throw std::logic_error("first_intersection_points: duplicate representative");
    return reps;
}

}  // namespace pam
