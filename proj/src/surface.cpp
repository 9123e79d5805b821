#include "pamarkov/surface.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pam {

static std::vector<int> invert_perm(const std::vector<int>& p) {
    std::vector<int> inv(p.size(), -1);
    for (int i = 0; i < (int)p.size(); ++i) {
        if (p[i] < 0 || p[i] >= (int)p.size() || inv[p[i]] != -1)
            throw std::invalid_argument("FlatSurface: not a permutation");
        inv[p[i]] = i;
    }
    return inv;
}

FlatSurface::FlatSurface(std::vector<int> right, std::vector<int> top)
    : n_((int)right.size()), right_(std::move(right)), top_(std::move(top)) {
    if (n_ <= 0 || (int)top_.size() != n_)
        throw std::invalid_argument("FlatSurface: bad permutation sizes");
    right_inv_ = invert_perm(right_);
    top_inv_ = invert_perm(top_);

    // Connectivity: the group generated by the two permutations must act
    // transitively on squares.
    std::vector<int> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (int t : {right_[s], top_[s], right_inv_[s], top_inv_[s]}) {
            if (!seen[t]) {
                seen[t] = 1;
                ++count;
                stack.push_back(t);
            }
        }
    }
    if (count != n_) throw std::invalid_argument("FlatSurface: disconnected surface");

    build_vertices();

    // Euler characteristic of the square complex: V - E + F = V - 2n + n.
    int chi = num_vertices() - n_;
    if ((2 - chi) % 2 != 0) throw std::logic_error("FlatSurface: odd Euler defect");
    genus_ = (2 - chi) / 2;
}

void FlatSurface::build_vertices() {
    sector_vertex_.assign(4 * n_, {-1, -1});
    // Walk sectors counterclockwise around each vertex:
    //   (s,BL) -> (r^-1 s, BR) -> (t^-1 r^-1 s, TR) -> (r t^-1 r^-1 s, TL)
    //   -> (t r t^-1 r^-1 s, BL) -> ...
    auto next = [&](const Sector& sec) -> Sector {
        switch (sec.corner) {
            case BL: return {right_inv_[sec.square], BR};
            case BR: return {top_inv_[sec.square], TR};
            case TR: return {right_[sec.square], TL};
            default: return {top_[sec.square], BL};
        }
    };
    for (int s = 0; s < n_; ++s) {
        if (sector_vertex_[4 * s + BL].first != -1) continue;
        std::vector<Sector> cycle;
        Sector cur{s, BL};
        do {
            sector_vertex_[4 * cur.square + cur.corner] = {(int)vertices_.size(),
                                                           (int)cycle.size()};
            cycle.push_back(cur);
            cur = next(cur);
        } while (!(cur == Sector{s, BL}));
        if (cycle.size() % 4 != 0) throw std::logic_error("FlatSurface: bad vertex cycle");
        vertices_.push_back(std::move(cycle));
    }
}

std::vector<int> FlatSurface::cone_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < num_vertices(); ++v)
        if (is_cone(v)) out.push_back(v);
    return out;
}

std::array<int, 2> FlatSurface::corner_coords(int corner) {
    switch (corner) {
        case BL: return {0, 0};
        case BR: return {1, 0};
        case TR: return {1, 1};
        default: return {0, 1};
    }
}

bool FlatSurface::is_corner_coords(const QuadNum& x, const QuadNum& y) {
    auto is01 = [](const QuadNum& v) { return v.is_zero() || v == QuadNum(1); };
    return is01(x) && is01(y);
}

void FlatSurface::check_point(const SurfacePoint& p) const {
    if (p.square < 0 || p.square >= n_)
        throw std::invalid_argument("SurfacePoint: square out of range");
    if (p.x.sign() < 0 || p.y.sign() < 0 || (p.x - 1).sign() > 0 || (p.y - 1).sign() > 0)
        throw std::invalid_argument("SurfacePoint: coordinates outside [0,1]");
}

std::vector<SurfacePoint> FlatSurface::representatives(const SurfacePoint& p) const {
    check_point(p);
    bool x0 = p.x.is_zero(), x1 = p.x == QuadNum(1);
    bool y0 = p.y.is_zero(), y1 = p.y == QuadNum(1);
    if ((x0 || x1) && (y0 || y1)) {
        int corner = x0 ? (y0 ? BL : TL) : (y0 ? BR : TR);
        auto [v, idx] = sector_vertex(p.square, corner);
        std::vector<SurfacePoint> reps;
        for (const Sector& s : vertices_[v]) {
            auto cc = corner_coords(s.corner);
            reps.emplace_back(s.square, QuadNum((long)cc[0]), QuadNum((long)cc[1]));
        }
        return reps;
    }
    if (x0 || x1) {
        int sq = x0 ? right_inv_[p.square] : right_[p.square];
        return {p, SurfacePoint(sq, x0 ? QuadNum(1) : QuadNum(0), p.y)};
    }
    if (y0 || y1) {
        int sq = y0 ? top_inv_[p.square] : top_[p.square];
        return {p, SurfacePoint(sq, p.x, y0 ? QuadNum(1) : QuadNum(0))};
    }
    return {p};
}

SurfacePoint FlatSurface::canonical(const SurfacePoint& p) const {
    auto reps = representatives(p);
    SurfacePointLess less;
    const SurfacePoint* best = &reps[0];
    for (const auto& r : reps)
        if (less(r, *best)) best = &r;
    return *best;
}

bool FlatSurface::same_point(const SurfacePoint& p, const SurfacePoint& q) const {
    SurfacePoint cp = canonical(p), cq = canonical(q);
    SurfacePointLess less;
    return !less(cp, cq) && !less(cq, cp);
}

int FlatSurface::vertex_at(const SurfacePoint& p) const {
    check_point(p);
    if (!is_corner_coords(p.x, p.y)) return -1;
    bool x0 = p.x.is_zero(), y0 = p.y.is_zero();
    int corner = x0 ? (y0 ? BL : TL) : (y0 ? BR : TR);
    return sector_vertex(p.square, corner).first;
}

}  // namespace pam
