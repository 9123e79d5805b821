#pragma once

#include <array>
#include <vector>

#include "pamarkov/qnum.hpp"

namespace pam {

/// Corner labels of a unit square chart, also used as sector types: the
/// quarter-disk of the square at that corner. BL spans directions [E,N],
/// BR spans [N,W], TR spans [W,S], TL spans [S,E] (counterclockwise).
enum Corner : int { BL = 0, BR = 1, TR = 2, TL = 3 };

struct Vec2q {
    QuadNum x, y;
    Vec2q() = default;
    Vec2q(QuadNum x_, QuadNum y_) : x(std::move(x_)), y(std::move(y_)) {}
    Vec2q operator+(const Vec2q& o) const { return {x + o.x, y + o.y}; }
    Vec2q operator-(const Vec2q& o) const { return {x - o.x, y - o.y}; }
    Vec2q operator*(const QuadNum& t) const { return {x * t, y * t}; }
    bool operator==(const Vec2q& o) const { return x == o.x && y == o.y; }
    /// Sign of the cross product x*o.y - y*o.x.
    int cross_sign(const Vec2q& o) const { return (x * o.y - y * o.x).sign(); }
};

/// A point in the chart of one square; coordinates in [0,1] exactly.
struct SurfacePoint {
    int square = 0;  // 0-based
    QuadNum x, y;
    SurfacePoint() = default;
    SurfacePoint(int sq, QuadNum px, QuadNum py)
        : square(sq), x(std::move(px)), y(std::move(py)) {}
};

/// A sector: the corner c of square sq, i.e. one angular quarter around
/// the vertex that corner is glued to.
struct Sector {
    int square = -1;
    int corner = -1;
    bool operator==(const Sector& o) const {
        return square == o.square && corner == o.corner;
    }
};

/// Square-tiled translation surface (origami). Squares are glued by two
/// permutations: right[i] is the square to the right of i, top[i] the one
/// above. Vertices are the corner classes; a vertex whose total angle
/// exceeds 2*pi is a cone point.
class FlatSurface {
public:
    /// Permutations are 0-based images. Throws on malformed input or a
    /// disconnected surface.
    FlatSurface(std::vector<int> right, std::vector<int> top);

    /// One-square torus.
    static FlatSurface torus() { return FlatSurface({0}, {0}); }

    int num_squares() const { return n_; }
    int right(int i) const { return right_[i]; }
    int top(int i) const { return top_[i]; }
    int right_inv(int i) const { return right_inv_[i]; }
    int top_inv(int i) const { return top_inv_[i]; }

    int num_vertices() const { return (int)vertices_.size(); }
    /// CCW cyclic list of sectors around vertex v; entry 0 is a BL sector.
    const std::vector<Sector>& vertex_cycle(int v) const { return vertices_[v]; }
    /// Vertex id and cycle position of a sector.
    std::pair<int, int> sector_vertex(int square, int corner) const {
        return sector_vertex_[4 * square + corner];
    }
    bool is_cone(int v) const { return vertices_[v].size() > 4; }
    /// Prongs per foliation at vertex v: cycle length / 2.
    int prongs(int v) const { return (int)vertices_[v].size() / 2; }
    int genus() const { return genus_; }
    std::vector<int> cone_vertices() const;

    /// Chart coordinates of corner c (exact 0/1 values).
    static std::array<int, 2> corner_coords(int corner);

    /// True if (x, y) are both in {0, 1}.
    static bool is_corner_coords(const QuadNum& x, const QuadNum& y);

    /// Canonical representative of a point: the lex-min (square, x, y)
    /// among all glued images. Interior points are their own canonical form.
    SurfacePoint canonical(const SurfacePoint& p) const;

    /// All chart representatives of a point (1 interior, 2 edge, or the
    /// full corner class).
    std::vector<SurfacePoint> representatives(const SurfacePoint& p) const;

    bool same_point(const SurfacePoint& p, const SurfacePoint& q) const;

    /// Vertex id of a corner point, or -1 if p is not at a corner.
    int vertex_at(const SurfacePoint& p) const;

private:
    int n_;
    std::vector<int> right_, top_, right_inv_, top_inv_;
    std::vector<std::vector<Sector>> vertices_;
    std::vector<std::pair<int, int>> sector_vertex_;
    int genus_ = 0;

    void build_vertices();
    void check_point(const SurfacePoint& p) const;
};

/// Strict ordering of canonical surface points (square, then x, then y).
struct SurfacePointLess {
    bool operator()(const SurfacePoint& a, const SurfacePoint& b) const {
        if (a.square != b.square) return a.square < b.square;
        int c = a.x.cmp(b.x);
        if (c != 0) return c < 0;
        c = a.y.cmp(b.y);
        if (c != 0) return c < 0;
        return false;
    }
};

}  // namespace pam
