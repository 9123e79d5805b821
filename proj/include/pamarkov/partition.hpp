#pragma once

#include "pamarkov/graphs.hpp"

namespace pam {

/// One maximal straight piece of a rectangle side: positions [lo, hi] along
/// a separatrix of the boundary graph.
struct SideArc {
    int sep;
    QuadNum lo, hi;
};

/// A cell of the per-square arrangement belonging to one rectangle, with
/// its chart polygon (counterclockwise) and its development offset in the
/// (u, s) eigen frame.
struct DevCell {
    int square;
    std::vector<Vec2q> poly;
    QuadNum off_u, off_s;
};

/// A rectangle of the partition: development box [s1,s2] x [u1,u2] in the
/// eigen frame (u vertical, s horizontal), its four corner points, side
/// decompositions into graph arcs, and its cells.
struct PRect {
    int id = -1;
    QuadNum u1, u2, s1, s2;
    QuadNum width() const { return s2 - s1; }   // mu^u extent of stable sides
    QuadNum height() const { return u2 - u1; }  // mu^s extent of unstable sides
    QuadNum area() const { return width() * height(); }
    // Corners indexed by (s,t) in {0,1}^2: corner_st = [s-side][u-side].
    SurfacePoint corner[2][2];
    std::vector<SideArc> side_stable[2];    // [0]: u = u1 (bottom), [1]: u = u2 (top)
    std::vector<SideArc> side_unstable[2];  // [0]: s = s1, [1]: s = s2
    std::vector<DevCell> cells;
    SurfacePoint witness;
};

struct MarkovPartition {
    long n = 0;
    FirstPoint z;
    StarGraph gs;      // stable boundary graph delta^s(z)
    StarGraph gu;      // base unstable graph delta^u(z) (un-iterated)
    StarGraph gu_eff;  // effective unstable boundary f^n(delta^u(z))
    std::vector<PRect> rects;
};

/// Thrown when a complement component fails to assemble into a rectangle
/// (a diagnostic: cannot occur when the boundary graphs are compatible).
struct AssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Faces of the complement of the two boundary graphs, assembled into
/// rectangles. The graphs are arbitrary star graphs; compatibility is the
/// caller's responsibility (build_partition checks it).
std::vector<PRect> extract_rectangles(const PAMap& map, const StarGraph& gs_eff,
                                      const StarGraph& gu_eff);

/// The primitive Markov partition R(z, n). Requires n >= n(z).
MarkovPartition build_partition(const PAMap& map, const GraphData& gd, long n);

struct MarkovReport {
    bool boundary_ok = false;  // (a) exact f/f^-1 invariance of the boundary graphs
    bool subrect_ok = false;   // (b) image overlaps are full vertical subrectangles
    bool cover_ok = false;     // (c) cover + disjoint interiors (exact areas)
    std::vector<std::string> issues;
    bool ok() const { return boundary_ok && subrect_ok && cover_ok; }
};

MarkovReport validate_markov(const PAMap& map, const MarkovPartition& mp);

struct AdaptedReport {
    bool corner_ok = false;    // singularities on boundaries are corners everywhere
    bool periodic_ok = false;  // no non-singular periodic boundary point
    std::vector<std::string> issues;
    bool ok() const { return corner_ok && periodic_ok; }
};

AdaptedReport validate_adapted(const PAMap& map, const MarkovPartition& mp,
                               long period_safety_factor = 3);

/// A maximal straight piece of a transverse graph inside a rectangle, in
/// the rectangle's development frame.
struct DevPiece {
    int sep;
    QuadNum pos_lo, pos_hi;    // positions along the separatrix
    QuadNum level;             // s (unstable piece) or u (stable piece)
    QuadNum span_lo, span_hi;  // u-span (unstable piece) or s-span (stable)
};

struct CutLine {
    QuadNum level;
    std::vector<DevPiece> pieces;  // sorted by span_lo
    bool full = false;             // pieces cover the rectangle's span exactly
};

/// Developed pieces of a star graph inside a rectangle, grouped into level
/// lines. Unstable graphs give vertical lines (s-levels), stable graphs
/// horizontal lines (u-levels). Pieces on the rectangle's own sides are
/// dropped; only strictly interior levels are returned.
std::vector<CutLine> transverse_cuts(const PAMap& map, const PRect& r, const StarGraph& g);

/// Per-rectangle cut lines of a graph across a whole partition, computed in
/// one pass over the graph's chunks with a per-square cell index.
std::vector<std::vector<CutLine>> partition_cuts(const PAMap& map, const MarkovPartition& mp,
                                                 const StarGraph& g);

/// True if the closed rectangle contains the point (checked per cell).
bool rect_contains(const PAMap& map, const PRect& r, const SurfacePoint& p);

/// Deterministic comparison key: the sorted canonical corner coordinates.
std::string rect_key(const PAMap& map, const PRect& r);

}  // namespace pam
