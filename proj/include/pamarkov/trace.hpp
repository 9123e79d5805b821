#pragma once

#include <optional>
#include <vector>

#include "pamarkov/surface.hpp"

namespace pam {

/// Straight segment inside one square chart, with its parameter span
/// [t0, t1] as a fraction of the full requested displacement.
struct LeafChunk {
    int square;
    Vec2q a, b;
    QuadNum t0, t1;
};

/// A start state for tracing: chart point plus direction, normalized so
/// the motion enters (or runs along an edge of) the closed chart. The
/// normalization conventions are:
///   - outward-pointing starts switch to the glued chart;
///   - motion along a vertical edge lives in the chart where that edge is
///     x = 0, motion along a horizontal edge in the chart where it is y = 0.
/// At a cone vertex the chart representative chosen by the caller selects
/// the sector; normalization preserves it when the direction lies in the
/// sector's closed quadrant.
struct Germ {
    int square;
    Vec2q p;
    Vec2q dir;
};

Germ normalize_germ(const FlatSurface& s, int square, Vec2q p, Vec2q dir);

struct TraceResult {
    std::vector<LeafChunk> chunks;
    SurfacePoint end;          // chart endpoint, not canonicalized
    bool truncated = false;    // stopped strictly before the full displacement
    int stop_vertex = -1;      // vertex id when stopped at a cone point
    bool stopped_at_marked = false;
    QuadNum completed;         // fraction of the displacement actually traced
    Germ final_germ;           // continuation state (valid when not truncated)
};

/// Trace the straight displacement `disp` from `start` across the square
/// gluings. Truncates at cone vertices (straight continuation undefined)
/// and, when `stops` is given, at any of those points (all chart
/// representatives must be supplied). A flat vertex hit diagonally is
/// passed through by processing the two edge crossings in x-then-y order.
TraceResult trace_displacement(const FlatSurface& s, const Germ& start, const Vec2q& disp,
                               const std::vector<SurfacePoint>* stops = nullptr,
                               int max_chunks = 4000000);

/// Merge consecutive chunks that continue each other inside one square.
std::vector<LeafChunk> merge_collinear(const FlatSurface& s, const std::vector<LeafChunk>& cs);

/// A transverse intersection of two chunk lists.
struct ArcCrossing {
    SurfacePoint point;
    QuadNum pos_a;  // measure position along the first arc
    QuadNum pos_b;  // measure position along the second arc
};

/// Chunk list with measure positions: chunk i spans measure [m0[i], m0[i]+len_i].
struct MeasuredChunks {
    std::vector<LeafChunk> chunks;
    std::vector<QuadNum> m0;      // start measure of each chunk
    std::vector<QuadNum> m1;      // end measure of each chunk
};

/// All transverse intersections between two measured chunk lists, sorted
/// by position along a. The two lists must run in transverse directions.
std::vector<ArcCrossing> chunk_intersections(const FlatSurface& s, const MeasuredChunks& a,
                                             const MeasuredChunks& b);

}  // namespace pam
