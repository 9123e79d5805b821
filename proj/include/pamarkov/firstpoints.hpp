#pragma once

#include "pamarkov/pamap.hpp"

namespace pam {

/// A first intersection point z of a stable and an unstable separatrix:
/// (p,z]^s and (q,z]^u meet only at z. Coordinates are the transverse
/// measure positions along the two separatrices.
struct FirstPoint {
    int s_sep = -1;
    int u_sep = -1;
    QuadNum s_pos;  // mu^u([p,z]^s)
    QuadNum u_pos;  // mu^s([q,z]^u)
    SurfacePoint z;
    long pair_period = 0;  // least k with f^k fixing both separatrices
};

/// Exact first-intersection test for a point given by its positions on the
/// two separatrices: the closed initial segments must cross exactly once.
bool is_first_intersection(const PAMap& map, int s_sep, int u_sep, const QuadNum& s_pos,
                           const QuadNum& u_pos);

/// One representative per f-orbit of first intersection points, found per
/// separatrix-pair orbit inside a fundamental domain of f^k. Deterministic:
/// representatives are canonicalized to the lexicographically minimal
/// (stable separatrix id, stable position) along their orbit and sorted.
std::vector<FirstPoint> first_intersection_points(const PAMap& map,
                                                  int trace_cap_doublings = 48);

/// f^power image of a first intersection point (separatrix transport).
FirstPoint transport_first_point(const PAMap& map, const FirstPoint& z, long power);

}  // namespace pam
