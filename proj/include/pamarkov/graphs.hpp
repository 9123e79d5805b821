#pragma once

#include "pamarkov/firstpoints.hpp"
#include "pamarkov/pamap.hpp"

namespace pam {

/// Star-form graph of leaf intervals: on each separatrix of `foliation` one
/// compact interval [0, len] from the singularity (len 0 = no interval).
/// Adapted graphs additionally know where each tip lands on the transverse
/// singular leaves.
struct StarGraph {
    int foliation = -1;
    std::vector<QuadNum> len;  // per separatrix id of `foliation`

    bool contains(int sep, const QuadNum& pos) const {
        return pos.sign() >= 0 && pos <= len[sep];
    }
};

struct GraphTip {
    int t_sep = -1;  // transverse separatrix carrying the tip
    QuadNum t_pos;   // position of the tip along it
};

struct AdaptedGraph {
    StarGraph g;
    std::vector<GraphTip> tip;  // per separatrix of g.foliation

    int foliation() const { return g.foliation; }
};

/// The primitive segment J^u(z) = [q, z]^u.
LeafArcData primitive_segment(const PAMap& map, const FirstPoint& z);

/// The family J^u(z) = union of f^{-i}([q,z]^u): per-separatrix maximal
/// intervals, f^-1-invariant. Iterates until the next pullback is contained
/// in the accumulated union and re-verifies invariance.
StarGraph unstable_seed_family(const PAMap& map, const FirstPoint& z);

/// The graph adapted to f generated by a transverse invariant seed family:
/// on every separatrix of `target` the segment from the singularity to its
/// first crossing with the union of seeds. Verifies adaptedness.
AdaptedGraph generate_graph(const PAMap& map, const StarGraph& seeds, int target,
                            int trace_cap_doublings = 48);

/// f^n-image of a star graph (exact; lengths scale by lambda^{+-n}).
StarGraph iterate_graph(const PAMap& map, const StarGraph& g, long n);

/// A rail: a transverse compact segment, stored on its separatrix.
struct Rail {
    int sep;  // separatrix of the transverse foliation
    QuadNum lo, hi;
    bool from_tip;  // anchored at a graph tip (else at a singular prong)
    int side;       // witness side: +1 / -1 in the transverse coordinate
};

/// The extreme rails of an adapted graph: for every non-regular point of
/// the graph (interval tips and singular prongs of the transverse
/// foliation) and each side admitting a swept-rectangle witness, the
/// maximal transverse segment through it ending at the first blocking
/// crossings. Rails are deduplicated as segments.
std::vector<Rail> extreme_rails(const PAMap& map, const AdaptedGraph& ag,
                                int trace_cap_doublings = 48);

struct CompatFailure {
    std::string kind;  // "endpoint" or "rail"
    int foliation;     // foliation of the offending object's graph
    int sep;
    QuadNum pos;
};

struct CompatReport {
    bool ok = false;
    std::vector<CompatFailure> failures;
};

/// Precomputed data for compatibility scans of (delta^s, f^n(delta^u)).
struct CompatPair {
    AdaptedGraph gs;            // stable graph
    AdaptedGraph gu;            // unstable graph (un-iterated)
    std::vector<Rail> ex_u;     // extreme u-rails of gs (unstable segments)
    std::vector<Rail> ex_s;     // extreme s-rails of gu (stable segments)
};

CompatPair make_compat_pair(const PAMap& map, const AdaptedGraph& gs, const AdaptedGraph& gu);

/// Compatibility of gs with f^n(gu), per the endpoint and extreme-rail
/// containment conditions. Exact.
CompatReport is_compatible_at(const PAMap& map, const CompatPair& pair, long n);

struct Coefficient {
    long n = -1;             // n(z)
    long forever_bound = 0;  // all conditions provably hold for every m >= this
    long paper_bound = 0;    // the Lemma's constructive bound (global min/max form)
};

/// The compatibility coefficient n(z): minimal n such that delta^s(z) and
/// f^m(delta^u(z)) are compatible for every m >= n. Exact: conditions are
/// scanned up to a computed threshold beyond which they hold forever.
Coefficient compatibility_coefficient(const PAMap& map, const CompatPair& pair);

/// Pipeline bundle for one first-intersection point.
struct GraphData {
    FirstPoint z;
    StarGraph seeds;
    AdaptedGraph gs, gu;
    CompatPair pair;
    Coefficient coeff;
};

GraphData build_graphs(const PAMap& map, const FirstPoint& z);

}  // namespace pam
