#pragma once

#include "pamarkov/partition.hpp"

namespace pam {

/// The geometric type (n, {(h_i, v_i)}, rho, eps) of a geometrized Markov
/// partition. Indices are 0-based internally; JSON output is 1-based.
struct GeometricType {
    int n = 0;
    std::vector<std::pair<int, int>> hv;
    std::vector<std::vector<std::pair<int, int>>> rho;  // rho[i][j] = (k, l)
    std::vector<std::vector<int>> eps;                  // eps[i][j] in {+1, -1}

    bool operator==(const GeometricType& o) const {
        return n == o.n && hv == o.hv && rho == o.rho && eps == o.eps;
    }
};

/// A geometrized partition: every rectangle carries the global vertical
/// direction sign relative to +dir_u (the foliations of a translation
/// surface are orientable, so a global choice exists).
struct GeometricPartition {
    const MarkovPartition* mp;
    int vertical_sign = +1;
};

GeometricPartition geometrize(const MarkovPartition& mp, int vertical_sign = +1);

/// Extract the geometric type: horizontal subrectangles from the preimage
/// cuts (ordered bottom to top), vertical ones from the image cuts
/// (ordered left to right), rho from exact interior-point transport, eps
/// from exact vertical-displacement transport.
GeometricType extract_type(const PAMap& map, const GeometricPartition& gp);

/// The global-flip involution on types (vertical directions all reversed).
GeometricType flip_type(const GeometricType& t);

/// Relabel rectangles: pi maps old indices to new ones.
GeometricType relabel_type(const GeometricType& t, const std::vector<int>& pi);

/// Canonical byte form: the lexicographically minimal JSON serialization
/// over all rectangle relabelings (and the global flip when quotient_flip).
std::string canonical_type(const GeometricType& t, bool quotient_flip = false);

/// JSON serialization (1-based labels), stable key order.
std::string type_to_json(const GeometricType& t);
GeometricType type_from_json(const std::string& s);

/// Incidence matrix a_ij = number of horizontal subrectangles of R_i sent
/// into R_j.
std::vector<std::vector<long>> incidence_matrix(const GeometricType& t);

/// n(f) = max n(z) over the first-intersection orbit representatives.
struct OrderResult {
    long n_f = -1;
    std::vector<FirstPoint> reps;
    std::vector<long> coefficients;
};
OrderResult compatibility_order(const PAMap& map);

/// Caches representatives and per-representative graph data so order and
/// type-set computations at several n share the expensive geometry.
class TypePipeline {
public:
    explicit TypePipeline(const PAMap& m) : map_(m) {}
    const PAMap& map() const { return map_; }
    const std::vector<FirstPoint>& reps();
    const GraphData& graph_data(size_t i);
    long order();
    std::vector<long> coefficients();
    std::vector<std::string> types(long n, bool quotient_flip = false);

private:
    const PAMap& map_;
    bool have_reps_ = false;
    std::vector<FirstPoint> reps_;
    std::map<size_t, GraphData> gd_;
    long order_ = -1;
};

/// The set T(f, n) of primitive geometric types of order n, as canonical
/// byte forms (sorted, deduplicated). Requires n >= n(f).
std::vector<std::string> primitive_types(const PAMap& map, long n, bool quotient_flip = false);

struct CompareResult {
    std::string status;  // "equivalent", "distinct", "inconclusive"
    long n_f = -1, n_g = -1;
    std::vector<std::string> types_f, types_g;
    std::string detail;
};

/// The paper's conjugacy criterion at the tested order: distinct when the
/// compatibility orders differ; equivalent when the canonical type sets at
/// n = n(f) = n(g) coincide; otherwise inconclusive (a single-n mismatch
/// does not decide non-conjugacy under the existential quantifier).
CompareResult compare_invariants(const PAMap& f, const PAMap& g, bool quotient_flip = false);

}  // namespace pam
