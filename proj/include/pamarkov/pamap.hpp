#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "pamarkov/trace.hpp"

namespace pam {

/// Integer 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    long a = 1, b = 0, c = 0, d = 1;
    long trace() const { return a + d; }
    long det() const { return a * d - b * c; }
    Mat2 inverse() const { return Mat2{d, -b, -c, a}; }  // det must be 1
    Vec2q apply(const Vec2q& v) const {
        return {QuadNum(a) * v.x + QuadNum(b) * v.y, QuadNum(c) * v.x + QuadNum(d) * v.y};
    }
    Mat2 operator*(const Mat2& o) const {
        return Mat2{a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

enum Foliation : int { STABLE = 0, UNSTABLE = 1 };

struct Singularity {
    int id;
    bool is_cone;
    int vertex = -1;       // cone vertex id, or -1 for a marked point
    SurfacePoint point;    // canonical representative
    int prongs;            // per foliation (2 for marked regular points)
    int image;             // f-image singularity id
    int orbit;             // orbit index among singularities
    int period;            // orbit length under f
};

struct Separatrix {
    int id;
    int foliation;
    int sing;       // base singularity
    int prong;      // cyclic index around the base
    int sign;       // germ direction sign: +1 along +dir, -1 along -dir
    Sector sector;  // hosting sector for cone bases ({-1,-1} for marked)
    Germ germ;      // normalized start state
    int image;      // f-image separatrix id
};

/// Leaf arc with separatrix anchoring: the segment [lo, hi] (transverse
/// measure positions) of one separatrix.
struct LeafArcData {
    int foliation = -1;
    int sep = -1;
    QuadNum lo, hi;
    MeasuredChunks chunks;
    QuadNum measure() const { return hi - lo; }
};

/// Affine germ action of one power of the map on an origami: per-square
/// anchors for the image of each bottom-edge germ, plus the vertex images.
struct OrigamiAction {
    Mat2 m;
    std::vector<Germ> e_anchor;     // per square
    std::vector<int> vertex_image;  // per vertex
    std::array<int, 4> xc4;         // convention-boundary crossings per quarter image
};

/// A concrete pseudo-Anosov map: a hyperbolic SL(2,Z) matrix acting on the
/// torus with marked periodic points, or an affine automorphism of an
/// origami. All derived data (stretch factor, eigen-directions, transverse
/// measures, separatrix tables) is exact over Q(sqrt(D)).
class PAMap {
public:
    static PAMap make_torus(Mat2 a, const std::vector<std::pair<mpq_class, mpq_class>>& marked);
    /// seed: (i0, j0) 0-based, meaning the image of square i0's bottom-left
    /// germ is anchored at square j0's bottom-left corner. When absent all
    /// anchors are tried in order and the first consistent one is used.
    static PAMap make_origami(FlatSurface surf, Mat2 a, std::optional<std::pair<int, int>> seed);

    const FlatSurface& surface() const { return *surf_; }
    bool is_torus() const { return torus_; }
    const Mat2& matrix() const { return mat_; }
    long D() const { return d_; }
    const QuadNum& lambda() const { return lambda_; }
    int eig_sign() const { return eig_sign_; }  // sign of both eigenvalues
    const Vec2q& dir(int foliation) const { return foliation == UNSTABLE ? dir_u_ : dir_s_; }
    /// Transverse coordinate forms: du measures unstable arcs (mu^s),
    /// ds measures stable arcs (mu^u); du(dir_u) = ds(dir_s) = 1.
    QuadNum du(const Vec2q& v) const;
    QuadNum ds(const Vec2q& v) const;
    /// Total surface area in the (u, s) eigen frame.
    QuadNum eigen_area() const;

    const std::vector<Singularity>& singularities() const { return sing_; }
    const std::vector<Separatrix>& seps(int foliation) const { return seps_[foliation]; }
    int num_seps(int foliation) const { return (int)seps_[foliation].size(); }

    /// sigma^power on separatrix indices of one foliation.
    int sep_image(int foliation, int sep, long power = 1) const;
    /// Measure position transport: unstable positions scale by lambda^power,
    /// stable ones by lambda^-power.
    QuadNum pos_image(int foliation, const QuadNum& pos, long power) const;
    QuadNum lambda_pow(long k) const;

    /// Exact point on a separatrix at a given transverse-measure position.
    SurfacePoint point_at(int foliation, int sep, const QuadNum& pos) const;
    /// Chunks of the separatrix segment [lo, hi], measure-positioned.
    MeasuredChunks sep_chunks(int foliation, int sep, const QuadNum& lo, const QuadNum& hi) const;
    /// Leaf arc [lo, hi] on a separatrix (traced, with measure bookkeeping).
    LeafArcData sep_arc(int foliation, int sep, const QuadNum& lo, const QuadNum& hi) const;

    /// Exact image of an arbitrary point under f^power.
    SurfacePoint apply(const SurfacePoint& p, long power = 1) const;

    /// Singularity id containing a point, or -1.
    int singularity_at(const SurfacePoint& p) const;

    /// Image of a leaf point given by separatrix coordinates.
    std::pair<int, QuadNum> apply_leaf(int foliation, int sep, const QuadNum& pos,
                                       long power = 1) const;

    /// All chart representatives of all singular points (tracer stop set).
    const std::vector<SurfacePoint>& singular_reps() const { return sing_reps_; }

    /// Trace a leaf ray from a separatrix germ / from a leaf point.
    /// Asserts the ray does not meet a singularity (it cannot, for rational
    /// markings and irrational eigen-slopes); returns the traced arc.
    LeafArcData trace_leaf(int foliation, int sep, const QuadNum& from, const QuadNum& to) const;

private:
    std::shared_ptr<const FlatSurface> surf_;
    bool torus_ = false;
    Mat2 mat_;
    long d_ = 0;
    QuadNum lambda_;
    int eig_sign_ = 1;
    Vec2q dir_u_, dir_s_;
    QuadNum m_u_, m_s_;  // eigen slopes

    std::vector<Singularity> sing_;
    std::vector<Separatrix> seps_[2];
    std::vector<SurfacePoint> sing_reps_;

    // Origami actions for f and f^-1 (null for torus maps).
    std::shared_ptr<OrigamiAction> act_fwd_, act_inv_;

    // Separatrix tracing caches, one per (foliation, sep).
    struct SepCache {
        std::vector<LeafChunk> chunks;  // t0/t1 hold absolute measure positions
        QuadNum length;
        Germ cont;
    };
    mutable std::vector<SepCache> cache_[2];
    mutable std::map<long, QuadNum> lambda_pow_cache_;

    void init_eigen();
    void build_torus_singularities(const std::vector<std::pair<mpq_class, mpq_class>>& marked);
    void build_origami_singularities();
    void build_separatrices();
    void link_separatrix_images();
    void extend_cache(int foliation, int sep, const QuadNum& to) const;

    SurfacePoint apply_torus_once(const SurfacePoint& p, bool inverse) const;
    SurfacePoint apply_origami_once(const SurfacePoint& p, bool inverse) const;
    Germ origami_germ_image(const OrigamiAction& act, const Sector& sec, const Vec2q& dv) const;
    friend OrigamiAction propagate_origami(const FlatSurface& s, const Mat2& a, int i0, int j0);
};

}  // namespace pam
