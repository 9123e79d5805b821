// Test-only oracle utilities: 256-bit interval arithmetic over MPFR with
// outward rounding, used as an independent numeric shadow of the exact
// Q(sqrt(D)) computations.
#pragma once

#include <mpfr.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "pamarkov/pamap.hpp"

namespace oracle {

constexpr mpfr_prec_t kPrec = 256;

class Iv {
public:
    Iv() {
        mpfr_init2(lo_, kPrec);
        mpfr_init2(hi_, kPrec);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }
    Iv(const Iv& o) : Iv() {
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    Iv& operator=(const Iv& o) {
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
        return *this;
    }
    ~Iv() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    static Iv from_long(long v) {
        Iv r;
        mpfr_set_si(r.lo_, v, MPFR_RNDD);
        mpfr_set_si(r.hi_, v, MPFR_RNDU);
        return r;
    }
    static Iv from_mpq(const mpq_class& q) {
        Iv r;
        mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    static Iv sqrt_of(long d) {
        Iv r;
        mpfr_sqrt_ui(r.lo_, (unsigned long)d, MPFR_RNDD);
        mpfr_sqrt_ui(r.hi_, (unsigned long)d, MPFR_RNDU);
        return r;
    }
    /// Independent evaluation of a + b sqrt(D).
    static Iv from_qnum(const pam::QuadNum& x) {
        Iv a = from_mpq(x.a());
        if (x.b() == 0) return a;
        return a + from_mpq(x.b()) * sqrt_of(x.d());
    }

    Iv operator+(const Iv& o) const {
        Iv r;
        mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
        mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
        return r;
    }
    Iv operator-(const Iv& o) const {
        Iv r;
        mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
        mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
        return r;
    }
    Iv operator*(const Iv& o) const {
        Iv r;
        mpfr_t t;
        mpfr_init2(t, kPrec);
        bool first = true;
        for (int i = 0; i < 4; ++i) {
            mpfr_mul(t, i & 1 ? hi_ : lo_, i & 2 ? o.hi_ : o.lo_, MPFR_RNDD);
            if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
            mpfr_mul(t, i & 1 ? hi_ : lo_, i & 2 ? o.hi_ : o.lo_, MPFR_RNDU);
            if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
            first = false;
        }
        mpfr_clear(t);
        return r;
    }
    Iv operator/(const Iv& o) const {
        if (o.contains_zero()) throw std::runtime_error("oracle: division interval contains 0");
        Iv r;
        mpfr_t t;
        mpfr_init2(t, kPrec);
        bool first = true;
        for (int i = 0; i < 4; ++i) {
            mpfr_div(t, i & 1 ? hi_ : lo_, i & 2 ? o.hi_ : o.lo_, MPFR_RNDD);
            if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
            mpfr_div(t, i & 1 ? hi_ : lo_, i & 2 ? o.hi_ : o.lo_, MPFR_RNDU);
            if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
            first = false;
        }
        mpfr_clear(t);
        return r;
    }

    bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
    /// Certified sign: -1/+1 when the interval excludes zero, 0 otherwise.
    int sign() const {
        if (mpfr_sgn(lo_) > 0) return 1;
        if (mpfr_sgn(hi_) < 0) return -1;
        return 0;
    }
    /// Certified strict comparison: -1 if *this < o, +1 if >, 0 undecided.
    int cmp(const Iv& o) const { return (*this - o).sign(); }
    /// True if the enclosure of the exact value x intersects [lo, hi].
    bool encloses(const pam::QuadNum& x) const {
        Iv e = from_qnum(x);
        return mpfr_cmp(lo_, e.hi_) <= 0 && mpfr_cmp(e.lo_, hi_) <= 0;
    }
    double mid() const {
        mpfr_t t;
        mpfr_init2(t, kPrec);
        mpfr_add(t, lo_, hi_, MPFR_RNDN);
        mpfr_div_ui(t, t, 2, MPFR_RNDN);
        double v = mpfr_get_d(t, MPFR_RNDN);
        mpfr_clear(t);
        return v;
    }

private:
    mpfr_t lo_, hi_;
};

struct IvVec {
    Iv x, y;
};

struct ShadowTrace {
    bool ok = false;          // every wall decision certified
    int square = -1;          // final chart
    IvVec end;                // final point enclosure
    long chunks = 0;
};

/// Independent interval ray tracer: walks the square gluings with interval
/// coordinates, certifying every wall decision with 256-bit enclosures.
/// Fails (ok = false) if any decision cannot be certified. Corner hits are
/// genuinely uncertifiable and the fixtures avoid them.
inline ShadowTrace shadow_trace(const pam::FlatSurface& s, int square, IvVec p, IvVec disp,
                                int dxs, int dys, long max_steps = 200000) {
    ShadowTrace out;
    Iv one = Iv::from_long(1);
    Iv rx = disp.x, ry = disp.y;
    for (long step = 0; step < max_steps; ++step) {
        bool has_tx = dxs != 0, has_ty = dys != 0;
        Iv tx, ty;
        if (has_tx) tx = dxs > 0 ? (one - p.x) / rx : p.x / (Iv::from_long(0) - rx);
        if (has_ty) ty = dys > 0 ? (one - p.y) / ry : p.y / (Iv::from_long(0) - ry);
        int which;  // 0: x wall first, 1: y wall first, 2: ends here
        if (has_tx && has_ty) {
            int cxy = tx.cmp(ty);
            if (cxy == 0) return out;  // uncertified
            const Iv& tmin = cxy < 0 ? tx : ty;
            int cend = tmin.cmp(one);
            if (cend == 0) return out;
            which = cend >= 0 ? 2 : (cxy < 0 ? 0 : 1);
        } else if (has_tx) {
            int cend = tx.cmp(one);
            if (cend == 0) return out;
            which = cend >= 0 ? 2 : 0;
        } else {
            int cend = ty.cmp(one);
            if (cend == 0) return out;
            which = cend >= 0 ? 2 : 1;
        }
        ++out.chunks;
        if (which == 2) {
            out.ok = true;
            out.square = square;
            out.end = IvVec{p.x + rx, p.y + ry};
            return out;
        }
        if (which == 0) {
            Iv t = tx;
            Iv ny = p.y + ry * t;
            Iv rem = one - t;
            rx = rx * rem;
            ry = ry * rem;
            p.x = Iv::from_long(dxs > 0 ? 0 : 1);
            p.y = ny;
            square = dxs > 0 ? s.right(square) : s.right_inv(square);
        } else {
            Iv t = ty;
            Iv nx = p.x + rx * t;
            Iv rem = one - t;
            rx = rx * rem;
            ry = ry * rem;
            p.y = Iv::from_long(dys > 0 ? 0 : 1);
            p.x = nx;
            square = dys > 0 ? s.top(square) : s.top_inv(square);
        }
    }
    return out;
}

/// Interval re-solve of a chunk-pair intersection; true if the exact
/// crossing point and positions are enclosed.
inline bool shadow_crossing(const pam::LeafChunk& a, const pam::LeafChunk& b,
                            const pam::ArcCrossing& exact, const pam::QuadNum& am0,
                            const pam::QuadNum& am1, const pam::QuadNum& bm0,
                            const pam::QuadNum& bm1) {
    Iv ax = Iv::from_qnum(a.a.x), ay = Iv::from_qnum(a.a.y);
    Iv ux = Iv::from_qnum(a.b.x) - ax, uy = Iv::from_qnum(a.b.y) - ay;
    Iv bx = Iv::from_qnum(b.a.x), by = Iv::from_qnum(b.a.y);
    Iv vx = Iv::from_qnum(b.b.x) - bx, vy = Iv::from_qnum(b.b.y) - by;
    Iv det = ux * vy - uy * vx;
    if (det.contains_zero()) return false;
    Iv wx = bx - ax, wy = by - ay;
    Iv t = (wx * vy - wy * vx) / det;
    Iv r = (wx * uy - wy * ux) / det;
    Iv px = ax + ux * t, py = ay + uy * t;
    Iv pa = Iv::from_qnum(am0) + t * (Iv::from_qnum(am1) - Iv::from_qnum(am0));
    Iv pb = Iv::from_qnum(bm0) + r * (Iv::from_qnum(bm1) - Iv::from_qnum(bm0));
    return px.encloses(exact.point.x) && py.encloses(exact.point.y) &&
           pa.encloses(exact.pos_a) && pb.encloses(exact.pos_b);
}

/// Perron root of a non-negative integer matrix by 256-bit power iteration.
inline double perron_root(const std::vector<std::vector<long>>& m, int iters = 2000) {
    size_t n = m.size();
    mpfr_t acc, tmp, norm;
    mpfr_init2(acc, kPrec);
    mpfr_init2(tmp, kPrec);
    mpfr_init2(norm, kPrec);
    std::vector<mpfr_t> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
        mpfr_init2(x[i], kPrec);
        mpfr_init2(y[i], kPrec);
        mpfr_set_ui(x[i], 1, MPFR_RNDN);
    }
    double rho = 0;
    for (int it = 0; it < iters; ++it) {
        for (size_t i = 0; i < n; ++i) {
            mpfr_set_zero(acc, 1);
            for (size_t j = 0; j < n; ++j) {
                mpfr_mul_si(tmp, x[j], m[i][j], MPFR_RNDN);
                mpfr_add(acc, acc, tmp, MPFR_RNDN);
            }
            mpfr_set(y[i], acc, MPFR_RNDN);
        }
        mpfr_set_zero(norm, 1);
        for (size_t i = 0; i < n; ++i) {
            mpfr_abs(tmp, y[i], MPFR_RNDN);
            if (mpfr_cmp(tmp, norm) > 0) mpfr_set(norm, tmp, MPFR_RNDN);
        }
        rho = mpfr_get_d(norm, MPFR_RNDN);
        for (size_t i = 0; i < n; ++i) mpfr_div(x[i], y[i], norm, MPFR_RNDN);
    }
    for (size_t i = 0; i < n; ++i) {
        mpfr_clear(x[i]);
        mpfr_clear(y[i]);
    }
    mpfr_clear(acc);
    mpfr_clear(tmp);
    mpfr_clear(norm);
    return rho;
}

}  // namespace oracle
