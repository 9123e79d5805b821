#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace pam {

/// Element of the real quadratic field Q(sqrt(D)): value a + b*sqrt(D),
/// with a, b rational (always lowest terms, positive denominator) and D a
/// square-free integer >= 2. D == 0 marks a plain rational; binary
/// operations promote a rational operand to the other operand's field and
/// reject genuinely mixed fields.
///
/// All comparisons and floors are decided by exact rational case analysis,
/// never by floating point.
class QuadNum {
public:
    QuadNum() : a_(0), b_(0), d_(0) {}
    QuadNum(long v) : a_(v), b_(0), d_(0) {}
    QuadNum(const mpq_class& a, long D = 0) : a_(a), b_(0), d_(D) { norm(); }
    QuadNum(mpq_class a, mpq_class b, long D)
        : a_(std::move(a)), b_(std::move(b)), d_(D) { norm(); }
    QuadNum(long num, long den) : a_(mpq_class(num, den)), b_(0), d_(0) { norm(); }

    /// 0 + 1*sqrt(D)
    static QuadNum sqrt_of(long D) { return QuadNum(mpq_class(0), mpq_class(1), D); }

    const mpq_class& a() const { return a_; }
    const mpq_class& b() const { return b_; }
    long d() const { return d_; }

    bool is_rational() const { return b_ == 0; }
    bool is_zero() const { return a_ == 0 && b_ == 0; }
    bool is_integer() const { return b_ == 0 && a_.get_den() == 1; }

    QuadNum operator-() const { return QuadNum(-a_, -b_, d_); }
    /// Field conjugate a - b*sqrt(D).
    QuadNum conj() const { return QuadNum(a_, -b_, d_); }

    QuadNum operator+(const QuadNum& o) const {
        long D = join(o);
        return QuadNum(a_ + o.a_, b_ + o.b_, D);
    }
    QuadNum operator-(const QuadNum& o) const {
        long D = join(o);
        return QuadNum(a_ - o.a_, b_ - o.b_, D);
    }
    QuadNum operator*(const QuadNum& o) const {
        long D = join(o);
        return QuadNum(a_ * o.a_ + b_ * o.b_ * D, a_ * o.b_ + b_ * o.a_, D);
    }
    QuadNum operator/(const QuadNum& o) const;

    QuadNum& operator+=(const QuadNum& o) { return *this = *this + o; }
    QuadNum& operator-=(const QuadNum& o) { return *this = *this - o; }
    QuadNum& operator*=(const QuadNum& o) { return *this = *this * o; }
    QuadNum& operator/=(const QuadNum& o) { return *this = *this / o; }

    /// Exact sign: -1, 0, +1.
    int sign() const;
    int cmp(const QuadNum& o) const { return (*this - o).sign(); }

    bool operator==(const QuadNum& o) const { return cmp(o) == 0; }
    bool operator!=(const QuadNum& o) const { return cmp(o) != 0; }
    bool operator<(const QuadNum& o) const { return cmp(o) < 0; }
    bool operator<=(const QuadNum& o) const { return cmp(o) <= 0; }
    bool operator>(const QuadNum& o) const { return cmp(o) > 0; }
    bool operator>=(const QuadNum& o) const { return cmp(o) >= 0; }

    /// Exact floor: unique k with k <= x < k+1.
    mpz_class floor() const;
    /// x - floor(x), in [0,1).
    QuadNum frac() const { return *this - QuadNum(mpq_class(floor()), d_); }

    QuadNum abs() const { return sign() < 0 ? -*this : *this; }

    /// Exact serialization "p/q+r/s*sqrt(D)" (minus sign folded into r).
    std::string str() const;
    /// Parse the str() format; exact round-trip.
    static QuadNum parse(const std::string& s);

    /// Non-authoritative double approximation.
    double approx() const;
    /// Enclosing double interval [lo, hi] (outward-rounded), for prefilters.
    std::pair<double, double> approx_interval() const;

    /// Strict total order usable as a map key (compares by value, then by
    /// the stored D so distinct representations stay distinguishable).
    static bool key_less(const QuadNum& x, const QuadNum& y) {
        int c = x.cmp(y);
        if (c != 0) return c < 0;
        return x.d_ < y.d_;
    }

private:
    mpq_class a_, b_;
    long d_;

    void norm();
    long join(const QuadNum& o) const;
};

inline QuadNum operator+(long v, const QuadNum& x) { return QuadNum(v) + x; }
inline QuadNum operator-(long v, const QuadNum& x) { return QuadNum(v) - x; }
inline QuadNum operator*(long v, const QuadNum& x) { return QuadNum(v) * x; }

/// Square-free part decomposition: n = s*f^2 with s square-free; returns {s, f}.
/// n must be positive.
std::pair<long, long> square_free_part(long n);

/// lowest-terms rational from a decimal string "p/q" or "p".
mpq_class parse_rational(const std::string& s);

}  // namespace pam
