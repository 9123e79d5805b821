#include "pamarkov/qnum.hpp"

#include <cmath>
#include <cstdlib>

namespace pam {

void QuadNum::norm() {
    a_.canonicalize();
    b_.canonicalize();
    if (d_ < 0) throw std::invalid_argument("QuadNum: negative D");
    if (b_ != 0 && d_ == 0)
        throw std::invalid_argument("QuadNum: irrational part with D=0");
}

long QuadNum::join(const QuadNum& o) const {
    if (d_ == o.d_) return d_;
    // A rational operand (b == 0) adopts the other operand's field.
    if (b_ == 0) return o.b_ == 0 ? (d_ ? d_ : o.d_) : o.d_;
    if (o.b_ == 0) return d_;
    throw std::invalid_argument("QuadNum: mixed-D arithmetic (" + std::to_string(d_) +
                                " vs " + std::to_string(o.d_) + ")");
}

QuadNum QuadNum::operator/(const QuadNum& o) const {
    long D = join(o);
    if (o.is_zero()) throw std::domain_error("QuadNum: division by zero");
    // 1/(a+b*sqrt(D)) = (a-b*sqrt(D))/(a^2-b^2 D); the norm is nonzero for
    // nonzero elements since D is not a perfect square.
    mpq_class n = o.a_ * o.a_ - o.b_ * o.b_ * D;
    if (n == 0) throw std::domain_error("QuadNum: division by zero norm (D not square-free?)");
    return QuadNum((a_ * o.a_ - b_ * o.b_ * D) / n, (b_ * o.a_ - a_ * o.b_) / n, D);
}

int QuadNum::sign() const {
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: compare a^2 with b^2 D; equality would force sqrt(D) rational.
    mpq_class lhs = a_ * a_, rhs = b_ * b_ * mpq_class(d_);
    int c = ::cmp(lhs, rhs);
    if (c == 0) throw std::logic_error("QuadNum: a^2 == b^2 D with D square-free");
    return c > 0 ? sa : sb;
}

mpz_class QuadNum::floor() const {
    if (b_ == 0) {
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), a_.get_num_mpz_t(), a_.get_den_mpz_t());
        return q;
    }
    // Rational bracket of b*sqrt(D) from an integer square root, then an
    // exact verification walk (at most a couple of steps).
    mpq_class t = b_ * b_ * mpq_class(d_);  // (b sqrt(D))^2
    mpz_class num = t.get_num(), den = t.get_den();
    mpz_class r;  // isqrt(num*den)
    mpz_class nd = num * den;
    mpz_sqrt(r.get_mpz_t(), nd.get_mpz_t());
    mpq_class lo(r, den), hi(r + 1, den);  // lo <= |b|sqrt(D) < hi
    lo.canonicalize();
    hi.canonicalize();
    mpq_class xlo, xhi;
    if (sgn(b_) > 0) {
        xlo = a_ + lo;
        xhi = a_ + hi;
    } else {
        xlo = a_ - hi;
        xhi = a_ - lo;
    }
    mpz_class k;
    mpz_fdiv_q(k.get_mpz_t(), xlo.get_num_mpz_t(), xlo.get_den_mpz_t());
    // Exact adjustment: ensure k <= x < k+1.
    while ((*this - QuadNum(mpq_class(k), d_)).sign() < 0) --k;
    while ((*this - QuadNum(mpq_class(k + 1), d_)).sign() >= 0) ++k;
    return k;
}

std::string QuadNum::str() const {
    std::string s = a_.get_num().get_str() + "/" + a_.get_den().get_str();
    if (sgn(b_) < 0)
        s += "-" + mpq_class(-b_).get_num().get_str() + "/" + b_.get_den().get_str();
    else
        s += "+" + b_.get_num().get_str() + "/" + b_.get_den().get_str();
    s += "*sqrt(" + std::to_string(d_) + ")";
    return s;
}

QuadNum QuadNum::parse(const std::string& s) {
    // p/q(+|-)r/s*sqrt(D); first token may itself start with a sign.
    size_t i = 0;
    auto take_signed = [&](void) -> std::string {
        size_t start = i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        while (i < s.size() && (isdigit((unsigned char)s[i]) || s[i] == '/')) ++i;
        return s.substr(start, i - start);
    };
    std::string atok = take_signed();
    if (i >= s.size() || (s[i] != '+' && s[i] != '-'))
        throw std::invalid_argument("QuadNum::parse: bad format: " + s);
    std::string btok = take_signed();
    const std::string tail = "*sqrt(";
    if (s.compare(i, tail.size(), tail) != 0)
        throw std::invalid_argument("QuadNum::parse: bad format: " + s);
    i += tail.size();
    size_t close = s.find(')', i);
    if (close == std::string::npos || close + 1 != s.size())
        throw std::invalid_argument("QuadNum::parse: bad format: " + s);
    long D = std::stol(s.substr(i, close - i));
    return QuadNum(parse_rational(atok), parse_rational(btok), D);
}

double QuadNum::approx() const {
    return a_.get_d() + b_.get_d() * std::sqrt((double)d_);
}

std::pair<double, double> QuadNum::approx_interval() const {
    double v = approx();
    // get_d truncates toward zero; pad generously and monotonically.
    double m = std::fabs(v) * 1e-12 + 1e-300;
    for (int i = 0; i < 4; ++i) m = std::nextafter(m, 1e300);
    return {v - m, v + m};
}

std::pair<long, long> square_free_part(long n) {
    if (n <= 0) throw std::invalid_argument("square_free_part: n must be positive");
    long s = n, f = 1;
    for (long p = 2; p * p <= s; ++p) {
        while (s % (p * p) == 0) {
            s /= p * p;
            f *= p;
        }
    }
    return {s, f};
}

mpq_class parse_rational(const std::string& s) {
    std::string t = s;
    if (!t.empty() && t[0] == '+') t = t.substr(1);
    mpq_class q;
    if (q.set_str(t, 10) != 0)
        throw std::invalid_argument("parse_rational: bad rational: " + s);
    q.canonicalize();
    return q;
}

}  // namespace pam
