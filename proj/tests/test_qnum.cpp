#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "pamarkov/qnum.hpp"

using namespace pam;

namespace {

std::mt19937_64 rng(20240901);

QuadNum random_qnum(long d) {
    std::uniform_int_distribution<long> num(-50, 50), den(1, 20);
    return QuadNum(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)), d);
}

}  // namespace

TEST_CASE("quadratic field basics") {
    QuadNum s5 = QuadNum::sqrt_of(5);
    QuadNum lam = (QuadNum(3) + s5) / QuadNum(2);

    SUBCASE("identity multiplication") {
        QuadNum x = random_qnum(5);
        CHECK(QuadNum(1) * x == x);
    }
    SUBCASE("lambda satisfies its characteristic polynomial") {
        CHECK(lam * lam == QuadNum(3) * lam - QuadNum(1));
        CHECK(lam * lam == QuadNum(mpq_class(7, 2), mpq_class(3, 2), 5));
    }
    SUBCASE("golden ratio inverse") {
        QuadNum phi = (QuadNum(1) + s5) / QuadNum(2);
        CHECK(QuadNum(1) / phi == phi - QuadNum(1));
        CHECK(QuadNum(1) / phi == QuadNum(mpq_class(-1, 2), mpq_class(1, 2), 5));
    }
    SUBCASE("signs") {
        CHECK(QuadNum(0).sign() == 0);
        CHECK((QuadNum(1) - s5 / QuadNum(2)).sign() == -1);
        CHECK((lam - QuadNum(2)).sign() == 1);
    }
    SUBCASE("floors") {
        CHECK(QuadNum(7, 2).floor() == 3);
        CHECK(lam.floor() == 2);
        CHECK((-(QuadNum(1) + s5) / QuadNum(2)).floor() == -2);
    }
    SUBCASE("division by zero") {
        CHECK_THROWS_AS(lam / QuadNum(0), std::domain_error);
    }
    SUBCASE("mixed fields rejected, rationals promoted") {
        CHECK_THROWS_AS(s5 + QuadNum::sqrt_of(2), std::invalid_argument);
        CHECK(QuadNum(2) + s5 == QuadNum(mpq_class(2), mpq_class(1), 5));
    }
}

TEST_CASE("field axioms on random instances") {
    for (int i = 0; i < 2000; ++i) {
        QuadNum x = random_qnum(5), y = random_qnum(5), z = random_qnum(5);
        CHECK((x + y) + z == x + (y + z));
        CHECK(x * (y + z) == x * y + x * z);
        if (!x.is_zero()) CHECK(x * (QuadNum(1) / x) == QuadNum(1));
    }
}

TEST_CASE("sign agrees with 256-bit interval arithmetic") {
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        QuadNum x = random_qnum(i % 3 == 0 ? 5 : (i % 3 == 1 ? 2 : 13));
        int iv = oracle::Iv::from_qnum(x).sign();
        if (iv != 0) {
            CHECK(x.sign() == iv);
            ++checked;
        } else {
            CHECK(x.sign() == 0);  // 256 bits only fail to decide exact zeros here
        }
    }
    CHECK(checked > 9000);
}

TEST_CASE("floor bracketing property") {
    for (int i = 0; i < 10000; ++i) {
        QuadNum x = random_qnum(5);
        mpz_class k = x.floor();
        CHECK((x - QuadNum(mpq_class(k), 5)).sign() >= 0);
        CHECK((x - QuadNum(mpq_class(k + 1), 5)).sign() < 0);
    }
}

TEST_CASE("characteristic identity for matrix-built stretch factors") {
    for (long t : {3L, 4L, 5L, 7L, 12L, 100L}) {
        auto [d, f] = square_free_part(t * t - 4);
        if (d == 1) continue;
        QuadNum lam = (QuadNum(t) + QuadNum(f) * QuadNum::sqrt_of(d)) / QuadNum(2);
        CHECK(lam * lam - QuadNum(t) * lam + QuadNum(1) == QuadNum(0));
    }
}

TEST_CASE("string serialization round-trips bit-identically") {
    for (int i = 0; i < 500; ++i) {
        QuadNum x = random_qnum(5);
        QuadNum y = QuadNum::parse(x.str());
        CHECK(y == x);
        CHECK(y.str() == x.str());
    }
    CHECK(QuadNum::parse("3/2+1/2*sqrt(5)").str() == "3/2+1/2*sqrt(5)");
    CHECK(QuadNum::parse("3/2-1/2*sqrt(5)").str() == "3/2-1/2*sqrt(5)");
    CHECK(QuadNum::parse("-1/2+0/1*sqrt(0)") == QuadNum(-1, 2));
}
