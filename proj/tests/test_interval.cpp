#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lhv/errors.hpp"
#include "lhv/interval.hpp"

#include <cmath>
#include <string>

using lhv::Interval;

TEST_CASE("pi enclosure is tight and contains the double approximation") {
    Interval p = Interval::pi(256);
    CHECK(p.contains(3.141592653589793));
    CHECK(p.width_upper() < 1e-70);
    CHECK(p.lower_double() <= 3.14159265358979324);
    CHECK(p.upper_double() >= 3.14159265358979311);
}

TEST_CASE("rational endpoints round outward") {
    mpq_class third(1, 3);
    Interval t = Interval::from_rational(third, 128);
    CHECK(t.contains(third));
    CHECK(t.width_upper() > 0.0); // 1/3 is not a binary float
    Interval exact = Interval::from_double(0.375, 128);
    CHECK(exact.width_upper() == 0.0);

    Interval one = t * Interval::from_long(3, 128);
    CHECK(one.contains(mpq_class(1)));
}

TEST_CASE("arithmetic encloses real results") {
    Interval a = Interval::from_double(1.5, 128);
    Interval b = Interval::from_double(-2.25, 128);
    CHECK((a + b).contains(-0.75));
    CHECK((a - b).contains(3.75));
    CHECK((a * b).contains(-3.375));
    CHECK((a / b).contains(1.5 / -2.25));
    CHECK((-a).contains(-1.5));
}

TEST_CASE("sqr and abs handle mixed signs") {
    Interval mixed = Interval::from_endpoints(-2.0, 1.0, 128);
    CHECK(mixed.abs().lower_double() == 0.0);
    CHECK(mixed.abs().upper_double() == 2.0);
    CHECK(mixed.sqr().lower_double() == 0.0);
    CHECK(mixed.sqr().upper_double() == 4.0);

    Interval neg = Interval::from_endpoints(-3.0, -2.0, 128);
    CHECK(neg.abs().contains(2.5));
    CHECK(neg.abs().lower_double() == 2.0);
    CHECK(neg.sqr().contains(9.0));
    CHECK(neg.sqr().contains(4.0));

    Interval prod = mixed * neg; // [-2,1] * [-3,-2] -> [-3, 6]
    CHECK(prod.lower_double() == -3.0);
    CHECK(prod.upper_double() == 6.0);
}

TEST_CASE("division by interval containing zero throws") {
    Interval a = Interval::from_double(1.0, 128);
    Interval z = Interval::from_endpoints(-0.5, 0.5, 128);
    CHECK(z.contains_zero());
    CHECK_THROWS_AS(a / z, lhv::InternalError);
    CHECK_THROWS_AS(z.reciprocal(), lhv::InternalError);

    Interval r = Interval::from_endpoints(2.0, 4.0, 128).reciprocal();
    CHECK(r.lower_double() == 0.25);
    CHECK(r.upper_double() == 0.5);
}

TEST_CASE("cos on [0, pi] is certified decreasing") {
    Interval p = Interval::pi(192);
    Interval x = p / Interval::from_long(4, 192);
    Interval c = x.cos_on_0_pi();
    CHECK(c.contains(std::cos(M_PI / 4)));
    CHECK(c.width_upper() < 1e-50);

    Interval c2 = c.sqr();
    CHECK(c2.contains(mpq_class(1, 2))); // cos^2(pi/4) = 1/2 exactly
    CHECK(c2.width_upper() < 1e-30);

    Interval bad = p * Interval::from_long(2, 192);
    CHECK_THROWS_AS(bad.cos_on_0_pi(), lhv::InternalError);
}

TEST_CASE("sin enclosure covers the pi/2 straddle") {
    Interval p = Interval::pi(192);
    Interval half = p / Interval::from_long(2, 192);
    Interval s = half.sin_on_0_pi();
    CHECK(s.contains(1.0));
    CHECK(s.upper_double() >= 1.0);
    CHECK(s.lower_double() > 1.0 - 1e-50);

    Interval third = p / Interval::from_long(3, 192);
    CHECK(third.sin_on_0_pi().contains(std::sin(M_PI / 3)));

    Interval low = p / Interval::from_long(7, 192);
    CHECK(low.sin_on_0_pi().contains(std::sin(M_PI / 7)));

    Interval high = p * Interval::from_long(6, 192) / Interval::from_long(7, 192);
    CHECK(high.sin_on_0_pi().contains(std::sin(6 * M_PI / 7)));
}

TEST_CASE("frozen high-precision constants") {
    // cos^2(pi/10), independently evaluated with 50-digit arithmetic
    Interval c = (Interval::pi(192) / Interval::from_long(10, 192)).cos_on_0_pi().sqr();
    CHECK(std::fabs(c.midpoint_double() - 0.9045084971874737) < 1e-15);
    CHECK(c.width_upper() < 1e-30);
    // closed form (5 + sqrt(5)) / 8 as a containment probe at double accuracy
    CHECK(c.contains(0.90450849718747371));
}

TEST_CASE("nested precision gives nested intervals") {
    auto expr = [](mpfr_prec_t p) {
        Interval pi = Interval::pi(p);
        Interval x = pi / Interval::from_long(50, p);
        Interval c = x.cos_on_0_pi();
        return c.sqr().sqr() * Interval::from_rational(mpq_class(999 * 689, 1000000), p);
    };
    Interval a = expr(128);
    Interval b = expr(256);
    Interval c = expr(512);
    CHECK(b.subset_of(a));
    CHECK(c.subset_of(b));
    CHECK(a.subset_of(a));
}

TEST_CASE("directed decimal serialization brackets the value") {
    Interval v = Interval::from_rational(mpq_class(2, 3), 192);
    std::string lo = v.lower_string(30);
    std::string hi = v.upper_string(30);
    double dlo = std::stod(lo);
    double dhi = std::stod(hi);
    CHECK(dlo <= 2.0 / 3.0);
    CHECK(dhi >= 2.0 / 3.0);
    CHECK(lo != hi); // 2/3 is not exactly representable

    Interval zero = Interval::from_long(0, 64);
    CHECK(zero.lower_string() == "0");
    CHECK(zero.upper_string() == "0");
}

TEST_CASE("accumulation matches repeated addition") {
    Interval acc(128);
    for (int i = 1; i <= 10; ++i) acc.add_assign(Interval::from_rational(mpq_class(1, i), 128));
    // harmonic sum H_10 = 7381/2520
    CHECK(acc.contains(mpq_class(7381, 2520)));
}
