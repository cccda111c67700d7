#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace lhv {

// A closed interval [lo, hi] with arbitrary-precision binary endpoints and
// outward rounding: every operation encloses the exact real result, so any
// inequality proven on an endpoint is a rigorous statement about the enclosed
// value. Endpoints share one precision; derived results take the larger
// precision of their operands. Because precision-p floats embed into
// precision-p' floats for p' >= p, recomputing at higher precision always
// yields a sub-interval (this is what makes precision retries monotone).
class Interval {
public:
    explicit Interval(mpfr_prec_t prec = 256);
    Interval(const Interval& other);
    Interval(Interval&& other) noexcept;
    Interval& operator=(const Interval& other);
    Interval& operator=(Interval&& other) noexcept;
    ~Interval();

    static Interval from_long(long v, mpfr_prec_t prec);
    static Interval from_double(double v, mpfr_prec_t prec); // doubles embed exactly
    static Interval from_endpoints(double lo, double hi, mpfr_prec_t prec);
    static Interval from_rational(const mpq_class& q, mpfr_prec_t prec);
    static Interval from_integer(const mpz_class& z, mpfr_prec_t prec);
    static Interval pi(mpfr_prec_t prec);

    mpfr_prec_t precision() const { return prec_; }

    Interval operator+(const Interval& rhs) const;
    Interval operator-(const Interval& rhs) const;
    Interval operator*(const Interval& rhs) const;
    Interval operator/(const Interval& rhs) const; // rhs must not contain 0
    Interval operator-() const;

    void add_assign(const Interval& rhs); // in-place accumulation

    Interval abs() const;
    Interval sqr() const;
    Interval reciprocal() const; // must not contain 0

    // Trigonometric enclosures for arguments within [0, pi] (slightly negative
    // lower ends are tolerated for sin, which is monotone there). Arguments
    // outside the supported range raise InternalError.
    Interval cos_on_0_pi() const;
    Interval sin_on_0_pi() const;

    bool contains_zero() const;
    bool contains(const mpq_class& q) const;
    bool contains(double v) const;
    bool upper_less_than(double v) const;    // hi < v, certified
    bool lower_at_least(double v) const;     // lo >= v, certified
    bool subset_of(const Interval& other) const;

    double lower_double() const; // rounded toward -inf
    double upper_double() const; // rounded toward +inf
    double width_upper() const;  // hi - lo rounded up, as double
    double midpoint_double() const;

    // Directed decimal serialization: lo rounded toward -inf, hi toward +inf,
    // `digits` significant digits. Deterministic for a given value/precision.
    std::string lower_string(int digits = 40) const;
    std::string upper_string(int digits = 40) const;

    const mpfr_t& lo() const { return lo_; }
    const mpfr_t& hi() const { return hi_; }
    mpfr_t& lo_mut() { return lo_; }
    mpfr_t& hi_mut() { return hi_; }

private:
    mpfr_prec_t prec_;
    mpfr_t lo_;
    mpfr_t hi_;

    void check_valid() const;
};

// Convenience: product with an exact rational, outward rounded.
Interval mul_rational(const Interval& x, const mpq_class& q);

// Format an mpfr value as a decimal string with the given significant digits
// and rounding mode (used for certificate serialization).
std::string mpfr_to_decimal(const mpfr_t& v, int digits, mpfr_rnd_t rnd);

} // namespace lhv
