#include "lhv/interval.hpp"

#include "lhv/errors.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace lhv {

Interval::Interval(mpfr_prec_t prec) : prec_(prec) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& other) : prec_(other.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : prec_(other.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
}

Interval& Interval::operator=(const Interval& other) {
    if (this != &other) {
        if (prec_ != other.prec_) {
            mpfr_set_prec(lo_, other.prec_);
            mpfr_set_prec(hi_, other.prec_);
            prec_ = other.prec_;
        }
        mpfr_set(lo_, other.lo_, MPFR_RNDD);
        mpfr_set(hi_, other.hi_, MPFR_RNDU);
    }
    return *this;
}

Interval& Interval::operator=(Interval&& other) noexcept {
    if (this != &other) {
        std::swap(prec_, other.prec_);
        mpfr_swap(lo_, other.lo_);
        mpfr_swap(hi_, other.hi_);
    }
    return *this;
}

Interval::~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

void Interval::check_valid() const {
    if (mpfr_nan_p(lo_) || mpfr_nan_p(hi_) || mpfr_cmp(lo_, hi_) > 0)
        throw InternalError("interval endpoints out of order");
}

Interval Interval::from_long(long v, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_si(r.lo_, v, MPFR_RNDD);
    mpfr_set_si(r.hi_, v, MPFR_RNDU);
    return r;
}

Interval Interval::from_double(double v, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_d(r.lo_, v, MPFR_RNDD);
    mpfr_set_d(r.hi_, v, MPFR_RNDU);
    return r;
}

Interval Interval::from_endpoints(double lo, double hi, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_d(r.lo_, lo, MPFR_RNDD);
    mpfr_set_d(r.hi_, hi, MPFR_RNDU);
    r.check_valid();
    return r;
}

Interval Interval::from_rational(const mpq_class& q, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
}

Interval Interval::from_integer(const mpz_class& z, mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_set_z(r.lo_, z.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_, z.get_mpz_t(), MPFR_RNDU);
    return r;
}

Interval Interval::pi(mpfr_prec_t prec) {
    Interval r(prec);
    mpfr_const_pi(r.lo_, MPFR_RNDD);
    mpfr_const_pi(r.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::operator+(const Interval& rhs) const {
    Interval r(std::max(prec_, rhs.prec_));
    mpfr_add(r.lo_, lo_, rhs.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, hi_, rhs.hi_, MPFR_RNDU);
    return r;
}

void Interval::add_assign(const Interval& rhs) {
    mpfr_add(lo_, lo_, rhs.lo_, MPFR_RNDD);
    mpfr_add(hi_, hi_, rhs.hi_, MPFR_RNDU);
}

Interval Interval::operator-(const Interval& rhs) const {
    Interval r(std::max(prec_, rhs.prec_));
    mpfr_sub(r.lo_, lo_, rhs.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, hi_, rhs.lo_, MPFR_RNDU);
    return r;
}

Interval Interval::operator-() const {
    Interval r(prec_);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

Interval Interval::operator*(const Interval& rhs) const {
    mpfr_prec_t p = std::max(prec_, rhs.prec_);
    Interval r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    const mpfr_t* xs[2] = {&lo_, &hi_};
    const mpfr_t* ys[2] = {&rhs.lo_, &rhs.hi_};
    bool first = true;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            mpfr_mul(t, *xs[i], *ys[j], MPFR_RNDD);
            if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
            mpfr_mul(t, *xs[i], *ys[j], MPFR_RNDU);
            if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
            first = false;
        }
    }
    mpfr_clear(t);
    r.check_valid();
    return r;
}

Interval Interval::operator/(const Interval& rhs) const {
    if (rhs.contains_zero()) throw InternalError("interval division by interval containing zero");
    mpfr_prec_t p = std::max(prec_, rhs.prec_);
    Interval r(p);
    mpfr_t t;
    mpfr_init2(t, p);
    const mpfr_t* xs[2] = {&lo_, &hi_};
    const mpfr_t* ys[2] = {&rhs.lo_, &rhs.hi_};
    bool first = true;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            mpfr_div(t, *xs[i], *ys[j], MPFR_RNDD);
            if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
            mpfr_div(t, *xs[i], *ys[j], MPFR_RNDU);
            if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
            first = false;
        }
    }
    mpfr_clear(t);
    r.check_valid();
    return r;
}

Interval Interval::abs() const {
    Interval r(prec_);
    if (mpfr_sgn(lo_) >= 0) {
        mpfr_set(r.lo_, lo_, MPFR_RNDD);
        mpfr_set(r.hi_, hi_, MPFR_RNDU);
    } else if (mpfr_sgn(hi_) <= 0) {
        mpfr_neg(r.lo_, hi_, MPFR_RNDD);
        mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    } else {
        mpfr_set_zero(r.lo_, 1);
        mpfr_neg(r.hi_, lo_, MPFR_RNDU);
        mpfr_t t;
        mpfr_init2(t, prec_);
        mpfr_set(t, hi_, MPFR_RNDU);
        if (mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
        mpfr_clear(t);
    }
    return r;
}

Interval Interval::sqr() const {
    Interval a = abs();
    Interval r(prec_);
    mpfr_sqr(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_sqr(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

Interval Interval::reciprocal() const {
    if (contains_zero()) throw InternalError("interval reciprocal of interval containing zero");
    Interval r(prec_);
    mpfr_ui_div(r.lo_, 1, hi_, MPFR_RNDD);
    mpfr_ui_div(r.hi_, 1, lo_, MPFR_RNDU);
    r.check_valid();
    return r;
}

Interval Interval::cos_on_0_pi() const {
    // cos is decreasing on [0, pi]; require the argument to stay inside.
    Interval p = Interval::pi(prec_);
    if (mpfr_sgn(lo_) < 0 || mpfr_cmp(hi_, p.lo_) > 0)
        throw InternalError("cos_on_0_pi: argument outside [0, pi]");
    Interval r(prec_);
    mpfr_cos(r.lo_, hi_, MPFR_RNDD);
    mpfr_cos(r.hi_, lo_, MPFR_RNDU);
    r.check_valid();
    return r;
}

Interval Interval::sin_on_0_pi() const {
    Interval p = Interval::pi(prec_);
    mpfr_t half_pi_lo, half_pi_hi;
    mpfr_init2(half_pi_lo, prec_);
    mpfr_init2(half_pi_hi, prec_);
    mpfr_div_ui(half_pi_lo, p.lo(), 2, MPFR_RNDD);
    mpfr_div_ui(half_pi_hi, p.hi(), 2, MPFR_RNDU);

    // Tolerate slightly negative lower ends (sin is monotone there) but reject
    // anything beyond pi.
    if (mpfr_cmp(hi_, p.lo()) > 0) {
        mpfr_clear(half_pi_lo);
        mpfr_clear(half_pi_hi);
        throw InternalError("sin_on_0_pi: argument exceeds pi");
    }
    mpfr_t neg_half;
    mpfr_init2(neg_half, prec_);
    mpfr_neg(neg_half, half_pi_lo, MPFR_RNDU);
    bool too_low = mpfr_cmp(lo_, neg_half) < 0;
    mpfr_clear(neg_half);
    if (too_low) {
        mpfr_clear(half_pi_lo);
        mpfr_clear(half_pi_hi);
        throw InternalError("sin_on_0_pi: argument below -pi/2");
    }

    Interval r(prec_);
    if (mpfr_cmp(hi_, half_pi_lo) <= 0) {
        // entirely in the increasing region
        mpfr_sin(r.lo_, lo_, MPFR_RNDD);
        mpfr_sin(r.hi_, hi_, MPFR_RNDU);
    } else if (mpfr_cmp(lo_, half_pi_hi) >= 0) {
        // entirely in the decreasing region
        mpfr_sin(r.lo_, hi_, MPFR_RNDD);
        mpfr_sin(r.hi_, lo_, MPFR_RNDU);
    } else {
        // may straddle pi/2: max is 1, min at one of the endpoints
        mpfr_t t;
        mpfr_init2(t, prec_);
        mpfr_sin(r.lo_, lo_, MPFR_RNDD);
        mpfr_sin(t, hi_, MPFR_RNDD);
        if (mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
        mpfr_set_ui(r.hi_, 1, MPFR_RNDU);
        mpfr_clear(t);
    }
    mpfr_clear(half_pi_lo);
    mpfr_clear(half_pi_hi);
    r.check_valid();
    return r;
}

bool Interval::contains_zero() const {
    return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0;
}

bool Interval::contains(const mpq_class& q) const {
    return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
}

bool Interval::contains(double v) const {
    return mpfr_cmp_d(lo_, v) <= 0 && mpfr_cmp_d(hi_, v) >= 0;
}

bool Interval::upper_less_than(double v) const { return mpfr_cmp_d(hi_, v) < 0; }

bool Interval::lower_at_least(double v) const { return mpfr_cmp_d(lo_, v) >= 0; }

bool Interval::subset_of(const Interval& other) const {
    return mpfr_cmp(lo_, other.lo_) >= 0 && mpfr_cmp(hi_, other.hi_) <= 0;
}

double Interval::lower_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }

double Interval::upper_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double Interval::width_upper() const {
    mpfr_t t;
    mpfr_init2(t, prec_);
    mpfr_sub(t, hi_, lo_, MPFR_RNDU);
    double w = mpfr_get_d(t, MPFR_RNDU);
    mpfr_clear(t);
    return w;
}

double Interval::midpoint_double() const {
    return 0.5 * (lower_double() + upper_double());
}

std::string mpfr_to_decimal(const mpfr_t& v, int digits, mpfr_rnd_t rnd) {
    if (mpfr_zero_p(v)) return "0";
    mpfr_exp_t exp = 0;
    char* s = mpfr_get_str(nullptr, &exp, 10, static_cast<size_t>(digits), v, rnd);
    std::string mant(s);
    mpfr_free_str(s);
    bool neg = !mant.empty() && mant[0] == '-';
    std::string dig = neg ? mant.substr(1) : mant;
    // mpfr convention: value = 0.digits * 10^exp
    std::ostringstream out;
    if (neg) out << '-';
    out << dig[0];
    if (dig.size() > 1) out << '.' << dig.substr(1);
    out << 'e' << (exp - 1);
    return out.str();
}

std::string Interval::lower_string(int digits) const { return mpfr_to_decimal(lo_, digits, MPFR_RNDD); }

std::string Interval::upper_string(int digits) const { return mpfr_to_decimal(hi_, digits, MPFR_RNDU); }

Interval mul_rational(const Interval& x, const mpq_class& q) {
    return x * Interval::from_rational(q, x.precision());
}

} // namespace lhv
