#include "lhv/rational.hpp"

#include "lhv/errors.hpp"

#include <cmath>

namespace lhv {

Rational parse_rational(const std::string& s) {
    if (s.empty()) throw ParseError("rational: empty string");
    for (char c : s) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+'))
            throw ParseError("rational: invalid character in '" + s + "'");
    }
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw ParseError("rational: cannot parse '" + s + "'");
    if (q.get_den() == 0) throw ParseError("rational: zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

std::string rational_to_string(const Rational& q) {
    return q.get_str();
}

mpz_class pow10(int k) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(k));
    return p;
}

mpz_class truncate_decimal(double w, int k) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidParameterError("truncate_decimal: weight must be finite and nonnegative");
    mpq_class q(w); // exact binary-to-rational conversion
    q *= mpq_class(pow10(k));
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

} // namespace lhv
