#include "lhv/certify.hpp"

#include "lhv/bloch.hpp"
#include "lhv/errors.hpp"
#include "lhv/version.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace lhv {

Rational RationalDecomposition::weight(size_t i) const {
    Rational w(numerators[i], numerator_sum);
    w.canonicalize();
    return w;
}

RationalDecomposition rationalize(const ConvexDecomposition& d, int k) {
    if (k < 1 || k > 18) throw InvalidParameterError("rationalize: k must be in [1, 18]");
    if (d.strategies.size() != d.weights.size())
        throw InvalidParameterError("rationalize: strategy/weight count mismatch");

    RationalDecomposition rd;
    rd.m = d.m;
    rd.k = k;
    rd.numerator_sum = 0;

    std::unordered_map<DeterministicStrategy, size_t, StrategyHash> merged;
    for (size_t i = 0; i < d.strategies.size(); ++i) {
        mpz_class num = truncate_decimal(d.weights[i], k);
        if (num == 0) continue;
        auto it = merged.find(d.strategies[i]);
        if (it == merged.end()) {
            merged.emplace(d.strategies[i], rd.strategies.size());
            rd.strategies.push_back(d.strategies[i]);
            rd.numerators.push_back(num);
        } else {
            rd.numerators[it->second] += num;
        }
        rd.numerator_sum += num;
    }
    if (rd.strategies.empty())
        throw InvalidParameterError("rationalize: degenerate decomposition (all weights truncated to zero)");
    return rd;
}

std::vector<Rational> rational_mixture(const RationalDecomposition& rd) {
    const int m = rd.m;
    std::vector<mpz_class> acc(static_cast<size_t>(m) * m, mpz_class(0));
    for (size_t i = 0; i < rd.strategies.size(); ++i) {
        const DeterministicStrategy& s = rd.strategies[i];
        for (int x = 0; x < m; ++x) {
            mpz_class row = s.a_sign(x) > 0 ? rd.numerators[i] : -rd.numerators[i];
            for (int y = 0; y < m; ++y) {
                if (s.b_sign(y) > 0)
                    acc[static_cast<size_t>(x) * m + y] += row;
                else
                    acc[static_cast<size_t>(x) * m + y] -= row;
            }
        }
    }
    std::vector<Rational> out;
    out.reserve(acc.size());
    for (const mpz_class& v : acc) {
        Rational q(v, rd.numerator_sum);
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

Verdict classify_residual(const Interval& residual) {
    if (residual.upper_less_than(1.0)) return Verdict::Local;
    if (residual.lower_at_least(1.0)) return Verdict::NotLocal;
    return Verdict::Indeterminate;
}

namespace {

// 128-bit accumulation of the signed numerator sums: |sum| <= count * 10^18
// stays far below the 2^127 limit for any realistic decomposition.
std::vector<__int128> accumulate_qr_numerators(const RationalDecomposition& rd) {
    const int m = rd.m;
    std::vector<__int128> acc(static_cast<size_t>(m) * m, 0);
    std::vector<long long> nums(rd.numerators.size());
    for (size_t i = 0; i < rd.numerators.size(); ++i) {
        if (!rd.numerators[i].fits_slong_p())
            throw InternalError("certified_residual: numerator exceeds 64-bit range");
        nums[i] = rd.numerators[i].get_si();
    }
    std::vector<signed char> bsign(m);
    for (size_t i = 0; i < rd.strategies.size(); ++i) {
        const DeterministicStrategy& s = rd.strategies[i];
        for (int y = 0; y < m; ++y) bsign[y] = static_cast<signed char>(s.b_sign(y));
        for (int x = 0; x < m; ++x) {
            long long row = s.a_sign(x) > 0 ? nums[i] : -nums[i];
            __int128* arow = &acc[static_cast<size_t>(x) * m];
            for (int y = 0; y < m; ++y) arow[y] += bsign[y] > 0 ? row : -row;
        }
    }
    return acc;
}

mpz_class int128_to_mpz(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    mpz_class hi(static_cast<unsigned long>(u >> 64));
    mpz_class lo(static_cast<unsigned long>(u & 0xffffffffffffffffull));
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class(-r) : r;
}

} // namespace

Interval certified_residual(int n, const Rational& v0, const RationalDecomposition& rd,
                            const Rational& nu, mpfr_prec_t precision_bits) {
    if (!(nu > 0 && nu < 1)) throw InvalidParameterError("certified_residual: nu must satisfy 0 < nu < 1");
    if (v0 < 0 || v0 > 1) throw InvalidParameterError("certified_residual: v0 must be in [0, 1]");

    MeasurementPolyhedron poly = build_polyhedron(n);
    if (rd.m != poly.m)
        throw InvalidParameterError("certified_residual: decomposition size does not match polyhedron");

    const mpfr_prec_t p = precision_bits;
    const int m = poly.m;

    // Per-angle trig enclosures; vertex components follow from the grid ids.
    Interval pi_int = Interval::pi(p);
    std::vector<Interval> cosv, sinv;
    cosv.reserve(n);
    sinv.reserve(n);
    for (int i = 0; i < n; ++i) {
        Interval angle = Interval::from_long(i, p) * pi_int / Interval::from_long(n, p);
        cosv.push_back(angle.cos_on_0_pi());
        sinv.push_back(angle.sin_on_0_pi());
    }
    std::vector<Interval> vx, vy, vz;
    vx.reserve(m);
    vy.reserve(m);
    vz.reserve(m);
    for (int j = 0; j < m; ++j) {
        const VertexId& id = poly.ids[j];
        Interval cx = cosv[id.i1] * cosv[id.i2];
        Interval cy = sinv[id.i1] * cosv[id.i2];
        Interval cz = sinv[id.i2];
        if (id.flipped) {
            cx = -cx;
            cy = -cy;
            cz = -cz;
        }
        vx.push_back(std::move(cx));
        vy.push_back(std::move(cy));
        vz.push_back(std::move(cz));
    }

    std::vector<__int128> acc = accumulate_qr_numerators(rd);
    Interval denom = Interval::from_integer(rd.numerator_sum, p);
    Interval v0_int = Interval::from_rational(v0, p);

    Interval sum(p);
    for (int x = 0; x < m; ++x) {
        for (int y = 0; y < m; ++y) {
            Interval dot = vx[x] * vx[y] + vy[x] * vy[y] + vz[x] * vz[y];
            Interval q = -(v0_int * dot);
            Interval qr = Interval::from_integer(int128_to_mpz(acc[static_cast<size_t>(x) * m + y]), p) / denom;
            sum.add_assign((q - qr).abs());
        }
    }

    Rational factor = nu / (1 - nu);
    return mul_rational(sum, factor);
}

Certificate assemble_certificate(int n, const Rational& v0, const Rational& nu,
                                 RationalDecomposition rd, const Interval& residual,
                                 mpfr_prec_t precision_bits) {
    Verdict v = classify_residual(residual);
    if (v == Verdict::Indeterminate)
        throw InvalidParameterError("assemble_certificate: residual verdict indeterminate; retry with more precision");

    Certificate cert;
    cert.n = n;
    cert.m = rd.m;
    cert.k = rd.k;
    cert.v0 = v0;
    cert.nu = nu;
    cert.precision_bits = static_cast<unsigned>(precision_bits);
    cert.rd = std::move(rd);
    cert.residual_bound = residual;
    cert.eta_sq = shrinking_factor(n, precision_bits).sqr();
    cert.v_bound = mul_rational(cert.eta_sq, nu * v0);
    cert.kg3_bound = cert.v_bound.reciprocal();
    cert.verdict = (v == Verdict::Local);
    cert.tool_version = kToolVersion;
    return cert;
}

Certificate certify_decomposition(int n, const Rational& v0, const Rational& nu,
                                  const ConvexDecomposition& d, int k,
                                  mpfr_prec_t precision_bits, mpfr_prec_t max_bits) {
    RationalDecomposition rd = rationalize(d, k);
    mpfr_prec_t bits = precision_bits;
    for (;;) {
        Interval residual = certified_residual(n, v0, rd, nu, bits);
        if (classify_residual(residual) != Verdict::Indeterminate)
            return assemble_certificate(n, v0, nu, std::move(rd), residual, bits);
        if (bits >= max_bits)
            throw SolverError("certify: residual still indeterminate at " + std::to_string(max_bits) +
                              " bits");
        bits = std::min(static_cast<mpfr_prec_t>(bits * 2), max_bits);
    }
}

std::string weight_to_decimal(const mpz_class& numerator, int k) {
    mpz_class p = pow10(k);
    mpz_class ip = numerator / p;
    mpz_class frac = numerator % p;
    std::string digits = frac.get_str();
    std::string pad(static_cast<size_t>(k) - digits.size(), '0');
    return ip.get_str() + "." + pad + digits;
}

mpz_class weight_from_decimal(const std::string& s, int k) {
    auto dotpos = s.find('.');
    if (dotpos == std::string::npos) throw ParseError("weight: missing decimal point in '" + s + "'");
    std::string ip = s.substr(0, dotpos);
    std::string frac = s.substr(dotpos + 1);
    if (ip.empty() || frac.size() != static_cast<size_t>(k))
        throw ParseError("weight: expected exactly " + std::to_string(k) + " fractional digits in '" + s + "'");
    for (char c : ip + frac)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ParseError("weight: invalid digit in '" + s + "'");
    mpz_class v(ip + frac, 10);
    return v;
}

namespace {

std::string interval_line(const Interval& iv) {
    return iv.lower_string() + " " + iv.upper_string();
}

} // namespace

void write_certificate(const Certificate& cert, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open certificate for writing: " + path);
    out << "LHV-CERTIFICATE-V1\n";
    out << "tool_version: " << cert.tool_version << "\n";
    out << "interval_rounding: outward (lo toward -inf, hi toward +inf)\n";
    out << "norm: frobenius\n";
    out << "n: " << cert.n << "\n";
    out << "m: " << cert.m << "\n";
    out << "v0: " << rational_to_string(cert.v0) << "\n";
    out << "nu: " << rational_to_string(cert.nu) << "\n";
    out << "k: " << cert.k << "\n";
    out << "precision_bits: " << cert.precision_bits << "\n";
    out << "strategies: " << cert.rd.strategies.size() << "\n";
    for (size_t i = 0; i < cert.rd.strategies.size(); ++i) {
        out << "S " << strategy_to_string(cert.rd.strategies[i]) << " w="
            << weight_to_decimal(cert.rd.numerators[i], cert.k) << "\n";
    }
    out << "residual_bound: " << interval_line(cert.residual_bound) << "\n";
    out << "eta_sq: " << interval_line(cert.eta_sq) << "\n";
    out << "v_bound: " << interval_line(cert.v_bound) << "\n";
    out << "kg3_bound: " << interval_line(cert.kg3_bound) << "\n";
    out << "verdict: " << (cert.verdict ? "true" : "false") << "\n";
    if (!out) throw IoError("certificate write failed: " + path);
}

namespace {

struct ParsedCertificate {
    Certificate cert;
    std::string residual_line, eta_line, vb_line, kg_line;
};

std::string expect_field(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("certificate: missing field " + name);
    if (line.rfind(name + ": ", 0) != 0)
        throw ParseError("certificate: expected field '" + name + "', got '" + line + "'");
    return line.substr(name.size() + 2);
}

ParsedCertificate parse_certificate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open certificate: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "LHV-CERTIFICATE-V1")
        throw ParseError("certificate: bad header line");

    ParsedCertificate pc;
    Certificate& c = pc.cert;
    c.tool_version = expect_field(in, "tool_version");
    std::string rounding = expect_field(in, "interval_rounding");
    if (rounding != "outward (lo toward -inf, hi toward +inf)")
        throw ParseError("certificate: unsupported interval_rounding");
    std::string norm = expect_field(in, "norm");
    if (norm != "frobenius") throw ParseError("certificate: unsupported norm field");
    try {
        c.n = std::stoi(expect_field(in, "n"));
        c.m = std::stoi(expect_field(in, "m"));
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        throw ParseError("certificate: bad n/m field");
    }
    c.v0 = parse_rational(expect_field(in, "v0"));
    c.nu = parse_rational(expect_field(in, "nu"));
    try {
        c.k = std::stoi(expect_field(in, "k"));
        c.precision_bits = static_cast<unsigned>(std::stoul(expect_field(in, "precision_bits")));
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        throw ParseError("certificate: bad k/precision_bits field");
    }
    if (c.k < 1 || c.k > 18) throw ParseError("certificate: k out of range");
    if (c.precision_bits < 64 || c.precision_bits > 1u << 20)
        throw ParseError("certificate: implausible precision_bits");

    size_t count = 0;
    try {
        count = std::stoul(expect_field(in, "strategies"));
    } catch (...) {
        throw ParseError("certificate: bad strategies count");
    }
    c.rd.m = c.m;
    c.rd.k = c.k;
    c.rd.numerator_sum = 0;
    for (size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line))
            throw ParseError("certificate: missing strategy record " + std::to_string(i));
        if (line.rfind("S ", 0) != 0)
            throw ParseError("certificate: bad strategy record " + std::to_string(i) + ": '" + line + "'");
        auto wpos = line.rfind(" w=");
        if (wpos == std::string::npos)
            throw ParseError("certificate: strategy record " + std::to_string(i) + " missing weight");
        DeterministicStrategy s = strategy_from_string(line.substr(2, wpos - 2));
        if (s.m != c.m)
            throw ParseError("certificate: strategy record " + std::to_string(i) + " has wrong m");
        mpz_class num = weight_from_decimal(line.substr(wpos + 3), c.k);
        if (num <= 0)
            throw ParseError("certificate: strategy record " + std::to_string(i) + " has nonpositive weight");
        c.rd.strategies.push_back(std::move(s));
        c.rd.numerators.push_back(num);
        c.rd.numerator_sum += num;
    }
    pc.residual_line = expect_field(in, "residual_bound");
    pc.eta_line = expect_field(in, "eta_sq");
    pc.vb_line = expect_field(in, "v_bound");
    pc.kg_line = expect_field(in, "kg3_bound");
    std::string verdict = expect_field(in, "verdict");
    if (verdict != "true" && verdict != "false") throw ParseError("certificate: bad verdict field");
    c.verdict = (verdict == "true");
    return pc;
}

} // namespace

Certificate read_certificate(const std::string& path) {
    return parse_certificate(path).cert;
}

bool verify_certificate(const std::string& path) {
    ParsedCertificate pc = parse_certificate(path);
    Certificate& c = pc.cert;

    MeasurementPolyhedron poly = build_polyhedron(c.n);
    if (poly.m != c.m) return false;
    if (!(c.nu > 0 && c.nu < 1)) return false;
    if (c.v0 < 0 || c.v0 > 1) return false;

    Interval residual = certified_residual(c.n, c.v0, c.rd, c.nu, c.precision_bits);
    Verdict v = classify_residual(residual);
    if (v == Verdict::Indeterminate) return false;

    Certificate fresh = assemble_certificate(c.n, c.v0, c.nu, c.rd, residual, c.precision_bits);

    auto line = [](const Interval& iv) { return iv.lower_string() + " " + iv.upper_string(); };
    if (line(fresh.residual_bound) != pc.residual_line) return false;
    if (line(fresh.eta_sq) != pc.eta_line) return false;
    if (line(fresh.v_bound) != pc.vb_line) return false;
    if (line(fresh.kg3_bound) != pc.kg_line) return false;
    if (fresh.verdict != c.verdict) return false;
    return true;
}

} // namespace lhv
