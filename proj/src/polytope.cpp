#include "lhv/polytope.hpp"

#include "lhv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace lhv {

DeterministicStrategy::DeterministicStrategy(int m_)
    : m(m_), a_bits(words_for(m_), 0), b_bits(words_for(m_), 0) {}

void DeterministicStrategy::set_a(int x, int sign) {
    uint64_t mask = uint64_t{1} << (x & 63);
    if (sign > 0)
        a_bits[x >> 6] |= mask;
    else
        a_bits[x >> 6] &= ~mask;
}

void DeterministicStrategy::set_b(int y, int sign) {
    uint64_t mask = uint64_t{1} << (y & 63);
    if (sign > 0)
        b_bits[y >> 6] |= mask;
    else
        b_bits[y >> 6] &= ~mask;
}

size_t StrategyHash::operator()(const DeterministicStrategy& s) const {
    uint64_t h = 0xcbf29ce484222325ull ^ static_cast<uint64_t>(s.m);
    auto mix = [&h](uint64_t w) {
        h ^= w;
        h *= 0x100000001b3ull;
        h ^= h >> 29;
    };
    for (uint64_t w : s.a_bits) mix(w);
    for (uint64_t w : s.b_bits) mix(w ^ 0x5851f42d4c957f2dull);
    return static_cast<size_t>(h);
}

std::string bits_to_hex(const std::vector<uint64_t>& bits, int m) {
    int nibbles = (m + 3) / 4;
    std::string s(nibbles, '0');
    for (int k = 0; k < nibbles; ++k) {
        unsigned v = 0;
        for (int j = 0; j < 4; ++j) {
            int bit = 4 * k + j;
            if (bit < m && ((bits[bit >> 6] >> (bit & 63)) & 1)) v |= 1u << j;
        }
        s[k] = "0123456789abcdef"[v];
    }
    return s;
}

std::vector<uint64_t> bits_from_hex(const std::string& hex, int m) {
    int nibbles = (m + 3) / 4;
    if (static_cast<int>(hex.size()) != nibbles)
        throw ParseError("strategy hex: expected " + std::to_string(nibbles) + " digits, got " +
                         std::to_string(hex.size()));
    std::vector<uint64_t> bits(DeterministicStrategy::words_for(m), 0);
    for (int k = 0; k < nibbles; ++k) {
        char c = hex[k];
        unsigned v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = 10 + (c - 'a');
        else if (c >= 'A' && c <= 'F') v = 10 + (c - 'A');
        else throw ParseError(std::string("strategy hex: invalid digit '") + c + "'");
        for (int j = 0; j < 4; ++j) {
            int bit = 4 * k + j;
            if (bit >= m) {
                if (v & (1u << j)) throw ParseError("strategy hex: bits set beyond m");
            } else if (v & (1u << j)) {
                bits[bit >> 6] |= uint64_t{1} << (bit & 63);
            }
        }
    }
    return bits;
}

std::string strategy_to_string(const DeterministicStrategy& s) {
    std::ostringstream out;
    out << "m=" << s.m << " a=" << bits_to_hex(s.a_bits, s.m) << " b=" << bits_to_hex(s.b_bits, s.m);
    return out.str();
}

DeterministicStrategy strategy_from_string(const std::string& line) {
    std::istringstream in(line);
    std::string mf, af, bf;
    if (!(in >> mf >> af >> bf) || mf.rfind("m=", 0) != 0 || af.rfind("a=", 0) != 0 ||
        bf.rfind("b=", 0) != 0)
        throw ParseError("strategy: expected 'm=<int> a=<hex> b=<hex>', got '" + line + "'");
    int m = 0;
    try {
        m = std::stoi(mf.substr(2));
    } catch (...) {
        throw ParseError("strategy: bad m field in '" + line + "'");
    }
    if (m <= 0) throw ParseError("strategy: nonpositive m");
    DeterministicStrategy s(m);
    s.a_bits = bits_from_hex(af.substr(2), m);
    s.b_bits = bits_from_hex(bf.substr(2), m);
    return s;
}

CorrelationMatrix vertex_matrix(const DeterministicStrategy& s) {
    CorrelationMatrix d(s.m);
    for (int x = 0; x < s.m; ++x) {
        double ax = s.a_sign(x);
        for (int y = 0; y < s.m; ++y) d.at(x, y) = ax * s.b_sign(y);
    }
    return d;
}

double overlap(const CorrelationMatrix& G, const DeterministicStrategy& s) {
    if (G.m != s.m) throw InvalidParameterError("overlap: size mismatch");
    double total = 0.0;
    for (int x = 0; x < G.m; ++x) {
        double ax = s.a_sign(x);
        double row = 0.0;
        for (int y = 0; y < G.m; ++y) row += G.at(x, y) * s.b_sign(y);
        total += ax * row;
    }
    return total;
}

namespace {

// One full alternating-maximization descent. Signs pack into doubles +-1 for
// the inner products; convergence is detected by an unchanged (a, b)
// assignment. The objective is verified to be nondecreasing at every half
// step against the same summation order.
OracleResult alternate_from(const CorrelationMatrix& G, std::vector<double> a) {
    const int m = G.m;
    std::vector<double> b(m, -1.0), s(m), t(m);
    std::vector<double> a_prev, b_prev;

    double last_S = -std::numeric_limits<double>::infinity();
    const int max_cycles = 500;
    for (int cycle = 0; cycle < max_cycles; ++cycle) {
        // b-update: s_y = sum_x G(x,y) a_x
        std::fill(s.begin(), s.end(), 0.0);
        for (int x = 0; x < m; ++x) {
            double ax = a[x];
            const double* row = &G.entries[static_cast<size_t>(x) * m];
            for (int y = 0; y < m; ++y) s[y] += row[y] * ax;
        }
        double S_old_b = 0.0, S_b = 0.0;
        for (int y = 0; y < m; ++y) {
            S_old_b += b[y] * s[y];
            double nb = s[y] > 0.0 ? 1.0 : -1.0;
            b[y] = nb;
            S_b += nb * s[y];
        }
        if (cycle > 0 && S_b < S_old_b)
            throw InternalError("heuristic oracle: objective decreased at b-update");

        // a-update: t_x = sum_y G(x,y) b_y
        double S_old_a = 0.0, S_a = 0.0;
        for (int x = 0; x < m; ++x) {
            const double* row = &G.entries[static_cast<size_t>(x) * m];
            double tx = 0.0;
            for (int y = 0; y < m; ++y) tx += row[y] * b[y];
            t[x] = tx;
            S_old_a += a[x] * tx;
            double na = tx > 0.0 ? 1.0 : -1.0;
            a[x] = na;
            S_a += na * tx;
        }
        if (S_a < S_old_a) throw InternalError("heuristic oracle: objective decreased at a-update");
        if (S_a < S_b) throw InternalError("heuristic oracle: objective decreased across updates");
        last_S = S_a;

        if (!a_prev.empty() && a == a_prev && b == b_prev) break;
        a_prev = a;
        b_prev = b;
    }
    (void)last_S;

    OracleResult res;
    res.strategy = DeterministicStrategy(m);
    for (int x = 0; x < m; ++x) res.strategy.set_a(x, a[x] > 0 ? 1 : -1);
    for (int y = 0; y < m; ++y) res.strategy.set_b(y, b[y] > 0 ? 1 : -1);
    res.overlap = overlap(G, res.strategy);
    return res;
}

} // namespace

OracleResult polish_strategy(const CorrelationMatrix& G, const DeterministicStrategy& start) {
    if (G.m != start.m) throw InvalidParameterError("polish_strategy: size mismatch");
    std::vector<double> a(G.m);
    for (int x = 0; x < G.m; ++x) a[x] = start.a_sign(x);
    return alternate_from(G, std::move(a));
}

OracleResult heuristic_oracle(const CorrelationMatrix& G, int restarts, uint64_t seed) {
    if (restarts < 1) throw InvalidParameterError("heuristic_oracle: restarts must be >= 1");
    const int m = G.m;
    OracleResult best;
    bool have = false;
    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 eng(seed + static_cast<uint64_t>(r));
        std::vector<double> a(m);
        uint64_t word = 0;
        for (int x = 0; x < m; ++x) {
            if ((x & 63) == 0) word = eng();
            a[x] = (word >> (x & 63)) & 1 ? 1.0 : -1.0;
        }
        OracleResult res = alternate_from(G, std::move(a));
        if (!have || res.overlap > best.overlap) {
            best = std::move(res);
            have = true;
        }
    }
    return best;
}

OracleResult exact_oracle(const CorrelationMatrix& G) {
    const int m = G.m;
    if (m < 1) throw InvalidParameterError("exact_oracle: empty matrix");
    if (m > 22) throw SizeLimitError("exact_oracle: m > 22 not supported");

    // Enumerate a-patterns with a_0 = +1 in Gray-code order, maintaining the
    // column sums s_y = sum_x G(x,y) a_x incrementally.
    std::vector<double> s(m, 0.0);
    std::vector<double> a(m, 1.0);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y) s[y] += G.at(x, y);

    auto score = [&]() {
        double S = 0.0;
        for (int y = 0; y < m; ++y) S += std::fabs(s[y]);
        return S;
    };

    uint64_t best_code = 0;
    double best_S = score();
    const uint64_t count = uint64_t{1} << (m - 1);
    uint64_t gray = 0;
    for (uint64_t k = 1; k < count; ++k) {
        uint64_t g = k ^ (k >> 1);
        uint64_t changed = g ^ gray;
        gray = g;
        int bit = __builtin_ctzll(changed);
        int x = bit + 1; // a_0 is pinned
        double delta = -2.0 * a[x];
        a[x] = -a[x];
        const double* row = &G.entries[static_cast<size_t>(x) * m];
        for (int y = 0; y < m; ++y) s[y] += delta * row[y];
        double S = score();
        if (S > best_S) {
            best_S = S;
            best_code = gray;
        }
    }

    OracleResult res;
    res.strategy = DeterministicStrategy(m);
    res.strategy.set_a(0, 1);
    for (int x = 1; x < m; ++x) res.strategy.set_a(x, (best_code >> (x - 1)) & 1 ? -1 : 1);
    // recompute column sums for the winner and pick maximizing b signs
    std::fill(s.begin(), s.end(), 0.0);
    for (int x = 0; x < m; ++x) {
        double ax = res.strategy.a_sign(x);
        for (int y = 0; y < m; ++y) s[y] += ax * G.at(x, y);
    }
    for (int y = 0; y < m; ++y) res.strategy.set_b(y, s[y] > 0.0 ? 1 : -1);
    res.overlap = overlap(G, res.strategy);
    return res;
}

L1CheckResult l1_local_check(const CorrelationMatrix& z) {
    L1CheckResult r;
    r.l1 = z.sum_abs();
    r.is_certified_local = r.l1 < 1.0;
    return r;
}

CorrelationMatrix ConvexDecomposition::mixture() const {
    CorrelationMatrix acc(m);
    for (size_t i = 0; i < strategies.size(); ++i) {
        const DeterministicStrategy& s = strategies[i];
        double w = weights[i];
        for (int x = 0; x < m; ++x) {
            double wa = w * s.a_sign(x);
            for (int y = 0; y < m; ++y) acc.at(x, y) += wa * s.b_sign(y);
        }
    }
    return acc;
}

double ConvexDecomposition::weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

} // namespace lhv
