#pragma once

#include "lhv/correlation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lhv {

// A local deterministic strategy: sign assignments a_x, b_y in {-1, +1},
// bit-packed (bit set <=> sign +1, bit index = setting index).
struct DeterministicStrategy {
    int m = 0;
    std::vector<uint64_t> a_bits;
    std::vector<uint64_t> b_bits;

    DeterministicStrategy() = default;
    explicit DeterministicStrategy(int m_);

    static int words_for(int m) { return (m + 63) / 64; }

    int a_sign(int x) const { return (a_bits[x >> 6] >> (x & 63)) & 1 ? 1 : -1; }
    int b_sign(int y) const { return (b_bits[y >> 6] >> (y & 63)) & 1 ? 1 : -1; }
    void set_a(int x, int sign);
    void set_b(int y, int sign);
    void flip_a(int x) { a_bits[x >> 6] ^= (uint64_t{1} << (x & 63)); }

    bool operator==(const DeterministicStrategy& o) const {
        return m == o.m && a_bits == o.a_bits && b_bits == o.b_bits;
    }
};

struct StrategyHash {
    size_t operator()(const DeterministicStrategy& s) const;
};

// Hex serialization with an explicit m field: "m=<int> a=<hex> b=<hex>".
// Hex digit k encodes bits 4k..4k+3, lowest setting first.
std::string strategy_to_string(const DeterministicStrategy& s);
DeterministicStrategy strategy_from_string(const std::string& line);
std::string bits_to_hex(const std::vector<uint64_t>& bits, int m);
std::vector<uint64_t> bits_from_hex(const std::string& hex, int m);

// The rank-1 vertex matrix D(x, y) = a_x * b_y.
CorrelationMatrix vertex_matrix(const DeterministicStrategy& s);

// Canonical overlap <G, D_lambda> = sum_{x,y} G(x,y) a_x b_y, accumulated
// row-major. Oracles report exactly this value for their returned strategy.
double overlap(const CorrelationMatrix& G, const DeterministicStrategy& s);

struct OracleResult {
    DeterministicStrategy strategy;
    double overlap = 0.0;
};

// Alternating-maximization heuristic over `restarts` independent random
// initializations (per-restart seed = seed + restart index; uniform iid +-1
// initial a). Ties across restarts resolve to the lowest restart index.
OracleResult heuristic_oracle(const CorrelationMatrix& G, int restarts, uint64_t seed);

// One alternating-maximization descent from a given starting strategy.
OracleResult polish_strategy(const CorrelationMatrix& G, const DeterministicStrategy& start);

// Exact maximizer by enumeration over a-assignments (a_1 fixed +1 by global
// sign symmetry). Requires m <= 22.
OracleResult exact_oracle(const CorrelationMatrix& G);

struct L1CheckResult {
    bool is_certified_local = false;
    double l1 = 0.0;
};

// Sufficient locality test: a correlation point with sum of absolute entries
// below 1 is a convex mixture of single-entry points and the origin.
L1CheckResult l1_local_check(const CorrelationMatrix& z);

// A convex mixture of deterministic strategies.
struct ConvexDecomposition {
    int m = 0;
    std::vector<DeterministicStrategy> strategies;
    std::vector<double> weights;

    CorrelationMatrix mixture() const;
    double weight_sum() const;
};

} // namespace lhv
