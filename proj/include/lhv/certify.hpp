#pragma once

#include "lhv/interval.hpp"
#include "lhv/polytope.hpp"
#include "lhv/rational.hpp"

#include <string>
#include <vector>

namespace lhv {

// A convex mixture with exact rational weights obtained by decimal truncation:
// stored weight numerators N_i give pre-normalization weights N_i / 10^k; the
// normalized weights N_i / sum(N) sum to exactly 1. Zero-truncated strategies
// are dropped.
struct RationalDecomposition {
    int m = 0;
    int k = 0;
    std::vector<DeterministicStrategy> strategies;
    std::vector<mpz_class> numerators; // all positive
    mpz_class numerator_sum;

    Rational weight(size_t i) const; // normalized exact weight
};

// Truncates each weight to floor(10^k w)/10^k, drops zeros, renormalizes by
// the exact sum. k must be in [1, 18]. Throws InvalidParameterError if every
// weight truncates to zero.
RationalDecomposition rationalize(const ConvexDecomposition& d, int k);

// Exact rational entries of q_r = sum_i w_i D_i (row-major, m*m).
std::vector<Rational> rational_mixture(const RationalDecomposition& rd);

enum class Verdict { Local, NotLocal, Indeterminate };

Verdict classify_residual(const Interval& residual);

// Certified enclosure of (nu/(1-nu)) * sum_{x,y} |q(x,y) - q_r(x,y)| where
// q(x,y) = -v0 (u_x . u_y) is recomputed from (n, v0) in interval arithmetic
// with outward rounding at `precision_bits`, and q_r is exact. The reduction
// order is fixed (row-major), so results are bit-reproducible.
Interval certified_residual(int n, const Rational& v0, const RationalDecomposition& rd,
                            const Rational& nu, mpfr_prec_t precision_bits);

struct Certificate {
    int n = 0;
    int m = 0;
    int k = 0;
    Rational v0;
    Rational nu;
    unsigned precision_bits = 256;
    RationalDecomposition rd;
    Interval residual_bound{256};
    Interval eta_sq{256};   // cos^4(pi/2n)
    Interval v_bound{256};  // eta^2 * nu * v0
    Interval kg3_bound{256};
    bool verdict = false;
    std::string tool_version;
};

// Combines a determinate residual with the polyhedron constants into the
// final bounds. Throws if the residual verdict is indeterminate.
Certificate assemble_certificate(int n, const Rational& v0, const Rational& nu,
                                 RationalDecomposition rd, const Interval& residual,
                                 mpfr_prec_t precision_bits);

// Full pipeline with precision retry: doubles precision_bits on an
// indeterminate verdict, up to max_bits.
Certificate certify_decomposition(int n, const Rational& v0, const Rational& nu,
                                  const ConvexDecomposition& d, int k,
                                  mpfr_prec_t precision_bits, mpfr_prec_t max_bits = 4096);

void write_certificate(const Certificate& cert, const std::string& path);
Certificate read_certificate(const std::string& path);

// Recomputes everything in the certificate from its stored strategy/weight
// records and compares against the stored bounds and verdict. Parse errors
// throw ParseError naming the offending record; semantic mismatches return
// false.
bool verify_certificate(const std::string& path);

// Pre-normalization weight as a decimal string with exactly k fractional
// digits (e.g. numerator 12, k=4 -> "0.0012").
std::string weight_to_decimal(const mpz_class& numerator, int k);
mpz_class weight_from_decimal(const std::string& s, int k);

} // namespace lhv
