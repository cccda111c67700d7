#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lhv/bloch.hpp"
#include "lhv/errors.hpp"
#include "lhv/rng.hpp"

#include <cmath>
#include <complex>
#include <cstdio>

using namespace lhv;

namespace {

// Independent reference for the measurement statistics: build the 4x4 density
// matrix v|psi-><psi-| + (1-v)I/4 and the projector A(a,x) (x) B(b,y)
// explicitly, then take the trace.
double trace_probability(double v, const BlochVector& x, const BlochVector& y, int a, int b) {
    using C = std::complex<double>;
    C I(0, 1);
    auto pauli_dot = [&](const BlochVector& u) {
        // 2x2 matrix u . sigma, row-major
        return std::array<C, 4>{C(u.z), C(u.x) - I * u.y, C(u.x) + I * u.y, C(-u.z)};
    };
    auto proj = [&](const BlochVector& u, int s) {
        std::array<C, 4> m = pauli_dot(u);
        std::array<C, 4> p;
        for (int i = 0; i < 4; ++i) p[i] = 0.5 * (double(s) * m[i]);
        p[0] += 0.5;
        p[3] += 0.5;
        return p;
    };
    std::array<C, 4> A = proj(x, a), B = proj(y, b);
    // O = A (x) B, 4x4
    C O[4][4];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) O[2 * i + k][2 * j + l] = A[2 * i + j] * B[2 * k + l];
    // rho = v |psi-><psi-| + (1-v) I/4 with |psi-> = (|01> - |10>)/sqrt2
    C rho[4][4] = {};
    C psi[4] = {0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho[i][j] = v * psi[i] * std::conj(psi[j]);
    for (int i = 0; i < 4; ++i) rho[i][i] += (1.0 - v) / 4.0;
    C tr = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) tr += rho[i][j] * O[j][i];
    return tr.real();
}

BlochVector random_unit(uint64_t& state) {
    BlochVector u;
    do {
        u = {gaussian(state), gaussian(state), gaussian(state)};
    } while (u.norm() < 1e-6);
    return u.normalized();
}

} // namespace

TEST_CASE("vertex counts match the parity rule") {
    for (int n = 2; n <= 12; ++n) {
        MeasurementPolyhedron poly = build_polyhedron(n);
        int expected = (n % 2 == 1) ? n * n : n * n - n + 1;
        CHECK(poly.m == expected);
        CHECK(poly.vertices.size() == static_cast<size_t>(expected));
        CHECK(poly.ids.size() == static_cast<size_t>(expected));
        for (const BlochVector& u : poly.vertices) CHECK(u.is_unit());
    }
    CHECK(build_polyhedron(25).m == 625);
    CHECK_THROWS_AS(build_polyhedron(1), InvalidParameterError);
}

TEST_CASE("shrinking factor enclosures") {
    Interval eta2 = shrinking_factor(2);
    CHECK(eta2.contains(mpq_class(1, 2))); // cos^2(pi/4) = 1/2 exactly
    CHECK(eta2.width_upper() < 1e-30);

    Interval eta5 = shrinking_factor(5);
    CHECK(std::fabs(eta5.midpoint_double() - 0.9045084971874737) < 1e-15);
    CHECK(eta5.width_upper() < 1e-30);

    Interval eta25 = shrinking_factor(25);
    CHECK(std::fabs(eta25.midpoint_double() - 0.9960573506572389) < 1e-15);
    Interval eta25_sq = eta25.sqr();
    CHECK(std::fabs(eta25_sq.midpoint_double() - 0.9921302457983178) < 1e-15);

    CHECK_THROWS_AS(shrinking_factor(1), InvalidParameterError);
}

TEST_CASE("werner target") {
    MeasurementPolyhedron poly = build_polyhedron(3);

    CorrelationMatrix q0 = werner_target(poly, 0.0);
    for (double e : q0.entries) CHECK(e == 0.0);

    double v = 0.7;
    CorrelationMatrix q = werner_target(poly, v);
    for (int x = 0; x < q.m; ++x) {
        CHECK(q.at(x, x) == doctest::Approx(-v).epsilon(1e-14));
        for (int y = 0; y < q.m; ++y) {
            CHECK(q.at(x, y) == doctest::Approx(q.at(y, x)).epsilon(1e-14));
            CHECK(std::fabs(q.at(x, y)) <= v + 1e-14);
        }
    }

    // orthogonal vertex pair -> zero entry (n=2 octahedron has an axis pair)
    MeasurementPolyhedron oct = build_polyhedron(2);
    bool found_zero = false;
    CorrelationMatrix q2 = werner_target(oct, 1.0);
    for (int x = 0; x < q2.m && !found_zero; ++x)
        for (int y = 0; y < q2.m; ++y)
            if (x != y && std::fabs(q2.at(x, y)) < 1e-14) {
                found_zero = true;
                break;
            }
    CHECK(found_zero);

    CHECK_THROWS_AS(werner_target(poly, 1.5), InvalidParameterError);
    CHECK_THROWS_AS(werner_target(poly, -0.1), InvalidParameterError);
}

TEST_CASE("quantum probability closed form and edge values") {
    BlochVector zhat{0, 0, 1};
    CHECK(quantum_probability(1.0, zhat, zhat, 1, 1) == doctest::Approx(0.0));
    CHECK(quantum_probability(0.0, zhat, {1, 0, 0}, -1, 1) == doctest::Approx(0.25));
    CHECK(quantum_probability(0.5, zhat, zhat, 1, -1) == doctest::Approx(0.375));
    CHECK_THROWS_AS(quantum_probability(0.5, zhat, zhat, 2, 1), InvalidParameterError);
    CHECK_THROWS_AS(quantum_probability(-0.5, zhat, zhat, 1, 1), InvalidParameterError);
}

TEST_CASE("quantum probability matches the density-matrix trace oracle") {
    uint64_t state = 20240817;
    for (int trial = 0; trial < 1000; ++trial) {
        double v = uniform01(state);
        BlochVector x = random_unit(state);
        BlochVector y = random_unit(state);
        int a = (splitmix64(state) & 1) ? 1 : -1;
        int b = (splitmix64(state) & 1) ? 1 : -1;
        double p = quantum_probability(v, x, y, a, b);
        double ref = trace_probability(v, x, y, a, b);
        CHECK(std::fabs(p - ref) < 1e-12);
    }
}

TEST_CASE("quantum probability normalization and marginals") {
    uint64_t state = 99;
    for (int trial = 0; trial < 50; ++trial) {
        double v = uniform01(state);
        BlochVector x = random_unit(state);
        BlochVector y = random_unit(state);
        double total = 0.0, marg_a = 0.0, marg_b = 0.0;
        for (int a : {-1, 1})
            for (int b : {-1, 1}) {
                double p = quantum_probability(v, x, y, a, b);
                CHECK(p >= 0.0);
                total += p;
                if (a == 1) marg_a += p;
                if (b == 1) marg_b += p;
            }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(marg_a == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(marg_b == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("decompose_direction reconstructs eta*u") {
    MeasurementPolyhedron poly = build_polyhedron(3);

    SUBCASE("vertex direction") {
        DirectionDecomposition d = decompose_direction(poly, poly.vertices[0]);
        CHECK(d.residual <= 1e-10);
        double sum = 0.0;
        for (double w : d.weights) {
            CHECK(w >= -1e-15);
            sum += w;
        }
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
    }
    SUBCASE("antipodal vertex direction") {
        DirectionDecomposition d = decompose_direction(poly, -poly.vertices[0]);
        CHECK(d.residual <= 1e-10);
        CHECK(std::fabs(1.0 - [&] {
                  double s = 0;
                  for (double w : d.weights) s += w;
                  return s;
              }()) <= 1e-12);
    }
    SUBCASE("pole direction") {
        DirectionDecomposition d = decompose_direction(poly, BlochVector{0, 0, 1});
        CHECK(d.residual <= 1e-10);
    }
    SUBCASE("non-unit input rejected") {
        CHECK_THROWS_AS(decompose_direction(poly, BlochVector{0, 0, 2}), InvalidParameterError);
    }
}

TEST_CASE("verify_shrinking samples stay feasible for n in [2, 12]") {
    for (int n = 2; n <= 12; ++n) {
        MeasurementPolyhedron poly = build_polyhedron(n);
        ShrinkingReport r = verify_shrinking(poly, 100, 1);
        CHECK(r.max_violation == 0.0);
        CHECK(r.samples == 100);
    }
}

TEST_CASE("midpoint witness radius matches the true hull radius along it") {
    // Along the mid-plane/mid-vertex direction the hull boundary sits strictly
    // beyond the analytic lower bound eta = cos^2(pi/2n); the measured radius
    // acts as the negative control for the feasibility solver instead.
    for (int n : {2, 3, 5, 8}) {
        MeasurementPolyhedron poly = build_polyhedron(n);
        ShrinkingReport r = verify_shrinking(poly, 1, 7);
        double eta = poly.eta_upper();
        CHECK(r.witness_scale == doctest::Approx(eta + 1e-6));
        CHECK(r.witness_radius > eta); // the analytic factor is a strict lower bound
        CHECK(!direction_feasible(poly, midpoint_direction(n), r.witness_radius + 1e-4));
        CHECK(direction_feasible(poly, midpoint_direction(n), r.witness_radius - 1e-4));
        CHECK(!direction_feasible(poly, midpoint_direction(n), 1.01));
    }
    // n=3 closed-form check of the facet radius along the witness direction:
    // the quad facet through the four nearest vertices has normal
    // (1, t, t)/|.| with t = tan(pi/6).
    MeasurementPolyhedron poly3 = build_polyhedron(3);
    ShrinkingReport r3 = verify_shrinking(poly3, 1, 7);
    BlochVector mid = midpoint_direction(3);
    double t = std::tan(M_PI / 6);
    double w_dot = mid.x + t * (mid.y + mid.z);
    CHECK(r3.witness_radius == doctest::Approx(1.0 / w_dot).epsilon(1e-6));
}

TEST_CASE("polyhedron vertices have no equal or antipodal pairs") {
    for (int n : {2, 3, 4, 6, 9}) {
        MeasurementPolyhedron poly = build_polyhedron(n);
        for (int i = 0; i < poly.m; ++i)
            for (int j = i + 1; j < poly.m; ++j) {
                BlochVector d1 = poly.vertices[i] - poly.vertices[j];
                BlochVector d2 = poly.vertices[i] + poly.vertices[j];
                CHECK((d1.norm() > 1e-9));
                CHECK((d2.norm() > 1e-9));
            }
    }
}
