#pragma once

#include "lhv/correlation.hpp"
#include "lhv/interval.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lhv {

struct BlochVector {
    double x = 0.0, y = 0.0, z = 0.0;

    double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
    BlochVector operator-() const { return {-x, -y, -z}; }
    BlochVector operator+(const BlochVector& o) const { return {x + o.x, y + o.y, z + o.z}; }
    BlochVector operator-(const BlochVector& o) const { return {x - o.x, y - o.y, z - o.z}; }
    BlochVector scaled(double s) const { return {s * x, s * y, s * z}; }
    BlochVector normalized() const;
    bool is_unit(double tol = 1e-12) const;
};

// Grid indices and canonicalization sign of a polyhedron vertex. Retained so
// exact-arithmetic consumers can rebuild the vertex from integers alone.
struct VertexId {
    int i1 = 0;
    int i2 = 0;
    bool flipped = false; // true if the antipodal representative was kept
};

// The measurement-direction polyhedron: a two-index trigonometric grid of unit
// vectors, one representative per antipodal pair, with its shrinking factor
// eta = cos^2(pi/2n) held as a certified enclosure.
struct MeasurementPolyhedron {
    int n = 0;
    int m = 0;
    std::vector<BlochVector> vertices;
    std::vector<VertexId> ids;
    Interval eta{192};

    double eta_upper() const { return eta.upper_double(); }
};

// Builds the degree-n polyhedron: m = n^2 vertices for odd n, n^2 - n + 1 for
// even n. Throws InvalidParameterError for n < 2; throws InternalError if the
// deduplicated count does not match.
MeasurementPolyhedron build_polyhedron(int n, mpfr_prec_t eta_precision = 192);

// Certified enclosure of cos^2(pi/2n); width well below 1e-30 at the default
// precision.
Interval shrinking_factor(int n, mpfr_prec_t precision = 192);

struct ShrinkingReport {
    double max_violation = 0.0;   // largest infeasibility over the sampled directions
    int samples = 0;
    bool witness_infeasible = false; // feasibility status of (eta + 1e-6) * u_mid
    double witness_scale = 0.0;      // the scale that was tested, eta + 1e-6
    double witness_radius = 0.0;     // measured max feasible scale along u_mid
};

// Samples random unit directions u and checks by linear feasibility that
// eta*u is a convex combination of signed vertices; also probes the
// mid-plane/mid-vertex direction at scale eta + 1e-6 and measures the true
// maximal feasible radius along it.
ShrinkingReport verify_shrinking(const MeasurementPolyhedron& poly, int samples, uint64_t seed);

struct DirectionDecomposition {
    std::vector<double> weights; // over signed vertices: [+v_0..+v_{m-1}, -v_0..-v_{m-1}]
    double residual = 0.0;       // Euclidean reconstruction error of eta*u
};

// Expresses eta*u as a convex combination of signed vertices. Throws
// InternalError if the feasibility solve fails (it cannot, for a valid eta).
DirectionDecomposition decompose_direction(const MeasurementPolyhedron& poly, const BlochVector& u);

// Whether scale*u lies in the convex hull of the signed vertices.
bool direction_feasible(const MeasurementPolyhedron& poly, const BlochVector& u, double scale);

// Werner-state joint correlations for the polyhedron's settings:
// q(x, y) = -v * (u_x . u_y). Requires 0 <= v <= 1.
CorrelationMatrix werner_target(const MeasurementPolyhedron& poly, double v);

// p(a, b | x, y) = (1 - a*b*v*(x.y)) / 4 for outcomes a, b in {-1, +1}.
double quantum_probability(double v, const BlochVector& x, const BlochVector& y, int a, int b);

// The mid-plane/mid-vertex direction used by the shrinking-factor witness:
// azimuth pi/2n between adjacent vertex planes, elevation pi/2n between
// adjacent in-plane vertices.
BlochVector midpoint_direction(int n);

// Structured-text polyhedron export: n, m, then one vertex per line with
// 17-significant-digit coordinates.
void write_polyhedron(const MeasurementPolyhedron& poly, const std::string& path);

} // namespace lhv
