#include "lhv/bloch.hpp"

#include "lhv/errors.hpp"
#include "lhv/rng.hpp"
#include "lhv/simplex.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace lhv {

namespace {
constexpr double kCoordTol = 1e-12;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector BlochVector::normalized() const {
    double n = norm();
    if (n == 0.0) throw InvalidParameterError("cannot normalize zero vector");
    return {x / n, y / n, z / n};
}

bool BlochVector::is_unit(double tol) const {
    return std::fabs(x * x + y * y + z * z - 1.0) <= tol;
}

Interval shrinking_factor(int n, mpfr_prec_t precision) {
    if (n < 2) throw InvalidParameterError("shrinking_factor: n must be >= 2");
    Interval angle = Interval::pi(precision) / Interval::from_long(2L * n, precision);
    return angle.cos_on_0_pi().sqr();
}

namespace {

BlochVector canonicalize(BlochVector u, bool& flipped) {
    flipped = false;
    const double c[3] = {u.x, u.y, u.z};
    for (double v : c) {
        if (std::fabs(v) > kCoordTol) {
            if (v < 0) {
                u = -u;
                flipped = true;
            }
            break;
        }
    }
    return u;
}

bool same_vector(const BlochVector& a, const BlochVector& b) {
    return std::fabs(a.x - b.x) <= kCoordTol && std::fabs(a.y - b.y) <= kCoordTol &&
           std::fabs(a.z - b.z) <= kCoordTol;
}

} // namespace

MeasurementPolyhedron build_polyhedron(int n, mpfr_prec_t eta_precision) {
    if (n < 2) throw InvalidParameterError("build_polyhedron: n must be >= 2");

    MeasurementPolyhedron poly;
    poly.n = n;
    poly.eta = shrinking_factor(n, eta_precision);

    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            double A = i1 * M_PI / n;
            double B = i2 * M_PI / n;
            BlochVector u{std::cos(A) * std::cos(B), std::sin(A) * std::cos(B), std::sin(B)};
            bool flipped = false;
            u = canonicalize(u, flipped);
            bool dup = false;
            for (const BlochVector& w : poly.vertices) {
                if (same_vector(u, w)) { dup = true; break; }
            }
            if (!dup) {
                poly.vertices.push_back(u);
                poly.ids.push_back({i1, i2, flipped});
            }
        }
    }
    poly.m = static_cast<int>(poly.vertices.size());

    int expected = (n % 2 == 1) ? n * n : n * n - n + 1;
    if (poly.m != expected)
        throw InternalError("build_polyhedron: vertex count " + std::to_string(poly.m) +
                            " does not match expected " + std::to_string(expected));

    for (int i = 0; i < poly.m; ++i) {
        if (!poly.vertices[i].is_unit())
            throw InternalError("build_polyhedron: non-unit vertex");
        for (int j = i + 1; j < poly.m; ++j) {
            if (same_vector(poly.vertices[i], poly.vertices[j]) ||
                same_vector(poly.vertices[i], -poly.vertices[j]))
                throw InternalError("build_polyhedron: equal or antipodal vertex pair survived dedup");
        }
    }
    return poly;
}

namespace {

// Feasibility of scale*u as a convex combination of signed vertices:
// sum_j c_j (s_j v_j) = scale*u, sum_j c_j = 1, c >= 0.
FeasibilityResult direction_feasibility(const MeasurementPolyhedron& poly, const BlochVector& u,
                                        double scale) {
    int m = poly.m;
    int cols = 2 * m;
    std::vector<double> A(static_cast<size_t>(4) * cols);
    for (int j = 0; j < m; ++j) {
        const BlochVector& v = poly.vertices[j];
        A[0 * cols + j] = v.x;
        A[1 * cols + j] = v.y;
        A[2 * cols + j] = v.z;
        A[3 * cols + j] = 1.0;
        A[0 * cols + m + j] = -v.x;
        A[1 * cols + m + j] = -v.y;
        A[2 * cols + m + j] = -v.z;
        A[3 * cols + m + j] = 1.0;
    }
    std::vector<double> b{scale * u.x, scale * u.y, scale * u.z, 1.0};
    return solve_feasibility(4, cols, A, b);
}

} // namespace

bool direction_feasible(const MeasurementPolyhedron& poly, const BlochVector& u, double scale) {
    return direction_feasibility(poly, u, scale).feasible;
}

BlochVector midpoint_direction(int n) {
    double x = M_PI / (2 * n);
    double c = std::cos(x), s = std::sin(x);
    return {c * c, s * c, s};
}

ShrinkingReport verify_shrinking(const MeasurementPolyhedron& poly, int samples, uint64_t seed) {
    if (samples < 1) throw InvalidParameterError("verify_shrinking: samples must be >= 1");

    double eta = poly.eta_upper();
    ShrinkingReport report;
    report.samples = samples;

    uint64_t state = seed;
    for (int s = 0; s < samples; ++s) {
        BlochVector u;
        do {
            u = {gaussian(state), gaussian(state), gaussian(state)};
        } while (u.norm() < 1e-6);
        u = u.normalized();
        FeasibilityResult r = direction_feasibility(poly, u, eta);
        if (!r.feasible) report.max_violation = std::max(report.max_violation, r.infeasibility);
    }

    BlochVector mid = midpoint_direction(poly.n);
    report.witness_scale = eta + 1e-6;
    report.witness_infeasible = !direction_feasibility(poly, mid, report.witness_scale).feasible;

    // Measure the true maximal feasible radius along the midpoint direction by
    // bisection (the polyhedron is contained in the unit ball, so 1.5 is out).
    double lo = 0.0, hi = 1.5;
    for (int it = 0; it < 45; ++it) {
        double t = 0.5 * (lo + hi);
        if (direction_feasibility(poly, mid, t).feasible)
            lo = t;
        else
            hi = t;
    }
    report.witness_radius = lo;
    return report;
}

DirectionDecomposition decompose_direction(const MeasurementPolyhedron& poly, const BlochVector& u) {
    if (!u.is_unit(1e-9)) throw InvalidParameterError("decompose_direction: u must be a unit vector");
    double eta = poly.eta_upper();
    FeasibilityResult r = direction_feasibility(poly, u, eta);
    if (!r.feasible)
        throw InternalError("decompose_direction: eta*u infeasible against its own polyhedron");

    DirectionDecomposition d;
    d.weights = r.x;
    BlochVector recon{0, 0, 0};
    for (int j = 0; j < poly.m; ++j) {
        recon = recon + poly.vertices[j].scaled(d.weights[j] - d.weights[poly.m + j]);
    }
    d.residual = (recon - u.scaled(eta)).norm();
    return d;
}

CorrelationMatrix werner_target(const MeasurementPolyhedron& poly, double v) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidParameterError("werner_target: v must be in [0, 1]");
    CorrelationMatrix q(poly.m);
    for (int x = 0; x < poly.m; ++x)
        for (int y = 0; y < poly.m; ++y)
            q.at(x, y) = -v * poly.vertices[x].dot(poly.vertices[y]);
    return q;
}

double quantum_probability(double v, const BlochVector& x, const BlochVector& y, int a, int b) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidParameterError("quantum_probability: v must be in [0, 1]");
    if ((a != 1 && a != -1) || (b != 1 && b != -1))
        throw InvalidParameterError("quantum_probability: outcomes must be +-1");
    return (1.0 - a * b * v * x.dot(y)) / 4.0;
}

void write_polyhedron(const MeasurementPolyhedron& poly, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "polyhedron\n";
    out << "n: " << poly.n << "\n";
    out << "m: " << poly.m << "\n";
    char buf[96];
    for (const BlochVector& v : poly.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g", v.x, v.y, v.z);
        out << buf << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace lhv
