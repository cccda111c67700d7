#include "lhv/simplex.hpp"

#include "lhv/errors.hpp"

#include <cmath>
#include <limits>

namespace lhv {

// Dense tableau phase-1 simplex. The tableau holds the original columns, one
// artificial per row, and the rhs; the objective row tracks the (negated) sum
// of artificials. Bland's rule guarantees termination.
FeasibilityResult solve_feasibility(int rows, int cols, const std::vector<double>& A,
                                    const std::vector<double>& b, double tol,
                                    long max_pivots) {
    if (static_cast<int>(A.size()) != rows * cols || static_cast<int>(b.size()) != rows)
        throw InvalidParameterError("solve_feasibility: dimension mismatch");

    int total = cols + rows; // original + artificial
    std::vector<double> T(static_cast<size_t>(rows) * (total + 1), 0.0);
    auto t = [&](int r, int c) -> double& { return T[static_cast<size_t>(r) * (total + 1) + c]; };

    for (int r = 0; r < rows; ++r) {
        double sign = b[r] < 0.0 ? -1.0 : 1.0;
        for (int c = 0; c < cols; ++c) t(r, c) = sign * A[static_cast<size_t>(r) * cols + c];
        t(r, cols + r) = 1.0;
        t(r, total) = sign * b[r];
    }

    std::vector<int> basis(rows);
    for (int r = 0; r < rows; ++r) basis[r] = cols + r;

    // objective row: minimize sum of artificials -> reduced costs
    std::vector<double> obj(total + 1, 0.0);
    for (int c = 0; c <= total; ++c) {
        double s = 0.0;
        for (int r = 0; r < rows; ++r) s += t(r, c);
        obj[c] = s;
    }
    for (int r = 0; r < rows; ++r) obj[cols + r] -= 1.0; // basic artificial columns

    long pivots = 0;
    const double piv_eps = 1e-11;
    for (;;) {
        // Bland: entering = lowest-index column with positive reduced cost
        int enter = -1;
        for (int c = 0; c < total; ++c) {
            if (obj[c] > piv_eps) { enter = c; break; }
        }
        if (enter < 0) break;

        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int r = 0; r < rows; ++r) {
            double a = t(r, enter);
            if (a > piv_eps) {
                double ratio = t(r, total) / a;
                if (ratio < best_ratio - 1e-15 ||
                    (std::fabs(ratio - best_ratio) <= 1e-15 && (leave < 0 || basis[r] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
        }
        if (leave < 0) throw SolverError("phase-1 simplex: unbounded (should not happen)");

        double pivot = t(leave, enter);
        for (int c = 0; c <= total; ++c) t(leave, c) /= pivot;
        for (int r = 0; r < rows; ++r) {
            if (r == leave) continue;
            double f = t(r, enter);
            if (f != 0.0)
                for (int c = 0; c <= total; ++c) t(r, c) -= f * t(leave, c);
        }
        double fo = obj[enter];
        for (int c = 0; c <= total; ++c) obj[c] -= fo * t(leave, c);
        basis[leave] = enter;

        if (++pivots > max_pivots) throw SolverError("phase-1 simplex: pivot budget exceeded");
    }

    double objective = 0.0;
    for (int r = 0; r < rows; ++r)
        if (basis[r] >= cols) objective += t(r, total);

    FeasibilityResult res;
    res.infeasibility = std::max(0.0, objective);
    res.feasible = res.infeasibility <= tol;
    res.x.assign(cols, 0.0);
    if (res.feasible) {
        for (int r = 0; r < rows; ++r)
            if (basis[r] < cols) res.x[basis[r]] = std::max(0.0, t(r, total));
    }
    return res;
}

} // namespace lhv
