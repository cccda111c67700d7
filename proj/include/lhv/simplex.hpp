#pragma once

#include <vector>

namespace lhv {

struct FeasibilityResult {
    bool feasible = false;
    double infeasibility = 0.0;   // optimal phase-1 objective (0 when feasible)
    std::vector<double> x;        // a feasible point when feasible
};

// Solves the linear feasibility problem: find x >= 0 with A x = b, where A is
// rows x cols row-major and dense. Phase-1 simplex with Bland's rule (no
// cycling). `tol` classifies the optimal artificial objective as zero.
FeasibilityResult solve_feasibility(int rows, int cols, const std::vector<double>& A,
                                    const std::vector<double>& b, double tol = 1e-9,
                                    long max_pivots = 200000);

} // namespace lhv
