#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lhv {

// An m x m matrix of joint correlators, row-major. Entries live in [-1, +1]
// for valid correlation points; arbitrary real matrices are also used as
// oracle objectives.
struct CorrelationMatrix {
    int m = 0;
    std::vector<double> entries; // row-major, size m*m

    CorrelationMatrix() = default;
    explicit CorrelationMatrix(int m_) : m(m_), entries(static_cast<size_t>(m_) * m_, 0.0) {}

    double& at(int x, int y) { return entries[static_cast<size_t>(x) * m + y]; }
    double at(int x, int y) const { return entries[static_cast<size_t>(x) * m + y]; }

    double frobenius_norm() const;
    double sum_abs() const;
    bool entries_within(double bound, double tol = 0.0) const;
};

CorrelationMatrix operator-(const CorrelationMatrix& a, const CorrelationMatrix& b);

double frobenius_distance(const CorrelationMatrix& a, const CorrelationMatrix& b);

// FNV-1a over the raw little-endian bytes of the entries; used to tie
// checkpoints to their target.
uint64_t matrix_hash(const CorrelationMatrix& q);

// CSV export/import: first line "m=<int>", then m rows of comma-separated
// entries with 17 significant digits.
void write_correlation_csv(const CorrelationMatrix& q, const std::string& path);
CorrelationMatrix read_correlation_csv(const std::string& path);

} // namespace lhv
