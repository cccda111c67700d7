#include "lhv/correlation.hpp"

#include "lhv/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lhv {

double CorrelationMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : entries) s += v * v;
    return std::sqrt(s);
}

double CorrelationMatrix::sum_abs() const {
    double s = 0.0;
    for (double v : entries) s += std::fabs(v);
    return s;
}

bool CorrelationMatrix::entries_within(double bound, double tol) const {
    for (double v : entries)
        if (std::fabs(v) > bound + tol) return false;
    return true;
}

CorrelationMatrix operator-(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    if (a.m != b.m) throw InvalidParameterError("matrix subtraction: size mismatch");
    CorrelationMatrix r(a.m);
    for (size_t i = 0; i < a.entries.size(); ++i) r.entries[i] = a.entries[i] - b.entries[i];
    return r;
}

double frobenius_distance(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    if (a.m != b.m) throw InvalidParameterError("frobenius_distance: size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.entries.size(); ++i) {
        double d = a.entries[i] - b.entries[i];
        s += d * d;
    }
    return std::sqrt(s);
}

uint64_t matrix_hash(const CorrelationMatrix& q) {
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const unsigned char* p, size_t n) {
        for (size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ull;
        }
    };
    uint32_t m = static_cast<uint32_t>(q.m);
    mix(reinterpret_cast<const unsigned char*>(&m), sizeof m);
    for (double v : q.entries) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        mix(reinterpret_cast<const unsigned char*>(&bits), sizeof bits);
    }
    return h;
}

void write_correlation_csv(const CorrelationMatrix& q, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "m=" << q.m << "\n";
    char buf[64];
    for (int x = 0; x < q.m; ++x) {
        for (int y = 0; y < q.m; ++y) {
            std::snprintf(buf, sizeof buf, "%.17g", q.at(x, y));
            out << buf;
            if (y + 1 < q.m) out << ",";
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

CorrelationMatrix read_correlation_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("m=", 0) != 0)
        throw ParseError("correlation csv: missing m= header in " + path);
    int m = 0;
    try {
        m = std::stoi(header.substr(2));
    } catch (...) {
        throw ParseError("correlation csv: bad m= header in " + path);
    }
    if (m <= 0) throw ParseError("correlation csv: nonpositive m in " + path);
    CorrelationMatrix q(m);
    for (int x = 0; x < m; ++x) {
        std::string line;
        if (!std::getline(in, line)) throw ParseError("correlation csv: missing row " + std::to_string(x));
        std::stringstream ss(line);
        std::string cell;
        for (int y = 0; y < m; ++y) {
            if (!std::getline(ss, cell, ',')) throw ParseError("correlation csv: short row " + std::to_string(x));
            q.at(x, y) = std::stod(cell);
        }
    }
    return q;
}

} // namespace lhv
