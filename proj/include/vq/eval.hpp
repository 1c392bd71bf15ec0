#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace vq {

// Clamp to [a, b] ("hard sigmoid"): quantized outputs often must stay in a
// representable range, e.g. pixel values in [0, 1].
inline double hard_sigmoid(double x, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("invalid clamp range: a >= b");
    if (x <= a) return a;
    if (x >= b) return b;
    return x;
}

inline void hard_sigmoid_inplace(std::vector<double>& v, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("invalid clamp range: a >= b");
    for (double& x : v) x = x <= a ? a : (x >= b ? b : x);
}

// Squared Euclidean distance, the information-loss metric for all reports.
inline double l2_loss(const std::vector<double>& w, const std::vector<double>& q) {
    if (w.size() != q.size()) throw std::invalid_argument("length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        double e = w[i] - q[i];
        s += e * e;
    }
    return s;
}

// Logarithmically spaced grid, inclusive of both endpoints.
inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0) || !(hi > lo)) throw std::invalid_argument("invalid grid range");
    if (points < 2) throw std::invalid_argument("need at least 2 grid points");
    std::vector<double> g(points);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.back() = hi;
    return g;
}

struct BenchRow {
    std::string method;
    std::map<std::string, double> params;
    double loss_full = 0.0;      // on the original vector
    double loss_distinct = 0.0;  // on the deduplicated values
    std::size_t distinct_count = 0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
    std::string error;  // non-empty when the cell failed
};

struct BenchReport {
    int schema_version = 1;
    std::uint64_t seed = 0;
    std::string command_line;
    std::string dataset;  // human-readable data source description
    std::vector<BenchRow> rows;
};

}  // namespace vq
