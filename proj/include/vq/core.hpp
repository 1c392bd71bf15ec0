#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace vq {

// Deduplicated ascending values of an input vector together with the
// index map that scatters them back to the original positions.
// Duplicates are decided by exact floating-point equality; callers that
// want fuzzy deduplication must pre-round.
struct SortedDistinctVector {
    std::vector<double> values;        // strictly ascending
    std::vector<std::size_t> index_map;  // one entry per original position
    std::size_t original_len = 0;

    std::size_t distinct_size() const { return values.size(); }
};

// Implicit lower-triangular step basis. Column j of the (never
// materialized) m x m matrix equals diffs[j] on rows j..m-1 and 0 above,
// so coefficient vectors over it reconstruct piecewise-constant signals.
// base_values are the prefix sums of diffs: an all-ones coefficient
// vector reconstructs base_values exactly.  base_values[0] == 0 makes
// column 0 structurally zero; the basis is still accepted and the solvers
// simply freeze that coordinate out of the active set.
struct StepBasis {
    std::vector<double> base_values;  // v, filled from the distinct values
    std::vector<double> diffs;        // d[0] = v[0], d[j] = v[j] - v[j-1]

    std::size_t size() const { return diffs.size(); }

    // Squared norm of implicit column j: d[j]^2 * (m - j).
    double column_sq_norm(std::size_t j) const {
        return diffs[j] * diffs[j] * static_cast<double>(size() - j);
    }
};

// Coefficient vector over a StepBasis plus the penalties that produced it.
struct SparseCoefficients {
    std::vector<double> alpha;
    std::vector<std::size_t> support;  // ascending indices of nonzeros
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    int iterations = 0;
};

// Final product of a quantizer: the reconstructed full-length vector.
struct QuantizedVector {
    std::vector<double> data;
    std::size_t distinct_count = 0;
    std::string method;
    std::map<std::string, double> params;
};

inline void require_finite(const std::vector<double>& w) {
    for (double x : w) {
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite input");
    }
}

inline std::size_t count_distinct(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

// o(w): sort, deduplicate, remember where every original entry went.
inline SortedDistinctVector extract_distinct(const std::vector<double>& w) {
    if (w.empty()) throw std::invalid_argument("empty vector");
    require_finite(w);

    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });

    SortedDistinctVector d;
    d.original_len = w.size();
    d.index_map.resize(w.size());
    for (std::size_t p : order) {
        if (d.values.empty() || w[p] != d.values.back()) d.values.push_back(w[p]);
        d.index_map[p] = d.values.size() - 1;
    }
    return d;
}

// Build the implicit basis, filling the base values from the distinct
// values themselves (which doubles as the solver warm start).
inline StepBasis build_step_basis(const SortedDistinctVector& d) {
    StepBasis b;
    b.base_values = d.values;
    b.diffs.resize(d.values.size());
    for (std::size_t j = 0; j < d.values.size(); ++j) {
        b.diffs[j] = (j == 0) ? d.values[0] : d.values[j] - d.values[j - 1];
    }
    return b;
}

// N_p * alpha in O(m) as running prefix sums of d[j] * alpha[j].
inline std::vector<double> apply_basis(const StepBasis& b, const std::vector<double>& alpha) {
    if (alpha.size() != b.size()) throw std::invalid_argument("length mismatch");
    std::vector<double> out(alpha.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        acc += b.diffs[j] * alpha[j];
        out[j] = acc;
    }
    return out;
}

// Inverse of the dedup step: out[p] = q[index_map[p]].
inline std::vector<double> scatter_to_original(const SortedDistinctVector& d,
                                               const std::vector<double>& q) {
    if (q.size() != d.values.size()) throw std::invalid_argument("length mismatch");
    std::vector<double> out(d.original_len);
    for (std::size_t p = 0; p < d.original_len; ++p) out[p] = q[d.index_map[p]];
    return out;
}

struct MatrixShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool operator==(const MatrixShape&) const = default;
};

// Row-major flattening so matrices (images, weight layers) can ride
// through the 1-D quantizers and be restored afterwards.
inline std::pair<std::vector<double>, MatrixShape> flatten_matrix(
    const std::vector<std::vector<double>>& rows) {
    MatrixShape shape{rows.size(), rows.empty() ? 0 : rows[0].size()};
    std::vector<double> flat;
    flat.reserve(shape.rows * shape.cols);
    for (const auto& row : rows) {
        if (row.size() != shape.cols) throw std::invalid_argument("ragged rows");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return {std::move(flat), shape};
}

inline std::vector<std::vector<double>> restore_matrix(const std::vector<double>& flat,
                                                       MatrixShape shape) {
    if (flat.size() != shape.rows * shape.cols)
        throw std::invalid_argument("length mismatch");
    std::vector<std::vector<double>> rows(shape.rows, std::vector<double>(shape.cols));
    for (std::size_t i = 0; i < shape.rows; ++i)
        for (std::size_t j = 0; j < shape.cols; ++j) rows[i][j] = flat[i * shape.cols + j];
    return rows;
}

}  // namespace vq
