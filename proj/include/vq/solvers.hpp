#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vq/core.hpp"

namespace vq {

struct SolverConfig {
    double tolerance = 1e-7;  // max absolute coordinate change
    int max_sweeps = 10000;
    double lambda1 = 0.0;
    double lambda2 = 0.0;  // magnitude of the negative-L2 term
    bool track_objective = false;

    void validate() const {
        if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be > 0");
        if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
        if (lambda1 < 0) throw std::invalid_argument("lambda1 must be >= 0");
        if (lambda2 < 0) throw std::invalid_argument("lambda2 must be >= 0");
    }
};

struct SolveTrace {
    int sweeps_run = 0;
    double final_max_delta = 0.0;
    bool converged = false;
    std::vector<double> objectives;  // per sweep, only when track_objective
};

// S_a(x) = sign(x) * max(|x| - a, 0), the proximal map of the L1 penalty.
inline double soft_threshold(double x, double a) {
    if (a < 0) throw std::invalid_argument("threshold must be >= 0");
    if (x > a) return x - a;
    if (x < -a) return x + a;
    return 0.0;
}

namespace detail {

// Objective the coordinate updates minimize:
//   ||target - N_p alpha||^2 + lambda1 ||alpha||_1 - 2 lambda2 ||alpha||_2^2.
// The quadratic term is written without a 1/2 factor; the per-coordinate
// shrinkage threshold is therefore lambda1 / (2 (||c_k||^2 - 2 lambda2)),
// half the nominal lambda1 / (||c_k||^2 - 2 lambda2) that the same update
// carries under the 1/2-convention.  lambda2 enters the denominator as
// 2*lambda2, so the objective above carries it with coefficient 2.
inline double cd_objective(const StepBasis& b, const std::vector<double>& target,
                           const std::vector<double>& alpha, double lambda1,
                           double lambda2) {
    std::vector<double> fit = apply_basis(b, alpha);
    double obj = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        double e = target[i] - fit[i];
        obj += e * e;
    }
    for (double a : alpha) obj += lambda1 * std::abs(a) - 2.0 * lambda2 * a * a;
    return obj;
}

inline std::pair<SparseCoefficients, SolveTrace> coordinate_descent(
    const StepBasis& b, const std::vector<double>& target, const SolverConfig& cfg,
    std::vector<double> alpha) {
    cfg.validate();
    const std::size_t m = b.size();
    if (target.size() != m) throw std::invalid_argument("length mismatch");
    if (alpha.size() != m) throw std::invalid_argument("length mismatch");

    std::vector<double> col_sq(m);
    for (std::size_t j = 0; j < m; ++j) col_sq[j] = b.column_sq_norm(j);

    if (cfg.lambda2 > 0) {
        double min_sq = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j)
            if (b.diffs[j] != 0.0) min_sq = std::min(min_sq, col_sq[j]);
        // Hard precondition: every active denominator must stay positive
        // with relative margin 1e-6, otherwise the updates are no longer
        // coordinate-wise minimizations and the iteration can blow up.
        if (!(2.0 * cfg.lambda2 < min_sq * (1.0 - 1e-6)))
            throw std::invalid_argument("lambda2 too large: denominator non-positive");
    }

    // Structurally zero columns can never contribute to the fit.
    for (std::size_t j = 0; j < m; ++j)
        if (b.diffs[j] == 0.0) alpha[j] = 0.0;

    SolveTrace trace;
    if (cfg.track_objective)
        trace.objectives.push_back(cd_objective(b, target, alpha, cfg.lambda1, cfg.lambda2));

    std::vector<double> resid(m);
    for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        // Residual rebuilt exactly each sweep; in-sweep bookkeeping below
        // is O(1) per coordinate because every update touches a suffix.
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            acc += b.diffs[i] * alpha[i];
            resid[i] = target[i] - acc;
        }

        double suffix = 0.0;  // sum of current residual over rows k..m-1
        for (std::size_t i = 0; i < m; ++i) suffix += resid[i];

        double cum = 0.0;  // sum of d_j * delta_j applied so far this sweep
        double max_delta = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double rk_now = resid[k] - cum;
            if (b.diffs[k] == 0.0) {
                suffix -= rk_now;
                continue;
            }
            const double denom = col_sq[k] - 2.0 * cfg.lambda2;
            const double rho = b.diffs[k] * suffix + alpha[k] * col_sq[k];
            const double next = soft_threshold(rho / denom, 0.5 * cfg.lambda1 / denom);
            if (!std::isfinite(next)) throw std::runtime_error("divergence");
            const double delta = next - alpha[k];
            if (delta != 0.0) {
                alpha[k] = next;
                suffix -= b.diffs[k] * delta * static_cast<double>(m - k);
                max_delta = std::max(max_delta, std::abs(delta));
            }
            suffix -= rk_now - b.diffs[k] * delta;
            cum += b.diffs[k] * delta;
        }

        trace.sweeps_run = sweep;
        trace.final_max_delta = max_delta;
        if (cfg.track_objective) {
            double obj = cd_objective(b, target, alpha, cfg.lambda1, cfg.lambda2);
#ifndef NDEBUG
            assert(obj <= trace.objectives.back() + 1e-9 * (1.0 + std::abs(trace.objectives.back())));
#endif
            trace.objectives.push_back(obj);
        }
        if (max_delta <= cfg.tolerance) {
            trace.converged = true;
            break;
        }
    }

    SparseCoefficients out;
    out.alpha = std::move(alpha);
    for (std::size_t j = 0; j < m; ++j)
        if (out.alpha[j] != 0.0) out.support.push_back(j);
    out.lambda1 = cfg.lambda1;
    out.lambda2 = cfg.lambda2;
    out.iterations = trace.sweeps_run;
    return {std::move(out), trace};
}

}  // namespace detail

// Cyclic coordinate descent for ||target - N_p a||^2 + lambda1 ||a||_1,
// warm-started from alpha0 (all-ones reconstructs the base values exactly).
inline std::pair<SparseCoefficients, SolveTrace> lasso_cd(const StepBasis& b,
                                                          const std::vector<double>& target,
                                                          SolverConfig cfg,
                                                          std::vector<double> alpha0) {
    cfg.lambda2 = 0.0;
    return detail::coordinate_descent(b, target, cfg, std::move(alpha0));
}

inline std::pair<SparseCoefficients, SolveTrace> lasso_cd(const StepBasis& b,
                                                          const std::vector<double>& target,
                                                          const SolverConfig& cfg) {
    return lasso_cd(b, target, cfg, std::vector<double>(b.size(), 1.0));
}

// Same loop with per-column denominator ||c_k||^2 - 2*lambda2: the
// negative-L2 term widens the shrink-to-zero region while keeping the
// surviving coefficients closer to their unpenalized size.
inline std::pair<SparseCoefficients, SolveTrace> lasso_neg_l2_cd(
    const StepBasis& b, const std::vector<double>& target, const SolverConfig& cfg,
    std::vector<double> alpha0) {
    return detail::coordinate_descent(b, target, cfg, std::move(alpha0));
}

inline std::pair<SparseCoefficients, SolveTrace> lasso_neg_l2_cd(
    const StepBasis& b, const std::vector<double>& target, const SolverConfig& cfg) {
    return lasso_neg_l2_cd(b, target, cfg, std::vector<double>(b.size(), 1.0));
}

// Smallest lambda1 for which the all-zero coefficient vector is optimal.
// Useful as a scale anchor when choosing penalty grids.
inline double lasso_lambda_max(const StepBasis& b, const std::vector<double>& target) {
    if (target.size() != b.size()) throw std::invalid_argument("length mismatch");
    double suffix = 0.0;
    std::vector<double> suffix_at(b.size());
    for (std::size_t k = b.size(); k-- > 0;) {
        suffix += target[k];
        suffix_at[k] = suffix;
    }
    double best = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k)
        best = std::max(best, std::abs(b.diffs[k] * suffix_at[k]));
    return 2.0 * best;
}

// Unpenalized least squares restricted to the selected columns.
// The selected system is block-diagonal in disguise: support indices
// h_1 < ... < h_s split the rows into segments [h_t, h_{t+1}) whose fitted
// level is free, rows before h_1 are pinned at 0, and the optimal level of
// each segment is the plain mean of the target over it.  Coefficients are
// recovered from consecutive level differences, all in O(m).
inline SparseCoefficients post_ls_refit(const StepBasis& b, const std::vector<double>& target,
                                        std::vector<std::size_t> support) {
    const std::size_t m = b.size();
    if (target.size() != m) throw std::invalid_argument("length mismatch");
    if (support.empty()) throw std::invalid_argument("empty support");
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (support.back() >= m) throw std::invalid_argument("support index out of range");
    for (std::size_t h : support)
        if (b.diffs[h] == 0.0) throw std::runtime_error("singular selected system");

    SparseCoefficients out;
    out.alpha.assign(m, 0.0);
    double prev_level = 0.0;
    for (std::size_t t = 0; t < support.size(); ++t) {
        const std::size_t lo = support[t];
        const std::size_t hi = (t + 1 < support.size()) ? support[t + 1] : m;
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sum += target[i];
        const double level = sum / static_cast<double>(hi - lo);
        out.alpha[support[t]] = (level - prev_level) / b.diffs[support[t]];
        prev_level = level;
    }
    for (std::size_t j = 0; j < m; ++j)
        if (out.alpha[j] != 0.0) out.support.push_back(j);
    return out;
}

// Optimal partition of ascending values into at most `segments` contiguous
// runs, each replaced by its (weighted) mean.
struct L0Partition {
    std::vector<std::size_t> boundaries;  // 0 = b_0 < b_1 < ... < b_s = m
    std::vector<double> levels;           // one per segment
    double sse = 0.0;
};

// Exact dynamic program for the L0-constrained problem.  The optimal
// quantizer of sorted 1-D data with at most l levels always uses contiguous
// segments, so contiguous-partition DP gives the global optimum in
// O(m^2 l) time and O(m l) memory.  It is feasible for every 1 <= l <= m,
// which also makes it the brute-force loss oracle for the other methods.
inline L0Partition solve_l0_dp(const std::vector<double>& values, std::size_t l,
                               const std::vector<double>* weights = nullptr) {
    const std::size_t m = values.size();
    if (l < 1 || l > m) throw std::invalid_argument("l out of range");
    for (std::size_t i = 0; i + 1 < m; ++i)
        if (values[i] > values[i + 1]) throw std::invalid_argument("values must be ascending");
    if (weights) {
        if (weights->size() != m) throw std::invalid_argument("length mismatch");
        for (double w : *weights)
            if (!(w > 0)) throw std::invalid_argument("weights must be positive");
    }

    if (l == m) {
        // Every value its own segment: exact reconstruction.
        L0Partition out;
        out.boundaries.resize(m + 1);
        for (std::size_t i = 0; i <= m; ++i) out.boundaries[i] = i;
        out.levels = values;
        out.sse = 0.0;
        return out;
    }

    // Prefix sums of weight, weighted value and weighted square.
    std::vector<double> pw(m + 1, 0.0), ps(m + 1, 0.0), pq(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double w = weights ? (*weights)[i] : 1.0;
        pw[i + 1] = pw[i] + w;
        ps[i + 1] = ps[i] + w * values[i];
        pq[i + 1] = pq[i] + w * values[i] * values[i];
    }
    // Weighted SSE of values[i..j) around their weighted mean.
    auto cost = [&](std::size_t i, std::size_t j) {
        const double w = pw[j] - pw[i];
        const double s = ps[j] - ps[i];
        const double q = pq[j] - pq[i];
        return std::max(0.0, q - s * s / w);
    };

    const std::size_t k_max = std::min(l, m);
    const double inf = std::numeric_limits<double>::infinity();
    // best[k][i]: optimal cost of first i values in exactly k+1 segments.
    std::vector<std::vector<double>> best(k_max, std::vector<double>(m + 1, inf));
    std::vector<std::vector<std::size_t>> split(k_max, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = 1; i <= m; ++i) best[0][i] = cost(0, i);
    for (std::size_t k = 1; k < k_max; ++k) {
        for (std::size_t i = k + 1; i <= m; ++i) {
            for (std::size_t t = k; t < i; ++t) {
                const double c = best[k - 1][t] + cost(t, i);
                if (c < best[k][i]) {
                    best[k][i] = c;
                    split[k][i] = t;
                }
            }
        }
    }

    L0Partition out;
    out.sse = best[k_max - 1][m];
    out.boundaries.assign(k_max + 1, 0);
    out.boundaries[k_max] = m;
    std::size_t pos = m;
    for (std::size_t k = k_max - 1; k > 0; --k) {
        pos = split[k][pos];
        out.boundaries[k] = pos;
    }
    out.levels.resize(k_max);
    for (std::size_t k = 0; k < k_max; ++k) {
        const std::size_t lo = out.boundaries[k], hi = out.boundaries[k + 1];
        out.levels[k] = (ps[hi] - ps[lo]) / (pw[hi] - pw[lo]);
    }
    return out;
}

}  // namespace vq
