#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vq/clustering.hpp"
#include "vq/core.hpp"
#include "vq/eval.hpp"
#include "vq/solvers.hpp"

namespace vq {

using ClampRange = std::optional<std::pair<double, double>>;

enum class Method { L1, L1Refit, L1Iterative, L1L2, L0, ClusterLs, Kmeans, Uniform };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::L1: return "l1";
        case Method::L1Refit: return "l1_refit";
        case Method::L1Iterative: return "l1_iterative";
        case Method::L1L2: return "l1_l2";
        case Method::L0: return "l0";
        case Method::ClusterLs: return "cluster_ls";
        case Method::Kmeans: return "kmeans";
        case Method::Uniform: return "uniform";
    }
    throw std::logic_error("unreachable");
}

inline Method method_from_name(const std::string& s) {
    if (s == "l1") return Method::L1;
    if (s == "l1_refit") return Method::L1Refit;
    if (s == "l1_iterative") return Method::L1Iterative;
    if (s == "l1_l2") return Method::L1L2;
    if (s == "l0") return Method::L0;
    if (s == "cluster_ls") return Method::ClusterLs;
    if (s == "kmeans") return Method::Kmeans;
    if (s == "uniform") return Method::Uniform;
    throw std::invalid_argument("unknown method: " + s);
}

// Multiplicity of each distinct value in the original vector, for the
// opt-in weighted modes.
inline std::vector<double> distinct_multiplicities(const SortedDistinctVector& d) {
    std::vector<double> mult(d.values.size(), 0.0);
    for (std::size_t idx : d.index_map) mult[idx] += 1.0;
    return mult;
}

namespace detail {

inline QuantizedVector finish(const SortedDistinctVector& d, const std::vector<double>& levels,
                              std::string method, const ClampRange& clamp) {
    QuantizedVector out;
    out.data = scatter_to_original(d, levels);
    if (clamp) hard_sigmoid_inplace(out.data, clamp->first, clamp->second);
    out.distinct_count = count_distinct(out.data);
    out.method = std::move(method);
    return out;
}

}  // namespace detail

// L1-penalized least squares over the step basis, optionally followed by an
// unpenalized refit on the solved support to remove shrinkage bias.
inline QuantizedVector quantize_l1_l2(const std::vector<double>& w, double lambda1,
                                      double lambda2, bool refit = true,
                                      const ClampRange& clamp = {},
                                      SolverConfig cfg = {}) {
    auto d = extract_distinct(w);
    auto basis = build_step_basis(d);
    cfg.lambda1 = lambda1;
    cfg.lambda2 = lambda2;
    auto [coeffs, trace] = lasso_neg_l2_cd(basis, d.values, cfg);
    SparseCoefficients* final_coeffs = &coeffs;
    SparseCoefficients refitted;
    if (refit && !coeffs.support.empty()) {
        refitted = post_ls_refit(basis, d.values, coeffs.support);
        final_coeffs = &refitted;
    }
    auto levels = apply_basis(basis, final_coeffs->alpha);
    auto out = detail::finish(d, levels,
                              lambda2 > 0 ? "l1_l2" : (refit ? "l1_refit" : "l1"), clamp);
    out.params["lambda1"] = lambda1;
    if (lambda2 > 0) out.params["lambda2"] = lambda2;
    out.params["support"] = static_cast<double>(final_coeffs->support.size());
    out.params["sweeps"] = static_cast<double>(trace.sweeps_run);
    return out;
}

inline QuantizedVector quantize_l1(const std::vector<double>& w, double lambda1,
                                   bool refit = true, const ClampRange& clamp = {},
                                   SolverConfig cfg = {}) {
    return quantize_l1_l2(w, lambda1, 0.0, refit, clamp, std::move(cfg));
}

// Thrown when the iterative schedule runs out of rounds; carries the
// best (smallest-support) result seen so far.
struct IterativeLimitError : std::runtime_error {
    QuantizedVector best;
    explicit IterativeLimitError(QuantizedVector b)
        : std::runtime_error("iterative quantization: max rounds exhausted"),
          best(std::move(b)) {}
};

// Iterative schedule: grow lambda1 arithmetically, warm-starting every
// round from the previous round's refitted coefficients, until the solved
// support has at most l nonzeros.  The achieved support may undershoot l;
// the schedule cannot target it exactly.  A support of size s reconstructs
// up to s + 1 distinct values: rows before the first selected column sit
// on an extra zero level.
inline QuantizedVector quantize_l1_iterative(const std::vector<double>& w, std::size_t l,
                                             double lambda0 = 0.0, double dlambda = 0.0,
                                             int max_rounds = 200,
                                             const ClampRange& clamp = {},
                                             SolverConfig cfg = {}) {
    if (l < 1) throw std::invalid_argument("l out of range");
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
    auto d = extract_distinct(w);
    auto basis = build_step_basis(d);

    // Default schedule: the support-vs-lambda curve spans several decades,
    // so a useful start depends on the target size.  A coarse geometric
    // walk brackets the penalty where the solved support first exceeds l;
    // starting the arithmetic schedule well below that bracket makes the
    // crossing step small relative to lambda, so the achieved size lands
    // close to the target instead of far below it.
    if (lambda0 == 0.0) {
        const double lmax = lasso_lambda_max(basis, d.values);
        if (l >= basis.size()) {
            lambda0 = lmax / 200.0;  // round one satisfies the guard anyway
        } else {
            double probe = lmax / 4.0;
            SolverConfig pcfg = cfg;
            pcfg.lambda2 = 0.0;
            for (int j = 0; j < 40 && probe > 0.0; ++j) {
                pcfg.lambda1 = probe;
                if (lasso_cd(basis, d.values, pcfg).first.support.size() > l) break;
                probe /= 4.0;
            }
            lambda0 = probe / 40.0;
        }
        // Degenerate targets (an all-zero vector) have no penalty scale at
        // all; any positive value terminates in round one.
        if (!(lambda0 > 0)) lambda0 = 1.0;
    }
    if (dlambda == 0.0) dlambda = lambda0;
    if (!(lambda0 > 0)) throw std::invalid_argument("lambda0 must be > 0");
    if (!(dlambda > 0)) throw std::invalid_argument("dlambda must be > 0");

    std::vector<double> warm(basis.size(), 1.0);
    std::vector<double> best_levels;
    std::size_t best_support = basis.size() + 1;
    int rounds = 0;
    for (int t = 1; t <= max_rounds; ++t) {
        rounds = t;
        cfg.lambda1 = lambda0 + static_cast<double>(t - 1) * dlambda;
        cfg.lambda2 = 0.0;
        auto [coeffs, trace] = lasso_cd(basis, d.values, cfg, warm);

        std::vector<double> levels;
        std::size_t support_size = coeffs.support.size();
        if (coeffs.support.empty()) {
            levels.assign(basis.size(), 0.0);
            warm.assign(basis.size(), 0.0);
        } else {
            auto refitted = post_ls_refit(basis, d.values, coeffs.support);
            support_size = refitted.support.size();
            levels = apply_basis(basis, refitted.alpha);
            warm = refitted.alpha;
        }
        if (support_size < best_support) {
            best_support = support_size;
            best_levels = levels;
        }
        if (coeffs.support.size() <= l) {
            auto out = detail::finish(d, levels, "l1_iterative", clamp);
            out.params["l"] = static_cast<double>(l);
            out.params["lambda0"] = lambda0;
            out.params["dlambda"] = dlambda;
            out.params["lambda1"] = cfg.lambda1;
            out.params["rounds"] = static_cast<double>(rounds);
            out.params["support"] = static_cast<double>(support_size);
            return out;
        }
    }
    auto best = detail::finish(d, best_levels, "l1_iterative", clamp);
    best.params["l"] = static_cast<double>(l);
    best.params["rounds"] = static_cast<double>(rounds);
    best.params["support"] = static_cast<double>(best_support);
    throw IterativeLimitError(std::move(best));
}

// Exact L0-constrained quantization via the contiguous-partition DP.
inline QuantizedVector quantize_l0(const std::vector<double>& w, std::size_t l,
                                   const ClampRange& clamp = {}) {
    auto d = extract_distinct(w);
    if (l < 1 || l > d.values.size()) throw std::invalid_argument("l out of range");
    auto part = solve_l0_dp(d.values, l);
    std::vector<double> levels(d.values.size());
    for (std::size_t s = 0; s + 1 < part.boundaries.size(); ++s)
        for (std::size_t i = part.boundaries[s]; i < part.boundaries[s + 1]; ++i)
            levels[i] = part.levels[s];
    auto out = detail::finish(d, levels, "l0", clamp);
    out.params["l"] = static_cast<double>(l);
    out.params["sse_distinct"] = part.sse;
    return out;
}

// K-means on the distinct values, then least-squares levels per cluster.
// With weighted=false this solves the reduced system against the distinct
// values and each level is the plain mean of the cluster members; with
// weighted=true the levels minimize the full-vector loss instead, i.e.
// they are multiplicity-weighted cluster means.
inline QuantizedVector quantize_cluster_ls(const std::vector<double>& w, std::size_t l,
                                           std::uint64_t seed, int restarts = 10,
                                           const ClampRange& clamp = {},
                                           bool weighted = false) {
    auto d = extract_distinct(w);
    if (l < 1 || l > d.values.size()) throw std::invalid_argument("l out of range");
    auto assignment = kmeans_1d(d.values, l, seed, restarts);
    auto bounds = assignment_segments(assignment, d.values);
    auto mult = distinct_multiplicities(d);

    std::vector<double> levels(d.values.size());
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = bounds[s]; i < bounds[s + 1]; ++i) {
            const double wi = weighted ? mult[i] : 1.0;
            num += wi * d.values[i];
            den += wi;
        }
        const double level = num / den;
        for (std::size_t i = bounds[s]; i < bounds[s + 1]; ++i) levels[i] = level;
    }
    auto out = detail::finish(d, levels, "cluster_ls", clamp);
    out.params["l"] = static_cast<double>(l);
    out.params["seed"] = static_cast<double>(seed);
    out.params["restarts"] = static_cast<double>(restarts);
    out.params["weighted"] = weighted ? 1.0 : 0.0;
    return out;
}

// Plain k-means baseline: every distinct value is replaced by its cluster
// center.
inline QuantizedVector quantize_kmeans(const std::vector<double>& w, std::size_t l,
                                       std::uint64_t seed, int restarts = 10,
                                       const ClampRange& clamp = {},
                                       bool weighted = false) {
    auto d = extract_distinct(w);
    if (l < 1 || l > d.values.size()) throw std::invalid_argument("l out of range");
    auto mult = distinct_multiplicities(d);
    auto assignment = kmeans_1d(d.values, l, seed, restarts, weighted ? &mult : nullptr);
    std::vector<double> levels(d.values.size());
    for (std::size_t i = 0; i < levels.size(); ++i)
        levels[i] = assignment.centers[assignment.labels[i]];
    auto out = detail::finish(d, levels, "kmeans", clamp);
    out.params["l"] = static_cast<double>(l);
    out.params["seed"] = static_cast<double>(seed);
    out.params["restarts"] = static_cast<double>(restarts);
    out.params["weighted"] = weighted ? 1.0 : 0.0;
    out.params["inertia"] = assignment.inertia;
    return out;
}

// Uniform baseline: l evenly spaced levels over [min, max], nearest level
// wins, ties to the lower level.
inline QuantizedVector quantize_uniform(const std::vector<double>& w, std::size_t l,
                                        const ClampRange& clamp = {}) {
    if (l < 2) throw std::invalid_argument("l out of range");
    auto d = extract_distinct(w);
    const double lo = d.values.front(), hi = d.values.back();
    std::vector<double> levels(d.values.size());
    if (lo == hi) {
        levels = d.values;
    } else {
        const double step = (hi - lo) / static_cast<double>(l - 1);
        for (std::size_t i = 0; i < d.values.size(); ++i) {
            double t = (d.values[i] - lo) / step;
            double idx = std::ceil(t - 0.5);  // round half down: tie -> lower level
            idx = std::max(0.0, std::min(idx, static_cast<double>(l - 1)));
            levels[i] = lo + idx * step;
        }
    }
    auto out = detail::finish(d, levels, "uniform", clamp);
    out.params["l"] = static_cast<double>(l);
    return out;
}

// Parameter record for the dispatching surfaces (CLI, bench harness).
struct QuantizeRequest {
    Method method = Method::Kmeans;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::optional<std::size_t> target_l;
    ClampRange clamp;
    std::uint64_t seed = 0;
    int restarts = 10;
    SolverConfig solver;
    int max_rounds = 200;
    double lambda0 = 0.0;  // 0 = derive from data
    double dlambda = 0.0;  // 0 = equal to lambda0
    bool weighted = false;

    std::size_t require_l() const {
        if (!target_l) throw std::invalid_argument("method requires --l");
        return *target_l;
    }
};

inline QuantizedVector quantize(const std::vector<double>& w, const QuantizeRequest& req) {
    switch (req.method) {
        case Method::L1:
            return quantize_l1(w, req.lambda1, false, req.clamp, req.solver);
        case Method::L1Refit:
            return quantize_l1(w, req.lambda1, true, req.clamp, req.solver);
        case Method::L1L2:
            return quantize_l1_l2(w, req.lambda1, req.lambda2, true, req.clamp, req.solver);
        case Method::L1Iterative:
            return quantize_l1_iterative(w, req.require_l(), req.lambda0, req.dlambda,
                                         req.max_rounds, req.clamp, req.solver);
        case Method::L0:
            return quantize_l0(w, req.require_l(), req.clamp);
        case Method::ClusterLs:
            return quantize_cluster_ls(w, req.require_l(), req.seed, req.restarts, req.clamp,
                                       req.weighted);
        case Method::Kmeans:
            return quantize_kmeans(w, req.require_l(), req.seed, req.restarts, req.clamp,
                                   req.weighted);
        case Method::Uniform:
            return quantize_uniform(w, req.require_l(), req.clamp);
    }
    throw std::logic_error("unreachable");
}

}  // namespace vq
