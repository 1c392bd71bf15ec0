#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "vq/rng.hpp"

namespace vq {

struct ClusterAssignment {
    std::vector<std::size_t> labels;  // cluster id per value
    std::vector<double> centers;      // ascending after relabeling
    std::size_t k = 0;
    double inertia = 0.0;  // within-cluster (weighted) SSE
    std::uint64_t seed = 0;
    int restarts_used = 0;
};

namespace detail {

struct LloydResult {
    std::vector<std::size_t> labels;
    std::vector<double> centers;
    double inertia = 0.0;
    std::vector<double> inertia_path;  // after each Lloyd iteration
};

// One k-means++ seeded Lloyd run.  Ties go to the lower-indexed center;
// an empty cluster is repaired by promoting the point farthest from its
// current center to a singleton center.
inline LloydResult lloyd_once(const std::vector<double>& x, std::size_t k,
                              const std::vector<double>& w, SplitMix64 rng) {
    const std::size_t n = x.size();
    LloydResult res;
    res.centers.reserve(k);

    // k-means++ seeding: first center weight-proportional, the rest
    // proportional to weight * squared distance to the nearest center.
    // d2 is maintained incrementally against the newest center only.
    std::vector<double> d2(n);
    {
        double total = std::accumulate(w.begin(), w.end(), 0.0);
        double u = rng.next_double() * total;
        std::size_t first = 0;
        for (std::size_t i = 0; i < n; ++i) {
            u -= w[i];
            if (u <= 0.0) {
                first = i;
                break;
            }
            if (i + 1 == n) first = i;
        }
        res.centers.push_back(x[first]);
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = w[i] * (x[i] - x[first]) * (x[i] - x[first]);
    }
    while (res.centers.size() < k) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t chosen = n;
        if (total > 0.0) {
            double u = rng.next_double() * total;
            for (std::size_t i = 0; i < n; ++i) {
                u -= d2[i];
                if (u <= 0.0 && d2[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        if (chosen == n) {
            // All mass at existing centers: take the lowest point still
            // carrying any distance, else the lowest index.
            for (std::size_t i = 0; i < n && chosen == n; ++i)
                if (d2[i] > 0.0) chosen = i;
            if (chosen == n) chosen = 0;
        }
        res.centers.push_back(x[chosen]);
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], w[i] * (x[i] - x[chosen]) * (x[i] - x[chosen]));
    }

    res.labels.assign(n, 0);
    std::vector<double> csum(k), cw(k);
    const int max_iters = 500;
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bestd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                double d = std::abs(x[i] - res.centers[c]);
                if (d < bestd) {
                    bestd = d;
                    best = c;
                }
            }
            if (res.labels[i] != best) {
                res.labels[i] = best;
                changed = true;
            }
        }

        std::fill(csum.begin(), csum.end(), 0.0);
        std::fill(cw.begin(), cw.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            csum[res.labels[i]] += w[i] * x[i];
            cw[res.labels[i]] += w[i];
        }
        bool repaired = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (cw[c] > 0.0) {
                res.centers[c] = csum[c] / cw[c];
                continue;
            }
            // Empty cluster: steal the farthest point.
            std::size_t far = 0;
            double fard = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d = std::abs(x[i] - res.centers[res.labels[i]]);
                if (d > fard) {
                    fard = d;
                    far = i;
                }
            }
            res.centers[c] = x[far];
            repaired = true;
        }
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = x[i] - res.centers[res.labels[i]];
            inertia += w[i] * e * e;
        }
        res.inertia_path.push_back(inertia);
        if (!changed && !repaired && iter > 0) break;
    }

    res.inertia = res.inertia_path.back();
    return res;
}

// Relabel clusters in ascending-center order.
inline void relabel_ascending(LloydResult& r) {
    const std::size_t k = r.centers.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return r.centers[a] < r.centers[b]; });
    std::vector<std::size_t> rank(k);
    for (std::size_t i = 0; i < k; ++i) rank[order[i]] = i;
    std::vector<double> sorted(k);
    for (std::size_t i = 0; i < k; ++i) sorted[i] = r.centers[order[i]];
    r.centers = std::move(sorted);
    for (auto& lab : r.labels) lab = rank[lab];
}

}  // namespace detail

// Lloyd with k-means++ seeding; best of `restarts` runs by inertia, ties
// broken by restart index.  Optional positive weights give each value a
// multiplicity.  Deterministic for fixed (values, k, seed, restarts).
// inertia_path, when given, receives the winning restart's per-iteration
// inertia sequence.
inline ClusterAssignment kmeans_1d(const std::vector<double>& values, std::size_t k,
                                   std::uint64_t seed, int restarts,
                                   const std::vector<double>* weights = nullptr,
                                   std::vector<double>* inertia_path = nullptr) {
    if (k < 1 || k > values.size()) throw std::invalid_argument("k out of range");
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    std::vector<double> w;
    if (weights) {
        if (weights->size() != values.size()) throw std::invalid_argument("length mismatch");
        for (double wi : *weights)
            if (!(wi > 0)) throw std::invalid_argument("weights must be positive");
        w = *weights;
    } else {
        w.assign(values.size(), 1.0);
    }

    detail::LloydResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        auto run = detail::lloyd_once(values, k, w, SplitMix64::derive(seed, static_cast<std::uint64_t>(r)));
        if (run.inertia < best.inertia) best = std::move(run);
    }
    detail::relabel_ascending(best);
    if (inertia_path) *inertia_path = best.inertia_path;

    ClusterAssignment out;
    out.labels = std::move(best.labels);
    out.centers = std::move(best.centers);
    out.k = k;
    out.inertia = best.inertia;
    out.seed = seed;
    out.restarts_used = restarts;
    return out;
}

// Segment boundaries of a converged assignment on sorted input, ordered by
// ascending center.  This is the implicit one-hot assignment matrix: row i
// selects the segment that sorted value i belongs to.
inline std::vector<std::size_t> assignment_segments(const ClusterAssignment& a,
                                                    const std::vector<double>& sorted_values) {
    if (a.labels.size() != sorted_values.size())
        throw std::invalid_argument("length mismatch");

    std::vector<std::size_t> order(a.k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return a.centers[x] < a.centers[y];
    });
    std::vector<std::size_t> rank(a.k);
    for (std::size_t i = 0; i < a.k; ++i) rank[order[i]] = i;

    std::vector<std::size_t> boundaries{0};
    std::size_t prev = rank[a.labels[0]];
    if (prev != 0) throw std::invalid_argument("non-contiguous assignment");
    for (std::size_t i = 1; i < a.labels.size(); ++i) {
        std::size_t cur = rank[a.labels[i]];
        if (cur == prev) continue;
        if (cur != prev + 1) throw std::invalid_argument("non-contiguous assignment");
        boundaries.push_back(i);
        prev = cur;
    }
    if (prev + 1 != a.k) throw std::invalid_argument("non-contiguous assignment");
    boundaries.push_back(a.labels.size());
    return boundaries;
}

}  // namespace vq
