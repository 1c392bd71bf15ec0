#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "vq/eval.hpp"
#include "vq/io.hpp"
#include "vq/quantizers.hpp"

namespace vq {

// One sweep: a data source, a method list, and the parameter grids the
// methods draw from (size-targeted methods use l_grid, penalty-based ones
// lambda1_grid).
struct SweepSpec {
    DatasetSpec data;
    std::vector<Method> methods;
    std::vector<std::size_t> l_grid;
    std::vector<double> lambda1_grid;
    double lambda2 = 0.0;  // for l1_l2 cells
    ClampRange clamp;
    std::uint64_t seed = 0;
    int restarts = 10;
    SolverConfig solver;
    int max_rounds = 200;
    bool weighted = false;
};

inline bool method_uses_l(Method m) {
    return m == Method::L1Iterative || m == Method::L0 || m == Method::ClusterLs ||
           m == Method::Kmeans || m == Method::Uniform;
}

// Run every (method, parameter) cell on the sweep's data.  Wall time is
// measured around the quantizer call only; failures become error rows and
// the run continues.  All fields except wall_time_s are deterministic for
// a fixed spec.
inline std::string describe_dataset(const DatasetSpec& d) {
    if (d.kind == "csv" || d.kind == "pgm") return d.kind + " " + d.path;
    std::string s = d.kind + " n=" + std::to_string(d.n) + " range=[" + format_double(d.lo) +
                    "," + format_double(d.hi) + "] seed=" + std::to_string(d.seed);
    if (d.kind == "gaussian")
        s += " mean=" + format_double(d.mean) + " stddev=" + format_double(d.stddev);
    if (d.kind == "mog") {
        const auto comps = d.mog_components.empty() ? DatasetSpec::default_mog()
                                                    : d.mog_components;
        s += " components=";
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if (i) s += ';';
            s += format_double(comps[i].weight) + ":" + format_double(comps[i].mean) + ":" +
                 format_double(comps[i].stddev);
        }
        if (d.mog_components.empty()) s += " (default approximation)";
    }
    return s;
}

inline BenchReport run_bench(const SweepSpec& spec) {
    BenchReport report;
    report.seed = spec.seed;
    report.dataset = describe_dataset(spec.data);

    const std::vector<double> w = generate(spec.data);
    const auto d = extract_distinct(w);
    std::vector<double> distinct_of_w = d.values;

    std::uint64_t cell = 0;
    for (Method m : spec.methods) {
        const bool uses_l = method_uses_l(m);
        const std::size_t n_cells = uses_l ? spec.l_grid.size() : spec.lambda1_grid.size();
        for (std::size_t g = 0; g < n_cells; ++g, ++cell) {
            QuantizeRequest req;
            req.method = m;
            req.clamp = spec.clamp;
            req.restarts = spec.restarts;
            req.solver = spec.solver;
            req.max_rounds = spec.max_rounds;
            req.weighted = spec.weighted;
            req.seed = SplitMix64::derive(spec.seed, cell).next_u64();

            BenchRow row;
            row.method = method_name(m);
            row.seed = req.seed;
            if (uses_l) {
                req.target_l = spec.l_grid[g];
                row.params["l"] = static_cast<double>(spec.l_grid[g]);
            } else {
                req.lambda1 = spec.lambda1_grid[g];
                row.params["lambda1"] = req.lambda1;
                if (m == Method::L1L2) {
                    req.lambda2 = spec.lambda2;
                    row.params["lambda2"] = req.lambda2;
                }
            }

            try {
                auto t0 = std::chrono::steady_clock::now();
                QuantizedVector q = quantize(w, req);
                auto t1 = std::chrono::steady_clock::now();
                row.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
                row.loss_full = l2_loss(w, q.data);
                // Loss over distinct values: each distinct input against the
                // level it was mapped to.
                std::vector<double> levels(d.values.size());
                for (std::size_t p = 0; p < d.original_len; ++p)
                    levels[d.index_map[p]] = q.data[p];
                row.loss_distinct = l2_loss(distinct_of_w, levels);
                row.distinct_count = q.distinct_count;
                // The row-level seed field already carries the exact value;
                // the quantizer's double copy of it would only lose bits.
                for (const auto& [k, v] : q.params)
                    if (k != "seed") row.params.emplace(k, v);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

}  // namespace vq
