#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vq/bench.hpp"
#include "vq/io.hpp"
#include "vq/quantizers.hpp"

namespace vq {

namespace detail {

inline std::pair<double, double> parse_range(const std::string& s, const char* what) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError(std::string(what) + " expects lo,hi");
    try {
        double lo = std::stod(s.substr(0, comma));
        double hi = std::stod(s.substr(comma + 1));
        if (!(lo < hi)) throw CLI::ValidationError(std::string(what) + ": lo must be < hi");
        return {lo, hi};
    } catch (const CLI::ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw CLI::ValidationError(std::string(what) + " expects lo,hi");
    }
}

inline std::vector<MogComponent> parse_components(const std::string& s) {
    std::vector<MogComponent> comps;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        std::string tok = s.substr(start, comma == std::string::npos ? std::string::npos
                                                                     : comma - start);
        auto c1 = tok.find(':');
        auto c2 = tok.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw CLI::ValidationError("--components expects weight:mean:stddev[,...]");
        try {
            comps.push_back({std::stod(tok.substr(0, c1)),
                             std::stod(tok.substr(c1 + 1, c2 - c1 - 1)),
                             std::stod(tok.substr(c2 + 1))});
        } catch (const std::exception&) {
            throw CLI::ValidationError("--components expects weight:mean:stddev[,...]");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return comps;
}

inline std::uint64_t default_seed() {
    if (const char* env = std::getenv("VQ_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
        }
    }
    return 0;
}

inline void require_file(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw CLI::ValidationError("no such file: " + path);
}

inline std::string join_args(int argc, const char* const* argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

inline std::string summary_line(const QuantizedVector& q, double loss_full,
                                double wall_time_s) {
    std::string s = "method=" + q.method;
    auto emit = [&](const char* key) {
        auto it = q.params.find(key);
        if (it != q.params.end()) s += std::string(" ") + key + "=" + format_double(it->second);
    };
    emit("l");
    emit("lambda1");
    emit("lambda2");
    emit("support");
    s += " distinct=" + std::to_string(q.distinct_count);
    s += " loss_full=" + format_double(loss_full);
    s += " wall_time_s=" + format_double(wall_time_s);
    return s;
}

}  // namespace detail

// Entry point shared by the vq binary and the CLI tests.
// Exit codes: 0 success, 2 usage errors (bad flags, missing files,
// method/parameter mismatches), 1 runtime failures.
inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Vector quantization via sparse least squares over a step basis"};
    app.require_subcommand(1);

    // --- gen ----------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset as CSV");
    std::string gen_kind = "uniform", gen_range = "0,100", gen_components, gen_out;
    std::size_t gen_n = 500;
    std::uint64_t gen_seed = detail::default_seed();
    double gen_mean = 50.0, gen_stddev = 15.0;
    gen->add_option("--kind", gen_kind, "uniform | gaussian | mog")
        ->check(CLI::IsMember({"uniform", "gaussian", "mog"}));
    gen->add_option("--n", gen_n, "number of samples");
    gen->add_option("--range", gen_range, "sampling range lo,hi");
    gen->add_option("--seed", gen_seed, "PRNG seed");
    gen->add_option("--mean", gen_mean, "gaussian mean");
    gen->add_option("--stddev", gen_stddev, "gaussian stddev");
    gen->add_option("--components", gen_components, "mog components weight:mean:stddev[,...]");
    gen->add_option("-o,--out", gen_out, "output CSV path (default: stdout)");

    // --- quantize -----------------------------------------------------
    auto* qz = app.add_subcommand("quantize", "Quantize a CSV vector or matrix");
    std::string qz_in, qz_out, qz_method = "kmeans", qz_clamp;
    std::size_t qz_l = 0;
    double qz_lambda1 = 0.0, qz_lambda2 = 0.0, qz_lambda0 = 0.0, qz_dlambda = 0.0;
    std::uint64_t qz_seed = detail::default_seed();
    int qz_restarts = 10, qz_max_rounds = 200;
    bool qz_weighted = false, qz_header = false;
    qz->add_option("input", qz_in, "input CSV")->required();
    qz->add_option("-o,--out", qz_out, "output CSV path (default: stdout)");
    qz->add_option("--method", qz_method,
                   "l1 | l1_refit | l1_l2 | l1_iterative | l0 | cluster_ls | kmeans | uniform");
    qz->add_option("--l", qz_l, "target number of distinct values");
    qz->add_option("--lambda1", qz_lambda1, "L1 penalty");
    qz->add_option("--lambda2", qz_lambda2, "negative-L2 magnitude (l1_l2)");
    qz->add_option("--lambda0", qz_lambda0, "iterative schedule start (0 = auto)");
    qz->add_option("--dlambda", qz_dlambda, "iterative schedule step (0 = lambda0)");
    qz->add_option("--max-rounds", qz_max_rounds, "iterative round cap");
    qz->add_option("--seed", qz_seed, "PRNG seed");
    qz->add_option("--restarts", qz_restarts, "k-means restarts");
    qz->add_option("--clamp", qz_clamp, "clamp output to lo,hi");
    qz->add_flag("--weighted", qz_weighted, "weight distinct values by multiplicity");
    qz->add_flag("--header", qz_header, "skip one CSV header line");

    // --- image --------------------------------------------------------
    auto* im = app.add_subcommand("image", "Quantize a PGM image (clamped to [0,1])");
    std::string im_in, im_out, im_method = "cluster_ls";
    std::size_t im_l = 0;
    double im_lambda1 = 0.0;
    std::uint64_t im_seed = detail::default_seed();
    int im_restarts = 10;
    bool im_ascii = false;
    im->add_option("input", im_in, "input PGM (P2/P5)")->required();
    im->add_option("output", im_out, "output PGM")->required();
    im->add_option("--method", im_method, "quantization method");
    im->add_option("--l", im_l, "target number of distinct values");
    im->add_option("--lambda1", im_lambda1, "L1 penalty");
    im->add_option("--seed", im_seed, "PRNG seed");
    im->add_option("--restarts", im_restarts, "k-means restarts");
    im->add_flag("--ascii", im_ascii, "write P2 instead of P5");

    // --- bench --------------------------------------------------------
    auto* be = app.add_subcommand("bench", "Run a benchmark sweep");
    std::string be_data = "mog", be_path, be_range = "0,100", be_methods = "kmeans,l0",
                be_lgrid = "4,8,16", be_l1grid, be_clamp, be_out, be_csv;
    std::size_t be_n = 500;
    std::uint64_t be_seed = detail::default_seed();
    double be_lambda2 = 0.0;
    int be_restarts = 10;
    bool be_weighted = false;
    be->add_option("--data", be_data, "mog | uniform | gaussian | csv | pgm")
        ->check(CLI::IsMember({"mog", "uniform", "gaussian", "csv", "pgm"}));
    be->add_option("--path", be_path, "file path for csv/pgm data");
    be->add_option("--n", be_n, "samples for generated data");
    be->add_option("--range", be_range, "generation range lo,hi");
    be->add_option("--seed", be_seed, "master seed");
    be->add_option("--methods", be_methods, "comma list of methods");
    be->add_option("--l-grid", be_lgrid, "comma list of target sizes");
    be->add_option("--lambda1-grid", be_l1grid, "comma list of lambda1 values");
    be->add_option("--lambda2", be_lambda2, "negative-L2 magnitude for l1_l2 cells");
    be->add_option("--restarts", be_restarts, "k-means restarts");
    be->add_option("--clamp", be_clamp, "clamp outputs to lo,hi");
    be->add_flag("--weighted", be_weighted, "multiplicity-weighted mode");
    be->add_option("--out", be_out, "report path (JSON lines)")->required();
    be->add_option("--csv", be_csv, "CSV mirror path");

    // --- oracle -------------------------------------------------------
    auto* orc = app.add_subcommand("oracle", "Exact DP partition of a CSV vector");
    std::string orc_in;
    std::size_t orc_l = 1;
    bool orc_exhaustive = false;
    orc->add_option("input", orc_in, "input CSV")->required();
    orc->add_option("--l", orc_l, "number of segments")->required();
    orc->add_flag("--exhaustive", orc_exhaustive,
                  "cross-check against full enumeration (small inputs)");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (*gen) {
            DatasetSpec spec;
            spec.kind = gen_kind;
            spec.n = gen_n;
            std::tie(spec.lo, spec.hi) = detail::parse_range(gen_range, "--range");
            spec.seed = gen_seed;
            spec.mean = gen_mean;
            spec.stddev = gen_stddev;
            if (!gen_components.empty())
                spec.mog_components = detail::parse_components(gen_components);
            auto data = generate(spec);
            if (gen_out.empty()) {
                for (double v : data) std::cout << format_double(v) << "\n";
            } else {
                write_csv(gen_out, data);
            }
            return 0;
        }

        if (*qz) {
            detail::require_file(qz_in);
            QuantizeRequest req;
            req.method = method_from_name(qz_method);
            req.lambda1 = qz_lambda1;
            req.lambda2 = qz_lambda2;
            if (qz->count("--l")) req.target_l = qz_l;
            if (!qz_clamp.empty()) req.clamp = detail::parse_range(qz_clamp, "--clamp");
            req.seed = qz_seed;
            req.restarts = qz_restarts;
            req.max_rounds = qz_max_rounds;
            req.lambda0 = qz_lambda0;
            req.dlambda = qz_dlambda;
            req.weighted = qz_weighted;

            auto rows = read_csv_matrix(qz_in, qz_header);
            auto [flat, shape] = flatten_matrix(rows);
            auto t0 = std::chrono::steady_clock::now();
            QuantizedVector q = quantize(flat, req);
            auto t1 = std::chrono::steady_clock::now();
            double secs = std::chrono::duration<double>(t1 - t0).count();
            double loss = l2_loss(flat, q.data);

            if (qz_out.empty()) {
                std::cerr << detail::summary_line(q, loss, secs) << "\n";
                for (double v : q.data) std::cout << format_double(v) << "\n";
            } else {
                if (shape.cols > 1) {
                    write_csv_matrix(qz_out, restore_matrix(q.data, shape));
                } else {
                    write_csv(qz_out, q.data);
                }
                std::cout << detail::summary_line(q, loss, secs) << "\n";
            }
            return 0;
        }

        if (*im) {
            detail::require_file(im_in);
            ImageBuffer img = read_pgm(im_in);
            QuantizeRequest req;
            req.method = method_from_name(im_method);
            if (im->count("--l")) req.target_l = im_l;
            req.lambda1 = im_lambda1;
            req.seed = im_seed;
            req.restarts = im_restarts;
            req.clamp = std::make_pair(0.0, 1.0);  // pixels must stay representable

            auto t0 = std::chrono::steady_clock::now();
            QuantizedVector q = quantize(img.pixels, req);
            auto t1 = std::chrono::steady_clock::now();
            double secs = std::chrono::duration<double>(t1 - t0).count();
            double loss = l2_loss(img.pixels, q.data);

            ImageBuffer out = img;
            out.pixels = q.data;
            write_pgm(im_out, out, !im_ascii);
            std::cout << detail::summary_line(q, loss, secs) << "\n";
            return 0;
        }

        if (*be) {
            SweepSpec spec;
            spec.data.kind = be_data;
            spec.data.n = be_n;
            std::tie(spec.data.lo, spec.data.hi) = detail::parse_range(be_range, "--range");
            spec.data.seed = be_seed;
            if (be_data == "csv" || be_data == "pgm") {
                if (be_path.empty()) throw CLI::ValidationError("--path required for file data");
                detail::require_file(be_path);
                spec.data.path = be_path;
            }
            for (const auto& name : CLI::detail::split(be_methods, ','))
                spec.methods.push_back(method_from_name(name));
            for (const auto& tok : CLI::detail::split(be_lgrid, ','))
                spec.l_grid.push_back(std::stoul(tok));
            if (!be_l1grid.empty())
                for (const auto& tok : CLI::detail::split(be_l1grid, ','))
                    spec.lambda1_grid.push_back(std::stod(tok));
            spec.lambda2 = be_lambda2;
            if (!be_clamp.empty()) spec.clamp = detail::parse_range(be_clamp, "--clamp");
            spec.seed = be_seed;
            spec.restarts = be_restarts;
            spec.weighted = be_weighted;

            BenchReport report = run_bench(spec);
            report.command_line = detail::join_args(argc, argv);
            write_report(be_out, report,
                         be_csv.empty() ? std::nullopt
                                        : std::make_optional<std::filesystem::path>(be_csv));
            std::cout << "rows=" << report.rows.size() << " out=" << be_out << "\n";
            return 0;
        }

        if (*orc) {
            detail::require_file(orc_in);
            auto values = read_csv(orc_in);
            auto d = extract_distinct(values);
            if (orc_l < 1 || orc_l > d.values.size())
                throw CLI::ValidationError("--l out of range");
            auto part = solve_l0_dp(d.values, orc_l);
            nlohmann::json j;
            j["sse"] = part.sse;
            j["boundaries"] = part.boundaries;
            j["levels"] = part.levels;
            if (orc_exhaustive) {
                // Direct enumeration of all contiguous partitions.
                const std::size_t m = d.values.size();
                if (m > 24) throw CLI::ValidationError("--exhaustive needs <= 24 distinct values");
                double best = std::numeric_limits<double>::infinity();
                std::vector<std::size_t> cuts;
                std::function<void(std::size_t, std::size_t, double)> rec =
                    [&](std::size_t start, std::size_t segs_left, double acc) {
                        if (acc >= best) return;
                        if (segs_left == 1 || start + 1 >= m) {
                            double sum = 0.0, sq = 0.0;
                            for (std::size_t i = start; i < m; ++i) {
                                sum += d.values[i];
                                sq += d.values[i] * d.values[i];
                            }
                            double c = sq - sum * sum / static_cast<double>(m - start);
                            best = std::min(best, acc + c);
                            return;
                        }
                        for (std::size_t end = start + 1; end <= m - segs_left + 1; ++end) {
                            double sum = 0.0, sq = 0.0;
                            for (std::size_t i = start; i < end; ++i) {
                                sum += d.values[i];
                                sq += d.values[i] * d.values[i];
                            }
                            rec(end, segs_left - 1,
                                acc + sq - sum * sum / static_cast<double>(end - start));
                        }
                    };
                rec(0, orc_l, 0.0);
                j["exhaustive_sse"] = best;
            }
            std::cout << j.dump() << "\n";
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace vq
