#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vq/core.hpp"
#include "vq/eval.hpp"
#include "vq/rng.hpp"

namespace vq {

// All writers go through a temp-file-then-rename so an interrupted run
// never leaves a torn output behind.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// CSV

// Values separated by commas and/or newlines; round-trips doubles exactly
// via 17-significant-digit formatting.
inline std::vector<std::vector<double>> read_csv_rows(const std::string& text,
                                                      bool skip_header = false) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skip_header && lineno == 1) continue;
        // Blank lines are allowed and ignored.
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;

        std::vector<double> row;
        std::size_t col = 0, start = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            std::string tok = line.substr(start, comma == std::string::npos
                                                     ? std::string::npos
                                                     : comma - start);
            ++col;
            std::size_t pos = 0;
            double v = 0.0;
            bool ok = false;
            try {
                v = std::stod(tok, &pos);
                while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos])))
                    ++pos;
                ok = pos == tok.size() && !tok.empty();
            } catch (const std::exception&) {
                ok = false;
            }
            if (!ok)
                throw std::runtime_error("csv parse error at line " + std::to_string(lineno) +
                                         " column " + std::to_string(col) + ": '" + tok + "'");
            row.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<std::vector<double>> read_csv_matrix(const std::filesystem::path& path,
                                                        bool skip_header = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    auto rows = read_csv_rows(ss.str(), skip_header);
    for (const auto& r : rows)
        if (r.size() != rows[0].size())
            throw std::runtime_error("csv parse error: ragged rows in " + path.string());
    return rows;
}

inline std::vector<double> read_csv(const std::filesystem::path& path,
                                    bool skip_header = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    std::vector<double> flat;
    for (auto& row : read_csv_rows(ss.str(), skip_header))
        flat.insert(flat.end(), row.begin(), row.end());
    return flat;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        out += format_double(v);
        out += '\n';
    }
    atomic_write(path, out);
}

inline void write_csv_matrix(const std::filesystem::path& path,
                             const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += format_double(row[j]);
        }
        out += '\n';
    }
    atomic_write(path, out);
}

// ---------------------------------------------------------------------------
// PGM (Netpbm P2/P5 grayscale)

struct ImageBuffer {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> pixels;  // row-major, in [0, 1]
    int max_val = 255;
};

namespace detail {

// Reads the next header token, skipping whitespace and '#' comments.
inline std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw std::runtime_error("malformed header");
    return tok;
}

inline long pgm_int(std::istream& in) {
    std::string tok = pgm_token(in);
    try {
        std::size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::runtime_error("");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("malformed header");
    }
}

}  // namespace detail

inline ImageBuffer read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());

    std::string magic = detail::pgm_token(in);
    if (magic == "P3" || magic == "P6") throw std::runtime_error("grayscale only");
    if (magic != "P2" && magic != "P5") throw std::runtime_error("malformed header");

    ImageBuffer img;
    long w = detail::pgm_int(in), h = detail::pgm_int(in), maxv = detail::pgm_int(in);
    if (w <= 0 || h <= 0 || maxv < 1 || maxv > 65535)
        throw std::runtime_error("malformed header");
    img.width = static_cast<std::size_t>(w);
    img.height = static_cast<std::size_t>(h);
    img.max_val = static_cast<int>(maxv);
    const std::size_t n = img.width * img.height;
    img.pixels.resize(n);

    if (magic == "P2") {
        for (std::size_t i = 0; i < n; ++i) {
            long v;
            try {
                v = detail::pgm_int(in);
            } catch (const std::exception&) {
                throw std::runtime_error("truncated payload");
            }
            if (v < 0 || v > maxv) throw std::runtime_error("sample out of range");
            img.pixels[i] = static_cast<double>(v) / static_cast<double>(maxv);
        }
    } else {
        const int bytes = maxv > 255 ? 2 : 1;
        std::vector<unsigned char> raw(n * static_cast<std::size_t>(bytes));
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            throw std::runtime_error("truncated payload");
        for (std::size_t i = 0; i < n; ++i) {
            long v = bytes == 1 ? raw[i]
                                : (static_cast<long>(raw[2 * i]) << 8) | raw[2 * i + 1];
            if (v > maxv) throw std::runtime_error("sample out of range");
            img.pixels[i] = static_cast<double>(v) / static_cast<double>(maxv);
        }
    }
    return img;
}

// Write samples by rounding half-up to the stored bit depth; pixels on the
// 1/max_val grid round-trip exactly.
inline void write_pgm(const std::filesystem::path& path, const ImageBuffer& img,
                      bool binary = true) {
    if (img.pixels.size() != img.width * img.height)
        throw std::invalid_argument("length mismatch");
    if (img.max_val < 1 || img.max_val > 65535)
        throw std::invalid_argument("invalid max_val");

    std::string out = binary ? "P5\n" : "P2\n";
    out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n";
    out += std::to_string(img.max_val) + "\n";

    auto level = [&](double p) {
        double v = std::floor(p * img.max_val + 0.5);
        return static_cast<long>(std::max(0.0, std::min(v, static_cast<double>(img.max_val))));
    };
    if (binary) {
        const int bytes = img.max_val > 255 ? 2 : 1;
        for (double p : img.pixels) {
            long v = level(p);
            if (bytes == 2) out.push_back(static_cast<char>((v >> 8) & 0xFF));
            out.push_back(static_cast<char>(v & 0xFF));
        }
    } else {
        std::size_t per_line = 0;
        for (double p : img.pixels) {
            out += std::to_string(level(p));
            if (++per_line == 16) {
                out += '\n';
                per_line = 0;
            } else {
                out += ' ';
            }
        }
        if (per_line) out += '\n';
    }
    atomic_write(path, out);
}

// ---------------------------------------------------------------------------
// Synthetic data

struct MogComponent {
    double weight = 1.0;
    double mean = 0.0;
    double stddev = 1.0;
};

struct DatasetSpec {
    std::string kind;  // mog | uniform | gaussian | csv | pgm
    std::size_t n = 0;
    double lo = 0.0, hi = 1.0;
    std::uint64_t seed = 0;
    std::string path;
    std::vector<MogComponent> mog_components;
    double mean = 0.0, stddev = 1.0;  // gaussian kind

    // Component shape that roughly matches a three-mode mixture over
    // [0, 100]; callers are expected to override for other ranges.
    static std::vector<MogComponent> default_mog() {
        return {{1.0 / 3.0, 20.0, 8.0}, {1.0 / 3.0, 50.0, 8.0}, {1.0 / 3.0, 80.0, 8.0}};
    }
};

// Draw n samples from the requested distribution, constrained to [lo, hi]
// by rejection (clipping would pile mass onto the endpoints).
inline std::vector<double> generate(const DatasetSpec& spec) {
    if (spec.kind == "csv") return read_csv(spec.path);
    if (spec.kind == "pgm") return read_pgm(spec.path).pixels;

    if (spec.n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(spec.lo < spec.hi)) throw std::invalid_argument("invalid range: lo >= hi");

    std::vector<MogComponent> comps;
    if (spec.kind == "uniform") {
        // handled inline below
    } else if (spec.kind == "gaussian") {
        comps = {{1.0, spec.mean, spec.stddev}};
    } else if (spec.kind == "mog") {
        comps = spec.mog_components.empty() ? DatasetSpec::default_mog() : spec.mog_components;
        double total = 0.0;
        for (const auto& c : comps) {
            if (!(c.weight > 0)) throw std::invalid_argument("mog weights must be positive");
            total += c.weight;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("mog weights must sum to 1");
    } else {
        throw std::invalid_argument("unknown dataset kind: " + spec.kind);
    }

    SplitMix64 rng(spec.seed);
    std::vector<double> out;
    out.reserve(spec.n);
    const std::size_t max_draws = 1000 * spec.n;
    std::size_t draws = 0;
    while (out.size() < spec.n) {
        double x;
        if (spec.kind == "uniform") {
            x = rng.uniform(spec.lo, spec.hi);
        } else {
            double u = rng.next_double();
            std::size_t c = 0;
            for (; c + 1 < comps.size(); ++c) {
                u -= comps[c].weight;
                if (u <= 0.0) break;
            }
            x = comps[c].stddev == 0.0 ? comps[c].mean
                                       : rng.gaussian(comps[c].mean, comps[c].stddev);
        }
        if (++draws > max_draws)
            throw std::runtime_error("distribution incompatible with range");
        if (x < spec.lo || x > spec.hi) continue;
        out.push_back(x);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bench report serialization: JSON lines (metadata object first, then one
// object per row) plus a CSV mirror.

inline nlohmann::json row_to_json(const BenchRow& row) {
    nlohmann::json j;
    j["method"] = row.method;
    j["params"] = row.params;
    j["loss_full"] = row.loss_full;
    j["loss_distinct"] = row.loss_distinct;
    j["distinct_count"] = row.distinct_count;
    j["wall_time_s"] = row.wall_time_s;
    j["seed"] = row.seed;
    if (!row.error.empty()) j["error"] = row.error;
    return j;
}

inline std::string report_to_jsonl(const BenchReport& report) {
    nlohmann::json meta;
    meta["schema_version"] = report.schema_version;
    meta["seed"] = report.seed;
    meta["command_line"] = report.command_line;
    meta["dataset"] = report.dataset;
    std::string out = meta.dump() + "\n";
    for (const auto& row : report.rows) out += row_to_json(row).dump() + "\n";
    return out;
}

inline std::string report_to_csv(const BenchReport& report) {
    std::string out =
        "method,l,lambda1,lambda2,loss_full,loss_distinct,distinct_count,wall_time_s,seed,"
        "error\n";
    auto param = [](const BenchRow& r, const char* key) {
        auto it = r.params.find(key);
        return it == r.params.end() ? std::string() : format_double(it->second);
    };
    for (const auto& row : report.rows) {
        out += row.method + "," + param(row, "l") + "," + param(row, "lambda1") + "," +
               param(row, "lambda2") + "," + format_double(row.loss_full) + "," +
               format_double(row.loss_distinct) + "," + std::to_string(row.distinct_count) +
               "," + format_double(row.wall_time_s) + "," + std::to_string(row.seed) + "," +
               row.error + "\n";
    }
    return out;
}

inline void write_report(const std::filesystem::path& jsonl_path, const BenchReport& report,
                         const std::optional<std::filesystem::path>& csv_path = {}) {
    atomic_write(jsonl_path, report_to_jsonl(report));
    if (csv_path) atomic_write(*csv_path, report_to_csv(report));
}

}  // namespace vq
