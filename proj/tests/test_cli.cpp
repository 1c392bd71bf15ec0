#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vq/cli.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"vq"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return vq::cli_main(static_cast<int>(argv.size()), argv.data());
}

fs::path temp_path(const std::string& name) {
    return fs::temp_directory_path() / ("vq_cli_test_" + name);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, GenIsByteDeterministic) {
    auto p1 = temp_path("gen1.csv"), p2 = temp_path("gen2.csv");
    ASSERT_EQ(run_cli({"gen", "--kind", "uniform", "--n", "500", "--range", "0,100", "--seed",
                       "7", "-o", p1.string()}),
              0);
    ASSERT_EQ(run_cli({"gen", "--kind", "uniform", "--n", "500", "--range", "0,100", "--seed",
                       "7", "-o", p2.string()}),
              0);
    EXPECT_EQ(slurp(p1), slurp(p2));
    EXPECT_EQ(vq::read_csv(p1).size(), 500u);
    fs::remove(p1);
    fs::remove(p2);
}

TEST(Cli, QuantizeL0SingleLevelIsMeanOfDistinct) {
    auto in = temp_path("qin.csv"), out = temp_path("qout.csv");
    vq::write_csv(in, {1.0, 1.0, 2.0, 9.0});  // distinct {1,2,9}, mean 4
    ASSERT_EQ(run_cli({"quantize", "--method", "l0", "--l", "1", in.string(), "-o",
                       out.string()}),
              0);
    for (double v : vq::read_csv(out)) EXPECT_NEAR(v, 4.0, 1e-12);
    fs::remove(in);
    fs::remove(out);
}

TEST(Cli, QuantizeMatrixPreservesShape) {
    auto in = temp_path("matrix.csv"), out = temp_path("matrix_out.csv");
    vq::write_csv_matrix(in, {{1, 2, 3}, {4, 5, 6}});
    ASSERT_EQ(run_cli({"quantize", "--method", "uniform", "--l", "2", in.string(), "-o",
                       out.string()}),
              0);
    auto rows = vq::read_csv_matrix(out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].size(), 3u);
    fs::remove(in);
    fs::remove(out);
}

TEST(Cli, ImageRunProducesValidClampedPgm) {
    auto in = temp_path("img.pgm"), out = temp_path("img_out.pgm");
    vq::ImageBuffer img;
    img.width = 8;
    img.height = 8;
    img.max_val = 255;
    vq::SplitMix64 rng(5);
    img.pixels.resize(64);
    for (auto& px : img.pixels) px = static_cast<double>(rng.next_index(256)) / 255.0;
    vq::write_pgm(in, img);

    ASSERT_EQ(run_cli({"image", "--method", "cluster_ls", "--l", "4", in.string(),
                       out.string()}),
              0);
    auto q = vq::read_pgm(out);
    EXPECT_EQ(q.width, 8u);
    EXPECT_EQ(q.height, 8u);
    for (double px : q.pixels) {
        EXPECT_GE(px, 0.0);
        EXPECT_LE(px, 1.0);
    }
    EXPECT_LE(vq::count_distinct(q.pixels), 4u);
    fs::remove(in);
    fs::remove(out);
}

TEST(Cli, BenchWritesJsonlAndCsv) {
    auto out = temp_path("report.jsonl"), csv = temp_path("report.csv");
    ASSERT_EQ(run_cli({"bench", "--data", "mog", "--n", "60", "--seed", "3", "--methods",
                       "kmeans,l0,uniform", "--l-grid", "2,4", "--restarts", "2", "--out",
                       out.string(), "--csv", csv.string()}),
              0);
    auto jsonl = slurp(out);
    EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 7);  // meta + 6 rows
    EXPECT_NE(slurp(csv).find("kmeans"), std::string::npos);
    fs::remove(out);
    fs::remove(csv);
}

TEST(Cli, OracleReportsDpAndExhaustive) {
    auto in = temp_path("oracle.csv");
    vq::write_csv(in, {1.0, 2.0, 10.0, 11.0});
    testing::internal::CaptureStdout();
    ASSERT_EQ(run_cli({"oracle", in.string(), "--l", "2", "--exhaustive"}), 0);
    auto j = nlohmann::json::parse(testing::internal::GetCapturedStdout());
    EXPECT_NEAR(j["sse"].get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(j["exhaustive_sse"].get<double>(), 1.0, 1e-12);
    fs::remove(in);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run_cli({"quantize", "--method", "l0", "/nonexistent/input.csv"}), 2);
    EXPECT_EQ(run_cli({"nonsense"}), 2);
    EXPECT_EQ(run_cli({"gen", "--kind", "triangle"}), 2);

    auto in = temp_path("noflags.csv");
    vq::write_csv(in, {1.0, 2.0});
    EXPECT_EQ(run_cli({"quantize", "--method", "l0", in.string()}), 2);  // missing --l
    fs::remove(in);
}

TEST(Cli, EnvSeedIsDefaultButFlagWins) {
    auto p1 = temp_path("env1.csv"), p2 = temp_path("env2.csv"), p3 = temp_path("env3.csv");
    setenv("VQ_SEED", "1234", 1);
    ASSERT_EQ(run_cli({"gen", "--kind", "uniform", "--n", "50", "-o", p1.string()}), 0);
    unsetenv("VQ_SEED");
    ASSERT_EQ(run_cli({"gen", "--kind", "uniform", "--n", "50", "--seed", "1234", "-o",
                       p2.string()}),
              0);
    ASSERT_EQ(run_cli({"gen", "--kind", "uniform", "--n", "50", "--seed", "99", "-o",
                       p3.string()}),
              0);
    EXPECT_EQ(slurp(p1), slurp(p2));
    EXPECT_NE(slurp(p1), slurp(p3));
    fs::remove(p1);
    fs::remove(p2);
    fs::remove(p3);
}
