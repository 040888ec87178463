#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "p3net/cli.hpp"

using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "p3net");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = p3net::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("p3net_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& content) const {
        std::ofstream(path(name)) << content;
        return path(name);
    }

    std::string point(const std::string& name, std::vector<double> c) const {
        return write(name, json{{"representation", "reduced-8"}, {"coords", c}}.dump());
    }

    std::filesystem::path dir_;
};

const std::vector<double> kPb{.5, .5, .5, .5, .5, .25, .25, .5};
const std::vector<double> kPu{.5, .5, .5, .5, .25, .25, .25, .25};

} // namespace

TEST_F(Cli, VerticesCsv) {
    const auto r = run({"vertices", "--rep", "full", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 65);
    const auto first = r.out.substr(0, r.out.find('\n'));
    EXPECT_EQ(std::count(first.begin(), first.end(), ','), 25);
    const auto red = run({"vertices", "--rep", "reduced", "--format", "csv"});
    EXPECT_EQ(std::count(red.out.begin(), red.out.end(), '\n'), 17);
}

TEST_F(Cli, VerticesJson) {
    const auto j = json::parse(run({"vertices", "--rep", "full"}).out);
    ASSERT_EQ(j["vertices"].size(), 64u);
    EXPECT_EQ(j["vertices"][0].size(), 26u);
    EXPECT_EQ(j["representation"], "full-26");
}

TEST_F(Cli, GraphAndLayout) {
    const auto dot = run({"graph", "--rep", "full", "--format", "dot"});
    ASSERT_EQ(dot.code, 0);
    const auto j = json::parse(run({"graph", "--rep", "full"}).out);
    EXPECT_EQ(j["edge_count"], 864);
    const auto a = run({"graph", "--rep", "reduced", "--layout", "svd", "--format", "csv"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 17);
    EXPECT_EQ(a.out, run({"graph", "--rep", "reduced", "--layout", "svd", "--format", "csv"}).out);
    const auto lj = json::parse(run({"graph", "--rep", "full", "--layout", "svd"}).out);
    EXPECT_EQ(lj["layout"].size(), 64u);
    EXPECT_EQ(run({"graph", "--layout", "tsne"}).code, 1);
}

TEST_F(Cli, Analyze) {
    const auto r = run({"analyze", "--rep", "full"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["apsp_max"], 2);
    EXPECT_EQ(j["min_generators"], 4);
    EXPECT_EQ(j["generators"]["members"].size(), 4u);
    EXPECT_EQ(j["dominating_sets_of_size_3"], 0);
    EXPECT_EQ(j["constructions"]["diagonal"]["newly_covered"], json({28, 20, 12, 4}));
    EXPECT_EQ(j["clusters"]["count"], 8);
    for (const auto& c : j["classification"]) {
        EXPECT_EQ(c["coincident"], 1);
        EXPECT_EQ(c["visible"], 27);
        EXPECT_EQ(c["hidden"], 36);
    }
}

TEST_F(Cli, SimulateExactAndSampled) {
    auto j = json::parse(run({"simulate", "--kind", "honest", "--noise", "0", "--shots", "0"}).out);
    EXPECT_EQ(j["exact"]["coords"].get<std::vector<double>>().size(), 8u);
    EXPECT_TRUE(j["no_signalling"].get<bool>());
    const auto pb = j["exact"]["coords"].get<std::vector<double>>();
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(pb[k], kPb[k], 1e-12);
    j = json::parse(run({"simulate", "--kind", "intercepted", "--select", "exact"}).out);
    const auto pu = j["coords"].get<std::vector<double>>();
    for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(pu[k], kPu[k], 1e-12);

    const auto s = run({"simulate", "--kind", "honest", "--shots", "100000", "--seed", "7"});
    ASSERT_EQ(s.code, 0);
    j = json::parse(s.out);
    const auto sampled = j["sampled"]["point"]["coords"].get<std::vector<double>>();
    const auto se = j["sampled"]["standard_errors"].get<std::vector<double>>();
    for (std::size_t k = 0; k < 8; ++k) EXPECT_LE(std::abs(sampled[k] - kPb[k]), 5 * se[k]);
    EXPECT_EQ(s.out, run({"simulate", "--kind", "honest", "--shots", "100000", "--seed", "7"}).out);
}

TEST_F(Cli, SimulateErrors) {
    EXPECT_EQ(run({"simulate", "--noise", "1.5"}).code, 1);
    EXPECT_EQ(run({"simulate", "--shots", "-3"}).code, 1);
    EXPECT_EQ(run({"simulate", "--kind", "eve"}).code, 1);
    EXPECT_EQ(run({"simulate", "--select", "sampled"}).code, 1);
}

TEST_F(Cli, Project) {
    const auto r = run({"project", "--input", point("pb.json", kPb)});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["squared_distance"].get<double>(), 0.09183619557541524, 1e-8);
    EXPECT_TRUE(j["converged"].get<bool>());
    EXPECT_FALSE(j["on_manifold"].get<bool>());
}

TEST_F(Cli, TestPointMode) {
    const auto pb = point("pb.json", kPb);
    const auto pu = point("pu.json", kPu);
    auto j = json::parse(run({"test", "--expected", pb, "--observed", pu}).out);
    EXPECT_TRUE(j["report"]["reject"].get<bool>());
    j = json::parse(run({"test", "--expected", pb, "--observed", pb}).out);
    EXPECT_EQ(j["report"]["z"], 0.0);
    EXPECT_FALSE(j["report"]["reject"].get<bool>());
    const auto noisy = run({"test", "--expected", pb, "--observed", pb, "--perturb-observed", "0.05", "--seed", "3"});
    ASSERT_EQ(noisy.code, 0) << noisy.err;
    EXPECT_FALSE(json::parse(noisy.out)["report"]["reject"].get<bool>());
    const auto unseeded = run({"test", "--expected", pb, "--observed", pb, "--perturb-observed", "0.05"});
    EXPECT_EQ(unseeded.code, 1);
    EXPECT_NE(unseeded.err.find("seed"), std::string::npos);
    const auto full = write("full.json", json{{"coords", std::vector<double>(26, 0.0)}}.dump());
    EXPECT_EQ(run({"test", "--expected", pb, "--observed", full}).code, 1);
}

TEST_F(Cli, TestSampleMode) {
    std::string a, b;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        a += std::to_string(n(rng)) + "\n";
        b += std::to_string(n(rng) + 2.0) + "\n";
    }
    const auto r = run({"test", "--mode", "sample", "--expected", write("a.csv", a), "--observed", write("b.csv", b)});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_LT(j["scalar"]["t"]["p_value"].get<double>(), 1e-6);
    EXPECT_LT(j["scalar"]["ks"]["p_value"].get<double>(), 1e-6);
}

TEST_F(Cli, Bound) {
    auto bell = p3net::io::density_json(p3net::bell_phi_plus()).dump();
    auto mixed = p3net::io::density_json(p3net::DensityMatrix::maximally_mixed(4)).dump();
    const auto r = run({"bound", "--rho", write("bell.json", bell), "--sigma", write("mixed.json", mixed)});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["bound"]["l1"].get<double>(), 0.5, 1e-12);
    EXPECT_NEAR(j["bound"]["rhs"].get<double>(), 1.5, 1e-12);
    EXPECT_TRUE(j["holds"].get<bool>());

    const json bad{{"dim", 4}, {"re", {{0.3, 0, 0, 0}, {0, 0.2, 0, 0}, {0, 0, 0.2, 0}, {0, 0, 0, 0.2}}}};
    const auto e = run({"bound", "--rho", write("bad.json", bad.dump()), "--sigma", path("mixed.json")});
    EXPECT_EQ(e.code, 1);
    EXPECT_NE(e.err.find("trace ≠ 1"), std::string::npos);
    EXPECT_EQ(json::parse(e.err)["command"], "bound");
}

TEST_F(Cli, OutputFileAndFailures) {
    const auto out = path("v.csv");
    ASSERT_EQ(run({"vertices", "--rep", "reduced", "--format", "csv", "--output", out}).code, 0);
    EXPECT_TRUE(std::filesystem::exists(out));
    const auto bad = path("nowhere/v.csv");
    EXPECT_EQ(run({"vertices", "--output", bad}).code, 1);
    EXPECT_FALSE(std::filesystem::exists(bad));
    const auto failed = path("failed.json");
    EXPECT_EQ(run({"simulate", "--noise", "2", "--output", failed}).code, 1);
    EXPECT_FALSE(std::filesystem::exists(failed));
}

TEST_F(Cli, ParseErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"vertices", "--bogus"}).code, 2);
    EXPECT_EQ(run({"vertices", "--rep", "sideways"}).code, 1);
    EXPECT_EQ(run({"vertices", "--format", "dot"}).code, 1);
}
