#include <gtest/gtest.h>

#include <algorithm>

#include <filesystem>

#include "p3net/io.hpp"

using namespace p3net;
using nlohmann::json;

TEST(Io, VertexCsvHasHeaderAndRows) {
    const auto csv = io::vertex_table_csv(enumerate_reduced(), Representation::Reduced8);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "a0,a1,c0,c1,a0c0,a0c1,a1c0,a1c1");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
    EXPECT_NE(csv.find("\n1,1,1,1,1,1,1,1\n"), std::string::npos);
}

TEST(Io, PointRoundTrip) {
    const BehaviourPoint p(Representation::Reduced8, {.5, .5, .5, .5, .5, .25, .25, .5});
    const auto q = io::parse_point(io::point_json(p));
    EXPECT_TRUE(std::ranges::equal(q.coords(), p.coords()));
    EXPECT_THROW(io::parse_point(json{{"coords", {0.5, 0.5}}}), Error);
    EXPECT_THROW(io::parse_point(json::array()), Error);
}

TEST(Io, DensityRoundTrip) {
    const auto rho = random_density_matrix(4, 8);
    const auto back = io::parse_density(io::density_json(rho));
    EXPECT_TRUE(back.matrix().isApprox(rho.matrix(), 1e-15));
    const json bad{{"dim", 2}, {"re", {{0.5, 0.0}, {0.0, 0.4}}}};
    EXPECT_THROW(io::parse_density(bad), Error);
    const json wrong{{"dim", 3}, {"re", {{0.5, 0.0}, {0.0, 0.5}}}};
    EXPECT_THROW(io::parse_density(wrong), Error);
}

TEST(Io, DistributionRoundTrip) {
    const auto h = qkd_scenario(ScenarioKind::Honest, 0.1);
    const auto fd = behaviour_from_state(h.state, h.measurements, h.shape);
    const auto j = io::distribution_json(fd);
    EXPECT_TRUE(j["distribution"].contains("1,0"));
    const auto back = io::parse_distribution(j);
    EXPECT_TRUE(std::ranges::equal(back.table(), fd.table()));
    auto missing = j;
    missing["distribution"].erase("1,1");
    EXPECT_THROW(io::parse_distribution(missing), Error);
}

TEST(Io, GraphDot) {
    const auto dot = io::graph_dot(build_visibility_graph(Representation::Full26));
    std::size_t edges = 0;
    for (std::size_t pos = 0; (pos = dot.find(" -- ", pos)) != std::string::npos; ++pos) ++edges;
    EXPECT_EQ(edges, 864u);
    EXPECT_EQ(dot.rfind("graph visibility_full {", 0), 0u);
}

TEST(Io, CsvRows) {
    const auto rows = io::parse_csv_rows("# header\n0.1,0.2\n\n0.3,0.4\r\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_DOUBLE_EQ(rows[1][1], 0.4);
    EXPECT_THROW(io::parse_csv_rows("0.1,0.2\n0.3\n"), Error);
    EXPECT_THROW(io::parse_csv_rows("0.1,abc\n"), Error);
}

TEST(Io, WriteOutputLeavesNoPartialFile) {
    const auto dir = std::filesystem::temp_directory_path() / "p3net_io_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "out.txt").string();
    std::ostringstream sink;
    io::write_output(path, "hello", sink);
    EXPECT_EQ(io::read_file(path), "hello");
    EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
    const auto bad = (dir / "missing" / "out.txt").string();
    EXPECT_THROW(io::write_output(bad, "x", sink), Error);
    EXPECT_FALSE(std::filesystem::exists(bad));
    io::write_output("-", "stdout", sink);
    EXPECT_EQ(sink.str(), "stdout");
    std::filesystem::remove_all(dir);
}
