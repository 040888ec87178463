#pragma once

// JSON, CSV and DOT encodings of the library's data types, plus file helpers.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "p3net/error.hpp"
#include "p3net/geometry.hpp"
#include "p3net/manifold.hpp"
#include "p3net/quantum.hpp"
#include "p3net/stats.hpp"
#include "p3net/strategy.hpp"

namespace p3net::io {

using nlohmann::json;

inline json shape_json(const ScenarioShape& s) { return json::array({s.n, s.m, s.d}); }

inline ScenarioShape parse_shape(const json& j) {
    if (!j.is_array() || j.size() != 3) throw Error("shape must be an array [n, m, d]");
    ScenarioShape s{j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
    s.validate();
    return s;
}

// ---- vertex tables ---------------------------------------------------------

template <typename Vertex>
std::string vertex_table_csv(const std::vector<Vertex>& vertices, Representation rep) {
    std::ostringstream os;
    const auto names = column_names(rep);
    for (std::size_t k = 0; k < names.size(); ++k) os << (k ? "," : "") << names[k];
    os << '\n';
    for (const auto& v : vertices) {
        for (std::size_t k = 0; k < v.bits().size(); ++k) os << (k ? "," : "") << int(v.bits()[k]);
        os << '\n';
    }
    return os.str();
}

template <typename Vertex>
json vertex_table_json(const std::vector<Vertex>& vertices, Representation rep) {
    json rows = json::array();
    for (const auto& v : vertices) {
        json row = json::array();
        for (auto b : v.bits()) row.push_back(int(b));
        rows.push_back(std::move(row));
    }
    return {{"shape", shape_json(shape_of(rep))}, {"representation", to_string(rep)}, {"vertices", rows}};
}

// ---- behaviour points -------------------------------------------------------

inline json point_json(const BehaviourPoint& p) {
    return {{"representation", to_string(p.representation())},
            {"shape", shape_json(p.shape())},
            {"coords", std::vector<double>(p.coords().begin(), p.coords().end())}};
}

inline BehaviourPoint parse_point(const json& j) {
    if (!j.is_object() || !j.contains("coords")) throw Error("behaviour point JSON needs a 'coords' array");
    const auto coords = j.at("coords").get<std::vector<double>>();
    Representation rep = coords.size() == kFullDim ? Representation::Full26 : Representation::Reduced8;
    if (j.contains("representation")) rep = parse_representation(j.at("representation").get<std::string>());
    return BehaviourPoint(rep, coords);
}

// ---- density matrices -------------------------------------------------------

inline json density_json(const DensityMatrix& rho) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < rho.dim(); ++i) {
        json rr = json::array(), ii = json::array();
        for (int k = 0; k < rho.dim(); ++k) {
            rr.push_back(rho.matrix()(i, k).real());
            ii.push_back(rho.matrix()(i, k).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    return {{"dim", rho.dim()}, {"re", re}, {"im", im}};
}

/// Parses and validates {"dim": d, "re": [[...]], "im": [[...]]}; "im" may be omitted.
inline DensityMatrix parse_density(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("re")) {
        throw Error("density matrix JSON needs 'dim' and 're'");
    }
    const int dim = j.at("dim").get<int>();
    if (dim < 1) throw Error("density matrix dim must be positive");
    const auto re = j.at("re").get<std::vector<std::vector<double>>>();
    std::vector<std::vector<double>> im(dim, std::vector<double>(dim, 0.0));
    if (j.contains("im")) im = j.at("im").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(re.size()) != dim || static_cast<int>(im.size()) != dim) {
        throw Error("density matrix rows do not match dim");
    }
    ComplexMatrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        if (static_cast<int>(re[r].size()) != dim || static_cast<int>(im[r].size()) != dim) {
            throw Error("density matrix columns do not match dim");
        }
        for (int c = 0; c < dim; ++c) m(r, c) = Complex(re[r][c], im[r][c]);
    }
    return DensityMatrix(m);
}

// ---- distributions ----------------------------------------------------------

inline std::string tuple_key(const std::vector<int>& digits) {
    std::string key;
    for (std::size_t i = 0; i < digits.size(); ++i) key += (i ? "," : "") + std::to_string(digits[i]);
    return key;
}

/// {"shape": [n,m,d], "distribution": {"s1,...,sn": [p(outcome 0..d^n-1)]}}.
inline json distribution_json(const FullDistribution& fd) {
    json table = json::object();
    const auto& s = fd.shape();
    for (int x = 0; x < fd.setting_count(); ++x) {
        std::vector<double> row(fd.outcome_count());
        for (int a = 0; a < fd.outcome_count(); ++a) row[a] = fd.at(a, x);
        table[tuple_key(detail::decode_tuple(x, s.m, s.n))] = row;
    }
    return {{"shape", shape_json(s)}, {"distribution", table}};
}

inline FullDistribution parse_distribution(const json& j) {
    const ScenarioShape s = parse_shape(j.at("shape"));
    const int nx = detail::ipow(s.m, s.n);
    const int na = detail::ipow(s.d, s.n);
    std::vector<double> probs(static_cast<std::size_t>(nx) * na);
    const auto& table = j.at("distribution");
    for (int x = 0; x < nx; ++x) {
        const auto key = tuple_key(detail::decode_tuple(x, s.m, s.n));
        if (!table.contains(key)) throw Error("distribution JSON misses settings tuple " + key);
        const auto row = table.at(key).get<std::vector<double>>();
        if (static_cast<int>(row.size()) != na) throw Error("distribution row has wrong length");
        for (int a = 0; a < na; ++a) probs[static_cast<std::size_t>(x) * na + a] = row[a];
    }
    return FullDistribution(s, std::move(probs));
}

// ---- reports ----------------------------------------------------------------

inline json projection_json(const ProjectionResult& r) {
    return {{"params", {{"a0", r.params.a0}, {"a1", r.params.a1}, {"c0", r.params.c0}, {"c1", r.params.c1}}},
            {"point", point_json(r.point)},
            {"distance", r.distance},
            {"squared_distance", r.squared_distance},
            {"iterations", r.iterations},
            {"converged", r.converged}};
}

inline json test_report_json(const TestReport& r) {
    return {{"distance", r.distance}, {"sigma_d", r.sigma_d}, {"z", r.z},         {"p_value", r.p_value},
            {"overlap", r.overlap},   {"alpha", r.alpha},     {"reject", r.reject}, {"sidedness", r.sidedness}};
}

inline json two_sample_json(const TwoSampleResult& r) {
    return {{"statistic", r.statistic}, {"df", r.df}, {"p_value", r.p_value}};
}

inline json bound_json(const BoundReport& r) {
    return {{"v", r.v},           {"l1", r.l1},           {"l2", r.l2},   {"delta_a", r.delta_a},
            {"delta_b", r.delta_b}, {"delta_ab", r.delta_ab}, {"rhs", r.rhs}, {"holds", r.holds}};
}

inline json fidelity_json(const FidelityBounds& b) {
    return {{"fidelity", b.fidelity}, {"trace_distance", b.trace_distance}, {"lower", b.lower},
            {"upper", b.upper},       {"holds", b.holds}};
}

// ---- graphs -----------------------------------------------------------------

/// Undirected DOT; node labels are 0-based table rows.
inline std::string graph_dot(const VisibilityGraph& g) {
    std::ostringstream os;
    os << "graph visibility_" << (g.representation() == Representation::Full26 ? "full" : "reduced") << " {\n";
    for (int i = 0; i < g.node_count(); ++i) os << "  " << i << " [label=\"" << i << "\"];\n";
    for (const auto& [a, b] : g.edges()) os << "  " << a << " -- " << b << ";\n";
    os << "}\n";
    return os.str();
}

inline json graph_json(const VisibilityGraph& g) {
    json edges = json::array();
    for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
    return {{"representation", to_string(g.representation())},
            {"node_count", g.node_count()},
            {"edge_count", g.edge_count()},
            {"edges", edges}};
}

inline json apsp_json(const ShortestPaths& sp) { return {{"max", sp.max_distance}, {"hops", sp.hops}}; }

inline json generator_json(const GeneratorSet& s) {
    return {{"size", s.members.size()}, {"members", s.members}, {"covered", s.covered.size()}, {"complete", s.complete}};
}

inline json coverage_json(const CoverageReport& r) {
    return {{"members", r.members},
            {"newly_covered", r.newly_covered},
            {"running_total", r.running_total},
            {"complete", r.complete}};
}

// ---- files ------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error("malformed JSON in '" + path + "': " + e.what());
    }
}

/// Rows of comma-separated reals; blank lines and lines starting with '#' are skipped.
inline std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error("malformed number '" + cell + "' on line " + std::to_string(line_no));
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw Error("inconsistent column count on line " + std::to_string(line_no));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Writes `content` to `path` ("-" is stdout). Files are written to a
/// temporary sibling and renamed, so a failed run leaves no partial output.
inline void write_output(const std::string& path, const std::string& content, std::ostream& stdout_stream) {
    if (path == "-" || path.empty()) {
        stdout_stream << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write output file '" + path + "'");
        out << content;
        if (!out.flush()) {
            std::remove(tmp.c_str());
            throw Error("cannot write output file '" + path + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw Error("cannot write output file '" + path + "': " + ec.message());
    }
}

} // namespace p3net::io
