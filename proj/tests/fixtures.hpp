#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixtures {

// Reads one of the vertex tables under tests/data: comma-separated 0/1 rows, no header.
inline std::vector<std::vector<int>> load_bit_table(const std::string& name) {
    const std::string path = std::string(P3NET_TEST_DATA) + "/" + name;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing fixture " + path);
    std::vector<std::vector<int>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<int> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stoi(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<std::vector<int>> full_table() { return load_bit_table("vertices_full.csv"); }
inline std::vector<std::vector<int>> reduced_table() { return load_bit_table("vertices_reduced.csv"); }

} // namespace fixtures
