#pragma once

// Deterministic local strategies of the three-party line network (A - B - C,
// two independent sources) and the behaviour-space coordinates built on them.
//
// Coordinate convention: entry "a0" is the probability that party A reports
// the fixed outcome for setting 0; composite entries ("a0c1", "a0b1c0", ...)
// are joint probabilities of the fixed outcome. For a deterministic strategy
// every entry is 0 or 1 and composites are products of singles.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "p3net/error.hpp"

namespace p3net {

/// Bell scenario (n parties, m settings per party, d outcomes per setting).
struct ScenarioShape {
    int n = 1;
    int m = 1;
    int d = 1;

    constexpr bool operator==(const ScenarioShape&) const = default;

    void validate() const {
        if (n < 1 || m < 1 || d < 1) {
            throw Error("scenario shape must have n, m, d >= 1");
        }
    }
};

inline constexpr ScenarioShape kFullShape{3, 2, 2};
inline constexpr ScenarioShape kReducedShape{2, 2, 2};

/// Dimension of the no-signalling behaviour space: [(d-1)m + 1]^n - 1.
inline long long scenario_dimension(const ScenarioShape& shape) {
    shape.validate();
    const long long base = static_cast<long long>(shape.d - 1) * shape.m + 1;
    long long result = 1;
    for (int i = 0; i < shape.n; ++i) {
        result *= base;
    }
    return result - 1;
}

enum class Representation { Full26, Reduced8 };

inline constexpr std::size_t kFullDim = 26;
inline constexpr std::size_t kReducedDim = 8;

inline std::size_t dimension_of(Representation rep) {
    return rep == Representation::Full26 ? kFullDim : kReducedDim;
}

inline ScenarioShape shape_of(Representation rep) {
    return rep == Representation::Full26 ? kFullShape : kReducedShape;
}

inline std::string to_string(Representation rep) {
    return rep == Representation::Full26 ? "full-26" : "reduced-8";
}

inline Representation parse_representation(const std::string& s) {
    if (s == "full" || s == "full-26") return Representation::Full26;
    if (s == "reduced" || s == "reduced-8") return Representation::Reduced8;
    throw Error("unknown representation '" + s + "' (expected full|reduced)");
}

/// Response function of one wing: output for setting 0 and for setting 1.
/// index = 2*out0 + out1, i.e. e_{0,0} -> 0, e_{0,1} -> 1, e_{1,0} -> 2, e_{1,1} -> 3.
class WingStrategy {
public:
    constexpr WingStrategy() = default;

    static constexpr WingStrategy from_index(int index) {
        if (index < 0 || index > 3) {
            throw Error("wing strategy index must be in 0..3");
        }
        return WingStrategy(static_cast<std::uint8_t>(index));
    }

    static constexpr WingStrategy from_outputs(int out0, int out1) {
        if ((out0 != 0 && out0 != 1) || (out1 != 0 && out1 != 1)) {
            throw Error("wing outputs must be bits");
        }
        return WingStrategy(static_cast<std::uint8_t>(2 * out0 + out1));
    }

    constexpr int index() const { return index_; }
    constexpr int out0() const { return index_ >> 1; }
    constexpr int out1() const { return index_ & 1; }
    constexpr int output(int setting) const { return setting == 0 ? out0() : out1(); }

    constexpr bool operator==(const WingStrategy&) const = default;

private:
    constexpr explicit WingStrategy(std::uint8_t index) : index_(index) {}
    std::uint8_t index_ = 0;
};

/// (alpha, beta, gamma): the response functions of A, B and C.
struct DeterministicStrategy {
    WingStrategy alpha;
    WingStrategy beta;
    WingStrategy gamma;

    constexpr bool operator==(const DeterministicStrategy&) const = default;

    /// Row of the strategy in the vertex table (ascending binary over a0..c1).
    constexpr int table_index() const {
        return 16 * alpha.index() + 4 * beta.index() + gamma.index();
    }

    static constexpr DeterministicStrategy from_table_index(int row) {
        if (row < 0 || row >= 64) {
            throw Error("strategy table index must be in 0..63");
        }
        return {WingStrategy::from_index(row / 16), WingStrategy::from_index((row / 4) % 4),
                WingStrategy::from_index(row % 4)};
    }

    static constexpr DeterministicStrategy from_classes(int a, int b, int c) {
        return {WingStrategy::from_index(a), WingStrategy::from_index(b), WingStrategy::from_index(c)};
    }
};

/// All 64 strategies in vertex-table order.
inline std::vector<DeterministicStrategy> enumerate_strategies() {
    std::vector<DeterministicStrategy> out;
    out.reserve(64);
    for (int row = 0; row < 64; ++row) {
        out.push_back(DeterministicStrategy::from_table_index(row));
    }
    return out;
}

namespace detail {

// Index pairs (into the singles block) for the 12 pair entries and index
// triples for the 8 triplet entries, in column order.
inline constexpr std::array<std::array<int, 2>, 12> kPairIndex{{
    {0, 2}, {0, 3}, {1, 2}, {1, 3},  // a b
    {0, 4}, {0, 5}, {1, 4}, {1, 5},  // a c
    {2, 4}, {2, 5}, {3, 4}, {3, 5},  // b c
}};

inline constexpr std::array<std::array<int, 3>, 8> kTripleIndex{{
    {0, 2, 4}, {0, 2, 5}, {0, 3, 4}, {0, 3, 5},
    {1, 2, 4}, {1, 2, 5}, {1, 3, 4}, {1, 3, 5},
}};

// Composite entries of the reduced block, as (a setting, c setting).
inline constexpr std::array<std::array<int, 2>, 4> kReducedPairIndex{{{0, 2}, {0, 3}, {1, 2}, {1, 3}}};

inline constexpr std::array<const char*, 6> kSingleNames{"a0", "a1", "b0", "b1", "c0", "c1"};

} // namespace detail

/// Column names of the 26-D table: singles, pairs, triplets.
inline std::vector<std::string> full_column_names() {
    std::vector<std::string> names;
    for (const char* s : detail::kSingleNames) names.emplace_back(s);
    for (const auto& p : detail::kPairIndex) {
        names.push_back(std::string(detail::kSingleNames[p[0]]) + detail::kSingleNames[p[1]]);
    }
    for (const auto& t : detail::kTripleIndex) {
        names.push_back(std::string(detail::kSingleNames[t[0]]) + detail::kSingleNames[t[1]] +
                        detail::kSingleNames[t[2]]);
    }
    return names;
}

inline std::vector<std::string> reduced_column_names() {
    return {"a0", "a1", "c0", "c1", "a0c0", "a0c1", "a1c0", "a1c1"};
}

inline std::vector<std::string> column_names(Representation rep) {
    return rep == Representation::Full26 ? full_column_names() : reduced_column_names();
}

/// Extreme point of the 26-D local set: (singles, pairs, tris).
class VertexFull {
public:
    using Bits = std::array<std::uint8_t, kFullDim>;

    /// Builds from the six singles (a0, a1, b0, b1, c0, c1); composites are products.
    static VertexFull from_singles(std::span<const int, 6> singles) {
        Bits bits{};
        for (std::size_t i = 0; i < 6; ++i) {
            if (singles[i] != 0 && singles[i] != 1) throw Error("vertex singles must be bits");
            bits[i] = static_cast<std::uint8_t>(singles[i]);
        }
        for (std::size_t k = 0; k < detail::kPairIndex.size(); ++k) {
            const auto& p = detail::kPairIndex[k];
            bits[6 + k] = bits[p[0]] & bits[p[1]];
        }
        for (std::size_t k = 0; k < detail::kTripleIndex.size(); ++k) {
            const auto& t = detail::kTripleIndex[k];
            bits[18 + k] = bits[t[0]] & bits[t[1]] & bits[t[2]];
        }
        return VertexFull(bits);
    }

    /// Validating constructor from a raw 26-bit row.
    static VertexFull from_bits(const Bits& bits) {
        std::array<int, 6> singles{};
        for (std::size_t i = 0; i < 6; ++i) singles[i] = bits[i];
        VertexFull v = from_singles(singles);
        if (v.bits_ != bits) throw Error("vertex composites are not products of singles");
        return v;
    }

    const Bits& bits() const { return bits_; }
    std::span<const std::uint8_t, 6> singles() const { return std::span(bits_).first<6>(); }
    std::span<const std::uint8_t, 12> pairs() const { return std::span(bits_).subspan<6, 12>(); }
    std::span<const std::uint8_t, 8> tris() const { return std::span(bits_).subspan<18, 8>(); }

    int hamming_weight() const {
        int w = 0;
        for (auto b : bits_) w += b;
        return w;
    }

    bool operator==(const VertexFull&) const = default;

private:
    explicit VertexFull(const Bits& bits) : bits_(bits) {}
    Bits bits_{};
};

/// Extreme point of the 8-D (middle party marginalized) local set.
class VertexReduced {
public:
    using Bits = std::array<std::uint8_t, kReducedDim>;

    /// Builds from (a0, a1, c0, c1).
    static VertexReduced from_singles(std::span<const int, 4> singles) {
        Bits bits{};
        for (std::size_t i = 0; i < 4; ++i) {
            if (singles[i] != 0 && singles[i] != 1) throw Error("vertex singles must be bits");
            bits[i] = static_cast<std::uint8_t>(singles[i]);
        }
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& p = detail::kReducedPairIndex[k];
            bits[4 + k] = bits[p[0]] & bits[p[1]];
        }
        return VertexReduced(bits);
    }

    static VertexReduced from_bits(const Bits& bits) {
        std::array<int, 4> singles{bits[0], bits[1], bits[2], bits[3]};
        VertexReduced v = from_singles(singles);
        if (v.bits_ != bits) throw Error("vertex composites are not products of singles");
        return v;
    }

    const Bits& bits() const { return bits_; }

    /// Row in the 16-row table: ascending binary over (a0, a1, c0, c1).
    int table_index() const { return 8 * bits_[0] + 4 * bits_[1] + 2 * bits_[2] + bits_[3]; }

    int hamming_weight() const {
        int w = 0;
        for (auto b : bits_) w += b;
        return w;
    }

    bool operator==(const VertexReduced&) const = default;

private:
    explicit VertexReduced(const Bits& bits) : bits_(bits) {}
    Bits bits_{};
};

inline VertexFull vertex_from_strategy(const DeterministicStrategy& s) {
    const std::array<int, 6> singles{s.alpha.out0(), s.alpha.out1(), s.beta.out0(),
                                     s.beta.out1(),  s.gamma.out0(), s.gamma.out1()};
    return VertexFull::from_singles(singles);
}

/// Drops every entry involving the middle party.
inline VertexReduced marginalize(const VertexFull& v) {
    const auto& b = v.bits();
    // a0, a1, c0, c1, a0c0, a0c1, a1c0, a1c1 sit at 0, 1, 4, 5, 10, 11, 12, 13.
    return VertexReduced::from_bits({b[0], b[1], b[4], b[5], b[10], b[11], b[12], b[13]});
}

/// The 16 reduced vertices in table order.
inline std::vector<VertexReduced> enumerate_reduced() {
    std::vector<VertexReduced> out;
    out.reserve(16);
    for (int row = 0; row < 16; ++row) {
        const std::array<int, 4> singles{(row >> 3) & 1, (row >> 2) & 1, (row >> 1) & 1, row & 1};
        out.push_back(VertexReduced::from_singles(singles));
    }
    return out;
}

inline std::vector<VertexFull> enumerate_full() {
    std::vector<VertexFull> out;
    out.reserve(64);
    for (const auto& s : enumerate_strategies()) out.push_back(vertex_from_strategy(s));
    return out;
}

/// Count of vertices per Hamming weight.
template <typename Vertex>
std::map<int, int> hamming_histogram(std::span<const Vertex> vertices) {
    if (vertices.empty()) throw Error("no vertices");
    std::map<int, int> histogram;
    for (const auto& v : vertices) ++histogram[v.hamming_weight()];
    return histogram;
}

template <typename Vertex>
std::map<int, int> hamming_histogram(const std::vector<Vertex>& vertices) {
    return hamming_histogram(std::span<const Vertex>(vertices));
}

/// Real point of behaviour space in one of the two coordinate systems.
/// Coordinates are probabilities and must lie in [0, 1].
class BehaviourPoint {
public:
    BehaviourPoint(Representation rep, std::vector<double> coords)
        : rep_(rep), coords_(std::move(coords)) {
        if (coords_.size() != dimension_of(rep_)) {
            throw Error("behaviour point of representation " + to_string(rep_) + " needs " +
                        std::to_string(dimension_of(rep_)) + " coordinates, got " +
                        std::to_string(coords_.size()));
        }
        for (double x : coords_) {
            if (!std::isfinite(x) || x < -kRangeSlack || x > 1.0 + kRangeSlack) {
                throw Error("behaviour point coordinates must lie in [0,1]");
            }
        }
    }

    static BehaviourPoint from_vertex(const VertexFull& v) {
        return BehaviourPoint(Representation::Full26, std::vector<double>(v.bits().begin(), v.bits().end()));
    }

    static BehaviourPoint from_vertex(const VertexReduced& v) {
        return BehaviourPoint(Representation::Reduced8, std::vector<double>(v.bits().begin(), v.bits().end()));
    }

    Representation representation() const { return rep_; }
    ScenarioShape shape() const { return shape_of(rep_); }
    std::span<const double> coords() const { return coords_; }
    std::size_t size() const { return coords_.size(); }
    double operator[](std::size_t k) const { return coords_[k]; }

    static constexpr double kRangeSlack = 1e-9;

private:
    Representation rep_;
    std::vector<double> coords_;
};

inline bool approx_equal(const BehaviourPoint& p, const BehaviourPoint& q, double tol = 1e-12) {
    if (p.representation() != q.representation()) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (std::abs(p[k] - q[k]) > tol) return false;
    }
    return true;
}

/// p - q as a plain vector (the difference need not be a probability vector).
inline std::vector<double> difference(const BehaviourPoint& p, const BehaviourPoint& q) {
    if (p.representation() != q.representation()) throw Error("representation mismatch");
    std::vector<double> v(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) v[k] = p[k] - q[k];
    return v;
}

/// Euclidean distance between two points of the same representation.
inline double euclidean_distance(const BehaviourPoint& p, const BehaviourPoint& q) {
    double s = 0.0;
    for (double x : difference(p, q)) s += x * x;
    return std::sqrt(s);
}

} // namespace p3net
