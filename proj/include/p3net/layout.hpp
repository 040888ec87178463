#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "p3net/strategy.hpp"

namespace p3net {

inline constexpr double kZeroVertexShift = 1e-6;

/// 3-D coordinates for plotting the vertex graph: shift the zero vertex by
/// kZeroVertexShift on every coordinate, center the columns, and project on
/// the first three right-singular directions. Each direction is signed so its
/// largest-magnitude entry is positive.
inline std::vector<std::array<double, 3>> svd_layout(Representation rep) {
    Eigen::MatrixXd m;
    if (rep == Representation::Full26) {
        const auto vs = enumerate_full();
        m.resize(static_cast<Eigen::Index>(vs.size()), kFullDim);
        for (std::size_t i = 0; i < vs.size(); ++i) {
            for (std::size_t k = 0; k < kFullDim; ++k) m(i, k) = vs[i].bits()[k];
        }
    } else {
        const auto vs = enumerate_reduced();
        m.resize(static_cast<Eigen::Index>(vs.size()), kReducedDim);
        for (std::size_t i = 0; i < vs.size(); ++i) {
            for (std::size_t k = 0; k < kReducedDim; ++k) m(i, k) = vs[i].bits()[k];
        }
    }
    // Row 0 is the zero vertex in both tables.
    m.row(0).array() += kZeroVertexShift;
    const Eigen::RowVectorXd mean = m.colwise().mean();
    m.rowwise() -= mean;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
    Eigen::MatrixXd v = svd.matrixV().leftCols(3);
    for (int c = 0; c < 3; ++c) {
        Eigen::Index arg = 0;
        v.col(c).cwiseAbs().maxCoeff(&arg);
        if (v(arg, c) < 0) v.col(c) = -v.col(c);
    }
    const Eigen::MatrixXd proj = m * v;

    std::vector<std::array<double, 3>> out(static_cast<std::size_t>(proj.rows()));
    for (Eigen::Index i = 0; i < proj.rows(); ++i) {
        out[i] = {proj(i, 0), proj(i, 1), proj(i, 2)};
    }
    return out;
}

} // namespace p3net
