#pragma once

// The uncorrelated manifold of the reduced 8-D behaviour space: points whose
// composite entries factorize into products of singles. It is a 4-parameter
// surface through all 16 reduced vertices; the distance of a behaviour from it
// measures how much A-C correlation the behaviour carries.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "p3net/error.hpp"
#include "p3net/strategy.hpp"

namespace p3net {

struct ManifoldParams {
    double a0 = 0.0;
    double a1 = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;

    std::array<double, 4> as_array() const { return {a0, a1, c0, c1}; }

    static ManifoldParams from_array(const std::array<double, 4>& x) { return {x[0], x[1], x[2], x[3]}; }

    void validate() const {
        for (double v : as_array()) {
            if (!(v >= 0.0 && v <= 1.0)) throw Error("manifold parameters must lie in [0,1]");
        }
    }
};

/// (a0, a1, c0, c1, a0 c0, a0 c1, a1 c0, a1 c1).
inline BehaviourPoint embed(const ManifoldParams& p) {
    p.validate();
    return BehaviourPoint(Representation::Reduced8,
                          {p.a0, p.a1, p.c0, p.c1, p.a0 * p.c0, p.a0 * p.c1, p.a1 * p.c0, p.a1 * p.c1});
}

inline void require_reduced(const BehaviourPoint& q) {
    if (q.representation() != Representation::Reduced8) {
        throw Error("wrong representation: expected reduced-8 behaviour point");
    }
}

inline bool on_manifold(const BehaviourPoint& q, double tol) {
    require_reduced(q);
    return std::abs(q[4] - q[0] * q[2]) <= tol && std::abs(q[5] - q[0] * q[3]) <= tol &&
           std::abs(q[6] - q[1] * q[2]) <= tol && std::abs(q[7] - q[1] * q[3]) <= tol;
}

namespace detail {

inline std::array<double, 8> embed_raw(const std::array<double, 4>& x) {
    return {x[0], x[1], x[2], x[3], x[0] * x[2], x[0] * x[3], x[1] * x[2], x[1] * x[3]};
}

inline std::array<double, 4> clamp_box(std::array<double, 4> x) {
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
    return x;
}

} // namespace detail

/// f(x) = ||embed(x) - q||^2.
inline double projection_objective(const std::array<double, 4>& x, const BehaviourPoint& q) {
    const auto e = detail::embed_raw(x);
    double f = 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
        const double r = e[k] - q[k];
        f += r * r;
    }
    return f;
}

/// Analytic gradient of projection_objective.
inline std::array<double, 4> projection_gradient(const std::array<double, 4>& x, const BehaviourPoint& q) {
    const auto e = detail::embed_raw(x);
    std::array<double, 8> r{};
    for (std::size_t k = 0; k < 8; ++k) r[k] = e[k] - q[k];
    return {2.0 * (r[0] + r[4] * x[2] + r[5] * x[3]), 2.0 * (r[1] + r[6] * x[2] + r[7] * x[3]),
            2.0 * (r[2] + r[4] * x[0] + r[6] * x[1]), 2.0 * (r[3] + r[5] * x[0] + r[7] * x[1])};
}

struct ProjectOptions {
    int starts = 9;  // lattice starts used, 1..9; the target's own singles are always added
    int max_iter = 20000;
    double grad_tol = 1e-10;
};

struct ProjectionResult {
    ManifoldParams params;
    BehaviourPoint point;
    double distance = 0.0;
    double squared_distance = 0.0;
    int iterations = 0;
    bool converged = false;
    int start_index = 0;
};

/// Fixed multi-start lattice.
inline const std::array<std::array<double, 4>, 9>& projection_lattice() {
    static const std::array<std::array<double, 4>, 9> lattice{{
        {0.5, 0.5, 0.5, 0.5},
        {0.25, 0.25, 0.25, 0.25},
        {0.75, 0.75, 0.75, 0.75},
        {0.25, 0.25, 0.75, 0.75},
        {0.75, 0.75, 0.25, 0.25},
        {0.25, 0.75, 0.25, 0.75},
        {0.75, 0.25, 0.75, 0.25},
        {0.25, 0.75, 0.75, 0.25},
        {0.75, 0.25, 0.25, 0.75},
    }};
    return lattice;
}

namespace detail {

struct DescentOutcome {
    std::array<double, 4> x;
    double f;
    int iterations;
    bool converged;
};

// Projected gradient descent on the unit box with Armijo backtracking.
inline DescentOutcome projected_descent(std::array<double, 4> x, const BehaviourPoint& q, const ProjectOptions& opt) {
    constexpr double kArmijo = 1e-4;
    constexpr double kShrink = 0.5;
    x = clamp_box(x);
    double f = projection_objective(x, q);
    double step = 1.0;
    auto projected_gradient_norm = [&](const std::array<double, 4>& at, const std::array<double, 4>& g) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double d = std::clamp(at[i] - g[i], 0.0, 1.0) - at[i];
            s += d * d;
        }
        return std::sqrt(s);
    };
    // Stationary to working precision: a unit step would change f by less than
    // its rounding error, so the line search cannot make further progress.
    auto stationary = [&](double pg) {
        return pg <= opt.grad_tol || pg * pg <= 64.0 * std::numeric_limits<double>::epsilon() * f;
    };
    for (int it = 0; it < opt.max_iter; ++it) {
        const auto g = projection_gradient(x, q);
        if (stationary(projected_gradient_norm(x, g))) return {x, f, it, true};
        step = std::min(step * 2.0, 1.0);
        while (true) {
            std::array<double, 4> trial{};
            double decrease = 0.0;
            for (int i = 0; i < 4; ++i) {
                trial[i] = std::clamp(x[i] - step * g[i], 0.0, 1.0);
                decrease += g[i] * (trial[i] - x[i]);
            }
            const double ft = projection_objective(trial, q);
            if (ft <= f + kArmijo * decrease) {
                x = trial;
                f = ft;
                break;
            }
            step *= kShrink;
            if (step < 1e-20) {
                // No representable progress left.
                return {x, f, it + 1, stationary(projected_gradient_norm(x, g))};
            }
        }
    }
    const auto g = projection_gradient(x, q);
    return {x, f, opt.max_iter, stationary(projected_gradient_norm(x, g))};
}

} // namespace detail

/// Closest point of the uncorrelated manifold to `q` (Euclidean). Runs a
/// descent from each lattice start and from q's singles; keeps the lowest
/// objective, ties (within rounding) going to the earlier start. converged is false when the
/// selected start did not reach grad_tol within max_iter.
inline ProjectionResult project(const BehaviourPoint& q, const ProjectOptions& opt = {}) {
    require_reduced(q);
    if (opt.starts < 1 || opt.starts > 9) throw Error("projection starts must be in 1..9");
    if (opt.max_iter < 1) throw Error("projection max_iter must be positive");
    if (!(opt.grad_tol > 0.0)) throw Error("projection grad_tol must be positive");

    std::vector<std::array<double, 4>> starts(projection_lattice().begin(), projection_lattice().begin() + opt.starts);
    starts.push_back({q[0], q[1], q[2], q[3]});

    int best = -1;
    detail::DescentOutcome best_outcome{};
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const auto outcome = detail::projected_descent(starts[i], q, opt);
        if (best < 0 || outcome.f < best_outcome.f - 1e-12 * (1.0 + best_outcome.f)) {
            best = static_cast<int>(i);
            best_outcome = outcome;
        }
    }
    const ManifoldParams params = ManifoldParams::from_array(best_outcome.x);
    return ProjectionResult{params,
                            embed(params),
                            std::sqrt(best_outcome.f),
                            best_outcome.f,
                            best_outcome.iterations,
                            best_outcome.converged,
                            best};
}

/// Distance of `observed` from the manifold as a fraction of the distance of `reference`.
inline double normalized_score(const BehaviourPoint& observed, const BehaviourPoint& reference,
                               const ProjectOptions& opt = {}) {
    require_reduced(observed);
    require_reduced(reference);
    const double denom = project(reference, opt).distance;
    if (denom <= 1e-8) throw Error("degenerate reference: reference point lies on the uncorrelated manifold");
    return project(observed, opt).distance / denom;
}

} // namespace p3net
