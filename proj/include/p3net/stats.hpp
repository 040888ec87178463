#pragma once

// Noise models and hypothesis tests for comparing an expected behaviour point
// with an observed one.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "p3net/error.hpp"
#include "p3net/strategy.hpp"

namespace p3net {

struct Norms {
    double l1 = 0.0;
    double l2 = 0.0;
};

/// L1 and L2 norms. For entries in [-1, 1], l2 <= l1.
inline Norms norms(std::span<const double> v) {
    Norms n;
    double sq = 0.0;
    for (double x : v) {
        n.l1 += std::abs(x);
        sq += x * x;
    }
    n.l2 = std::sqrt(sq);
    return n;
}

/// Relative: per-component sigma = relative_sigma * value. Absolute: sigma = relative_sigma.
enum class NoiseMode { Relative, Absolute };

struct NoiseSpec {
    double relative_sigma = 0.0;
    std::uint64_t seed = 0;
    NoiseMode mode = NoiseMode::Relative;
};

inline double component_sigma(double value, double sigma, NoiseMode mode) {
    return mode == NoiseMode::Relative ? sigma * value : sigma;
}

/// x -> clamp(x + N(0, sigma_x^2), 0, 1) for every component, seeded.
inline BehaviourPoint perturb(const BehaviourPoint& p, const NoiseSpec& noise) {
    if (!(noise.relative_sigma >= 0.0)) throw Error("noise sigma must be nonnegative");
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double z = normal(rng);
        const double sd = component_sigma(p[k], noise.relative_sigma, noise.mode);
        out[k] = std::clamp(p[k] + sd * z, 0.0, 1.0);
    }
    return BehaviourPoint(p.representation(), std::move(out));
}

/// Distance between p and p shifted by exactly one sigma in every component.
inline double distance_sigma(const BehaviourPoint& p, double sigma, NoiseMode mode = NoiseMode::Relative) {
    if (!(sigma >= 0.0)) throw Error("noise sigma must be nonnegative");
    double s = 0.0;
    for (double x : p.coords()) {
        const double d = component_sigma(x, sigma, mode);
        s += d * d;
    }
    return std::sqrt(s);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct TestReport {
    double distance = 0.0;
    double sigma_d = 0.0;
    double z = 0.0;
    double p_value = 1.0;
    double overlap = 1.0;
    double alpha = 0.0;
    bool reject = false;
    std::string sidedness = "two-sided";
};

/// Scalar Gaussian test on the Euclidean distance between two points, with
/// the distance error modelled as N(0, sigma_d^2).
inline TestReport gaussian_separability(const BehaviourPoint& p, const BehaviourPoint& q, double sigma_d,
                                        double alpha) {
    if (!(sigma_d > 0.0)) throw Error("sigma_d must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0,1)");
    TestReport r;
    r.distance = euclidean_distance(p, q);
    r.sigma_d = sigma_d;
    r.z = r.distance / sigma_d;
    r.p_value = std::clamp(std::erfc(r.z / std::sqrt(2.0)), 0.0, 1.0);
    // Common area of N(0, s^2) and N(d, s^2).
    r.overlap = std::clamp(std::erfc(r.distance / (2.0 * sigma_d * std::sqrt(2.0))), 0.0, 1.0);
    r.alpha = alpha;
    r.reject = r.p_value < alpha;
    return r;
}

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw Error("incomplete beta continued fraction did not converge");
}

} // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw Error("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw Error("incomplete beta needs x in [0,1]");
    if (x == 0.0 || x == 1.0) return x;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw Error("degrees of freedom must be positive");
    if (!std::isfinite(t)) return 0.0;
    return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t)), 0.0, 1.0);
}

struct TwoSampleResult {
    double statistic = 0.0;
    double df = 0.0;  // Welch-Satterthwaite; zero for KS
    double p_value = 1.0;
};

namespace detail {

inline void mean_var(std::span<const double> xs, double& mean, double& var) {
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size() - 1);
}

} // namespace detail

/// Welch's unequal-variance t-test, two-sided.
inline TwoSampleResult two_sample_t(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() < 2 || ys.size() < 2) throw Error("t-test needs at least 2 observations per sample");
    double mx = 0, vx = 0, my = 0, vy = 0;
    detail::mean_var(xs, mx, vx);
    detail::mean_var(ys, my, vy);
    if (vx <= 0.0 || vy <= 0.0) throw Error("t-test needs samples with nonzero variance");
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    const double sx = vx / nx;
    const double sy = vy / ny;
    TwoSampleResult r;
    r.statistic = (mx - my) / std::sqrt(sx + sy);
    r.df = (sx + sy) * (sx + sy) / (sx * sx / (nx - 1.0) + sy * sy / (ny - 1.0));
    r.p_value = student_t_two_sided_p(r.statistic, r.df);
    return r;
}

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_q(double lambda) {
    constexpr double kEps1 = 1e-10;
    constexpr double kEps2 = 1e-16;
    if (lambda <= 0.0) return 1.0;
    const double a2 = -2.0 * lambda * lambda;
    double fac = 2.0;
    double sum = 0.0;
    double previous = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = fac * std::exp(a2 * j * j);
        sum += term;
        if (std::abs(term) <= kEps1 * previous || std::abs(term) <= kEps2 * sum) return std::clamp(sum, 0.0, 1.0);
        fac = -fac;
        previous = std::abs(term);
    }
    // The alternating series has not settled: lambda is tiny and Q is 1.
    return 1.0;
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
inline TwoSampleResult two_sample_ks(std::span<const double> xs, std::span<const double> ys) {
    if (xs.empty() || ys.empty()) throw Error("KS test needs nonempty samples");
    std::vector<double> a(xs.begin(), xs.end());
    std::vector<double> b(ys.begin(), ys.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    TwoSampleResult r;
    r.statistic = d;
    const double ne = na * nb / (na + nb);
    const double root = std::sqrt(ne);
    r.p_value = kolmogorov_q((root + 0.12 + 0.11 / root) * d);
    return r;
}

} // namespace p3net
