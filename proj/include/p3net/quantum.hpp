#pragma once

// Quantum and hidden-variable models that generate behaviours, plus the
// trace-distance and fidelity quantities that bound behaviour-space distances.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "p3net/error.hpp"
#include "p3net/stats.hpp"
#include "p3net/strategy.hpp"

namespace p3net {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kStateTolerance = 1e-10;

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline double hermitian_residual(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Eigenvalues (ascending) of a Hermitian matrix.
inline Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("Hermitian eigendecomposition failed");
    return solver.eigenvalues();
}

/// Validated quantum state: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m, double tol = kStateTolerance) : m_(std::move(m)) {
        if (m_.rows() == 0 || m_.rows() != m_.cols()) throw Error("density matrix must be square and nonempty");
        if (!m_.allFinite()) throw Error("density matrix has non-finite entries");
        if (hermitian_residual(m_) > tol) throw Error("density matrix is not Hermitian");
        const Complex tr = m_.trace();
        if (std::abs(tr.real() - 1.0) > tol || std::abs(tr.imag()) > tol) {
            throw Error("density matrix trace ≠ 1 (trace = " + std::to_string(tr.real()) + ")");
        }
        // Symmetrize away round-off before the spectral check.
        m_ = 0.5 * (m_ + m_.adjoint()).eval();
        if (hermitian_eigenvalues(m_).minCoeff() < -tol) {
            throw Error("density matrix has a negative eigenvalue");
        }
    }

    static DensityMatrix pure(const ComplexVector& psi) {
        const double norm = psi.norm();
        if (norm == 0.0) throw Error("pure state vector must be nonzero");
        const ComplexVector v = psi / norm;
        return DensityMatrix(v * v.adjoint());
    }

    static DensityMatrix maximally_mixed(int dim) {
        if (dim < 1) throw Error("dimension must be positive");
        return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const ComplexMatrix& matrix() const { return m_; }

    double purity() const { return (m_ * m_).trace().real(); }

private:
    ComplexMatrix m_;
};

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(kron(a.matrix(), b.matrix()));
}

/// |Phi+> = (|00> + |11>) / sqrt(2).
inline DensityMatrix bell_phi_plus() {
    ComplexVector psi = ComplexVector::Zero(4);
    psi(0) = 1.0;
    psi(3) = 1.0;
    return DensityMatrix::pure(psi);
}

/// rho -> (1 - p) rho + p I / dim.
inline DensityMatrix depolarize(const DensityMatrix& rho, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("invalid noise: depolarizing probability must lie in [0,1]");
    const auto n = rho.dim();
    return DensityMatrix((1.0 - p) * rho.matrix() +
                         p * ComplexMatrix::Identity(n, n) / static_cast<double>(n));
}

/// Seeded random full-rank state G G^dagger / Tr(G G^dagger), G complex Gaussian.
inline DensityMatrix random_density_matrix(int dim, std::uint64_t seed) {
    if (dim < 1) throw Error("dimension must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    ComplexMatrix w = g * g.adjoint();
    w /= w.trace().real();
    return DensityMatrix(w);
}

/// Projective measurements: projectors[party][setting][outcome].
class MeasurementSet {
public:
    using Projectors = std::vector<std::vector<std::vector<ComplexMatrix>>>;

    explicit MeasurementSet(Projectors projectors, double tol = kStateTolerance) : p_(std::move(projectors)) {
        if (p_.empty()) throw Error("invalid measurement set: no parties");
        for (std::size_t party = 0; party < p_.size(); ++party) {
            if (p_[party].empty()) throw Error("invalid measurement set: party without settings");
            const auto dim = p_[party].front().empty() ? 0 : p_[party].front().front().rows();
            for (const auto& outcomes : p_[party]) {
                if (outcomes.size() < 1) throw Error("invalid measurement set: setting without outcomes");
                ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
                for (std::size_t a = 0; a < outcomes.size(); ++a) {
                    const auto& m = outcomes[a];
                    if (m.rows() != dim || m.cols() != dim) {
                        throw Error("invalid measurement set: projector dimension mismatch");
                    }
                    if (hermitian_residual(m) > tol) throw Error("invalid measurement set: projector not Hermitian");
                    for (std::size_t b = 0; b < outcomes.size(); ++b) {
                        const ComplexMatrix prod = m * outcomes[b];
                        const ComplexMatrix expect = a == b ? m : ComplexMatrix::Zero(dim, dim);
                        if ((prod - expect).cwiseAbs().maxCoeff() > tol) {
                            throw Error("invalid measurement set: projectors not orthogonal idempotents");
                        }
                    }
                    sum += m;
                }
                if ((sum - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol) {
                    throw Error("invalid measurement set: projectors do not sum to identity");
                }
            }
        }
    }

    int parties() const { return static_cast<int>(p_.size()); }
    int settings(int party) const { return static_cast<int>(p_.at(party).size()); }
    int outcomes(int party, int setting) const { return static_cast<int>(p_.at(party).at(setting).size()); }
    int local_dim(int party) const { return static_cast<int>(p_.at(party).front().front().rows()); }

    const ComplexMatrix& projector(int party, int setting, int outcome) const {
        return p_.at(party).at(setting).at(outcome);
    }

private:
    Projectors p_;
};

/// Per qubit: setting 0 = standard (Z) basis, setting 1 = Hadamard (X) basis;
/// outcome 0 = |0> resp. |+>.
inline MeasurementSet bb84_measurements(int parties) {
    const double h = 1.0 / std::sqrt(2.0);
    ComplexVector zero(2), one(2), plus(2), minus(2);
    zero << 1.0, 0.0;
    one << 0.0, 1.0;
    plus << h, h;
    minus << h, -h;
    auto proj = [](const ComplexVector& v) -> ComplexMatrix { return v * v.adjoint(); };
    const std::vector<std::vector<ComplexMatrix>> qubit{{proj(zero), proj(one)}, {proj(plus), proj(minus)}};
    return MeasurementSet(MeasurementSet::Projectors(static_cast<std::size_t>(parties), qubit));
}

namespace detail {

inline int ipow(int base, int exp) {
    int r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// Mixed-radix index with party 0 as the most significant digit.
inline int encode_tuple(std::span<const int> digits, int radix) {
    int idx = 0;
    for (int x : digits) {
        if (x < 0 || x >= radix) throw Error("tuple digit out of range");
        idx = idx * radix + x;
    }
    return idx;
}

inline std::vector<int> decode_tuple(int idx, int radix, int n) {
    std::vector<int> digits(n);
    for (int i = n - 1; i >= 0; --i) {
        digits[i] = idx % radix;
        idx /= radix;
    }
    return digits;
}

} // namespace detail

/// Conditional table p(outcomes | settings) of an (n, m, d) scenario.
class FullDistribution {
public:
    static constexpr double kNormTolerance = 1e-9;

    FullDistribution(ScenarioShape shape, std::vector<double> probs) : shape_(shape), probs_(std::move(probs)) {
        shape_.validate();
        if (probs_.size() != static_cast<std::size_t>(setting_count() * outcome_count())) {
            throw Error("distribution table size does not match scenario shape");
        }
        for (double p : probs_) {
            if (!std::isfinite(p) || p < -kNormTolerance) throw Error("distribution has negative entries");
        }
        if (normalization_error() > kNormTolerance) throw Error("distribution is not normalized");
    }

    const ScenarioShape& shape() const { return shape_; }
    int setting_count() const { return detail::ipow(shape_.m, shape_.n); }
    int outcome_count() const { return detail::ipow(shape_.d, shape_.n); }
    std::span<const double> table() const { return probs_; }

    double p(std::span<const int> outcomes, std::span<const int> settings) const {
        check_arity(outcomes, settings);
        return at(detail::encode_tuple(outcomes, shape_.d), detail::encode_tuple(settings, shape_.m));
    }

    double at(int outcome_index, int setting_index) const {
        return probs_[static_cast<std::size_t>(setting_index) * outcome_count() + outcome_index];
    }

    /// Largest |sum_a p(a|x) - 1| over setting tuples.
    double normalization_error() const {
        double worst = 0.0;
        for (int x = 0; x < setting_count(); ++x) {
            double s = 0.0;
            for (int a = 0; a < outcome_count(); ++a) s += at(a, x);
            worst = std::max(worst, std::abs(s - 1.0));
        }
        return worst;
    }

private:
    void check_arity(std::span<const int> outcomes, std::span<const int> settings) const {
        if (static_cast<int>(outcomes.size()) != shape_.n || static_cast<int>(settings.size()) != shape_.n) {
            throw Error("tuple length does not match party count");
        }
    }

    ScenarioShape shape_;
    std::vector<double> probs_;
};

inline bool is_normalized(const FullDistribution& fd, double tol) { return fd.normalization_error() <= tol; }

/// p(a|x) = Tr(rho * (M_{a1|x1} (x) ... (x) M_{an|xn})).
inline FullDistribution behaviour_from_state(const DensityMatrix& rho, const MeasurementSet& meas,
                                             const ScenarioShape& shape) {
    shape.validate();
    if (meas.parties() != shape.n) throw Error("dimension mismatch: measurement parties != scenario parties");
    int total_dim = 1;
    for (int i = 0; i < shape.n; ++i) {
        if (meas.settings(i) != shape.m) throw Error("dimension mismatch: settings per party");
        for (int s = 0; s < shape.m; ++s) {
            if (meas.outcomes(i, s) != shape.d) throw Error("dimension mismatch: outcomes per setting");
        }
        total_dim *= meas.local_dim(i);
    }
    if (total_dim != rho.dim()) throw Error("dimension mismatch: state dimension != product of party dimensions");

    const int nx = detail::ipow(shape.m, shape.n);
    const int na = detail::ipow(shape.d, shape.n);
    std::vector<double> probs(static_cast<std::size_t>(nx) * na);
    for (int x = 0; x < nx; ++x) {
        const auto settings = detail::decode_tuple(x, shape.m, shape.n);
        for (int a = 0; a < na; ++a) {
            const auto outcomes = detail::decode_tuple(a, shape.d, shape.n);
            ComplexMatrix op = meas.projector(0, settings[0], outcomes[0]);
            for (int i = 1; i < shape.n; ++i) op = kron(op, meas.projector(i, settings[i], outcomes[i]));
            const double p = (rho.matrix() * op).trace().real();
            probs[static_cast<std::size_t>(x) * na + a] = std::max(p, 0.0);
        }
    }
    return FullDistribution(shape, std::move(probs));
}

/// Probability that every party in `parties` reports outcome 0 when measured
/// with the matching entry of `settings`; all other parties use setting 0
/// and are summed out.
inline double fixed_outcome_probability(const FullDistribution& fd, std::span<const int> parties,
                                        std::span<const int> settings) {
    const auto& shape = fd.shape();
    std::vector<int> x(shape.n, 0);
    for (std::size_t k = 0; k < parties.size(); ++k) x[parties[k]] = settings[k];
    const int xi = detail::encode_tuple(x, shape.m);
    double total = 0.0;
    for (int a = 0; a < fd.outcome_count(); ++a) {
        const auto outcomes = detail::decode_tuple(a, shape.d, shape.n);
        bool hit = true;
        for (int party : parties) hit = hit && outcomes[party] == 0;
        if (hit) total += fd.at(a, xi);
    }
    return total;
}

/// Fixed-outcome coordinates of a (3,2,2) or (2,2,2) distribution.
inline BehaviourPoint collapse(const FullDistribution& fd) {
    const auto& shape = fd.shape();
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    if (shape == kFullShape) {
        std::vector<double> c;
        c.reserve(kFullDim);
        for (int k = 0; k < 6; ++k) {
            const std::array<int, 1> party{k / 2};
            const std::array<int, 1> setting{k % 2};
            c.push_back(clamp01(fixed_outcome_probability(fd, party, setting)));
        }
        for (const auto& pr : detail::kPairIndex) {
            const std::array<int, 2> parties{pr[0] / 2, pr[1] / 2};
            const std::array<int, 2> settings{pr[0] % 2, pr[1] % 2};
            c.push_back(clamp01(fixed_outcome_probability(fd, parties, settings)));
        }
        for (const auto& t : detail::kTripleIndex) {
            const std::array<int, 3> parties{0, 1, 2};
            const std::array<int, 3> settings{t[0] % 2, t[1] % 2, t[2] % 2};
            c.push_back(clamp01(fixed_outcome_probability(fd, parties, settings)));
        }
        return BehaviourPoint(Representation::Full26, std::move(c));
    }
    if (shape == kReducedShape) {
        std::vector<double> c;
        c.reserve(kReducedDim);
        for (int party = 0; party < 2; ++party) {
            for (int s = 0; s < 2; ++s) {
                const std::array<int, 1> p{party};
                const std::array<int, 1> x{s};
                c.push_back(clamp01(fixed_outcome_probability(fd, p, x)));
            }
        }
        for (const auto& pr : detail::kReducedPairIndex) {
            const std::array<int, 2> parties{0, 1};
            const std::array<int, 2> settings{pr[0], pr[1] - 2};
            c.push_back(clamp01(fixed_outcome_probability(fd, parties, settings)));
        }
        return BehaviourPoint(Representation::Reduced8, std::move(c));
    }
    throw Error("unsupported shape for collapse: expected (2,2,2) or (3,2,2)");
}

struct SampledBehaviour {
    BehaviourPoint point;
    std::vector<double> standard_errors;
    FullDistribution empirical;
};

/// Draws `shots` outcomes per setting tuple from `fd`.
inline SampledBehaviour sample_distribution(const FullDistribution& fd, long long shots, std::uint64_t seed) {
    if (shots < 1) throw Error("shots must be at least 1");
    std::mt19937_64 rng(seed);
    const int na = fd.outcome_count();
    std::vector<double> probs(fd.table().size());
    for (int x = 0; x < fd.setting_count(); ++x) {
        std::vector<double> weights(na);
        for (int a = 0; a < na; ++a) weights[a] = fd.at(a, x);
        std::discrete_distribution<int> pick(weights.begin(), weights.end());
        std::vector<long long> counts(na, 0);
        for (long long s = 0; s < shots; ++s) ++counts[pick(rng)];
        for (int a = 0; a < na; ++a) {
            probs[static_cast<std::size_t>(x) * na + a] = static_cast<double>(counts[a]) / static_cast<double>(shots);
        }
    }
    FullDistribution empirical(fd.shape(), std::move(probs));
    BehaviourPoint point = collapse(empirical);
    std::vector<double> se(point.size());
    for (std::size_t k = 0; k < point.size(); ++k) {
        se[k] = std::sqrt(point[k] * (1.0 - point[k]) / static_cast<double>(shots));
    }
    return {std::move(point), std::move(se), std::move(empirical)};
}

inline SampledBehaviour sample_behaviour(const DensityMatrix& rho, const MeasurementSet& meas,
                                         const ScenarioShape& shape, long long shots, std::uint64_t seed) {
    if (shots < 1) throw Error("shots must be at least 1");
    return sample_distribution(behaviour_from_state(rho, meas, shape), shots, seed);
}

/// Traces out every subsystem whose `keep` flag is false. Subsystem 0 is the
/// most significant tensor factor.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> dims, std::span<const bool> keep) {
    if (dims.size() != keep.size() || dims.empty()) throw Error("dimension mismatch: dims/keep length");
    int total = 1;
    int kept_dim = 1;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (dims[i] < 1) throw Error("dimension mismatch: subsystem dimension must be positive");
        total *= dims[i];
        if (keep[i]) kept_dim *= dims[i];
    }
    if (total != rho.dim()) throw Error("dimension mismatch: state dimension != product of subsystem dims");

    const int n = static_cast<int>(dims.size());
    auto split = [&](int idx, int& kept_idx, int& traced_idx) {
        std::vector<int> digits(n);
        for (int i = n - 1; i >= 0; --i) {
            digits[i] = idx % dims[i];
            idx /= dims[i];
        }
        kept_idx = 0;
        traced_idx = 0;
        for (int i = 0; i < n; ++i) {
            if (keep[i]) kept_idx = kept_idx * dims[i] + digits[i];
            else traced_idx = traced_idx * dims[i] + digits[i];
        }
    };
    std::vector<int> kept(total), traced(total);
    for (int i = 0; i < total; ++i) split(i, kept[i], traced[i]);

    ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
    for (int i = 0; i < total; ++i) {
        for (int j = 0; j < total; ++j) {
            if (traced[i] == traced[j]) out(kept[i], kept[j]) += rho.matrix()(i, j);
        }
    }
    return DensityMatrix(out);
}

enum class Keep { A, B };

inline DensityMatrix partial_trace(const DensityMatrix& rho, int dim_a, int dim_b, Keep keep) {
    const std::array<int, 2> dims{dim_a, dim_b};
    const std::array<bool, 2> mask{keep == Keep::A, keep == Keep::B};
    return partial_trace(rho, dims, mask);
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw Error("dimension mismatch in trace distance");
    const ComplexMatrix diff = rho.matrix() - sigma.matrix();
    if (hermitian_residual(diff) > kStateTolerance) throw Error("state difference is not Hermitian");
    const Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (diff + diff.adjoint()));
    return std::clamp(0.5 * ev.cwiseAbs().sum(), 0.0, 1.0);
}

namespace detail {

inline ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success) throw Error("Hermitian eigendecomposition failed");
    const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().adjoint();
}

} // namespace detail

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; reduces to
/// <psi|rho|psi> when either state is pure.
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw Error("dimension mismatch in fidelity");
    double f = 0.0;
    if (std::abs(sigma.purity() - 1.0) < kStateTolerance || std::abs(rho.purity() - 1.0) < kStateTolerance) {
        f = (rho.matrix() * sigma.matrix()).trace().real();
    } else {
        const ComplexMatrix s = detail::psd_sqrt(rho.matrix());
        const ComplexMatrix inner = s * sigma.matrix() * s;
        const Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (inner + inner.adjoint()));
        const double root_sum = ev.cwiseMax(0.0).cwiseSqrt().sum();
        f = root_sum * root_sum;
    }
    return std::clamp(f, 0.0, 1.0);
}

struct FidelityBounds {
    double fidelity = 0.0;
    double trace_distance = 0.0;
    double lower = 0.0;  // 1 - sqrt(F)
    double upper = 0.0;  // sqrt(1 - F)
    bool holds = false;
};

/// Checks 1 - sqrt(F) <= T <= sqrt(1 - F).
inline FidelityBounds fidelity_bounds_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                                            double tol = 1e-9) {
    FidelityBounds b;
    b.fidelity = fidelity(rho, sigma);
    b.trace_distance = trace_distance(rho, sigma);
    b.lower = 1.0 - std::sqrt(b.fidelity);
    b.upper = std::sqrt(1.0 - b.fidelity);
    b.holds = b.lower <= b.trace_distance + tol && b.trace_distance <= b.upper + tol;
    return b;
}

struct BoundReport {
    std::vector<double> v;  // collapse(rho) - collapse(sigma)
    double l1 = 0.0;
    double l2 = 0.0;
    double delta_a = 0.0;
    double delta_b = 0.0;
    double delta_ab = 0.0;
    double rhs = 0.0;  // 2 (delta_a + delta_b + delta_ab)
    bool holds = false;
};

/// Behaviour-space distance against the trace-distance budget:
/// ||V||_2 <= ||V||_1 <= 2 (delta(rho_A, sigma_A) + delta(rho_B, sigma_B) + delta(rho, sigma)).
inline BoundReport behaviour_bound_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                                         const MeasurementSet& meas, const ScenarioShape& shape,
                                         double tol = 1e-9) {
    if (!(shape == kReducedShape)) throw Error("bound check requires the reduced (2,2,2) shape");
    if (rho.dim() != sigma.dim()) throw Error("dimension mismatch between states");
    const BehaviourPoint p = collapse(behaviour_from_state(rho, meas, shape));
    const BehaviourPoint q = collapse(behaviour_from_state(sigma, meas, shape));

    BoundReport r;
    r.v = difference(p, q);
    const Norms n = norms(r.v);
    r.l1 = n.l1;
    r.l2 = n.l2;
    const int da = meas.local_dim(0);
    const int db = meas.local_dim(1);
    r.delta_a = trace_distance(partial_trace(rho, da, db, Keep::A), partial_trace(sigma, da, db, Keep::A));
    r.delta_b = trace_distance(partial_trace(rho, da, db, Keep::B), partial_trace(sigma, da, db, Keep::B));
    r.delta_ab = trace_distance(rho, sigma);
    r.rhs = 2.0 * (r.delta_a + r.delta_b + r.delta_ab);
    r.holds = r.l2 <= r.l1 + tol && r.l1 <= r.rhs + tol;
    return r;
}

/// Hidden-variable model of the line network: lambda is shared by A and B,
/// lambda' by B and C.
///
/// response_a[l][s][x] = P(x | s, l), response_b[l][l'][t][y] = P(y | t, l, l'),
/// response_c[l'][u][z] = P(z | u, l').
struct LhvModel {
    using Table = std::array<std::array<double, 2>, 2>;

    std::vector<double> weights_lambda;
    std::vector<double> weights_lambda_prime;
    std::vector<Table> response_a;
    std::vector<std::vector<Table>> response_b;
    std::vector<Table> response_c;

    void validate(double tol = 1e-12) const {
        auto check_weights = [&](const std::vector<double>& w, const char* what) {
            if (w.empty()) throw Error(std::string("malformed model: empty ") + what);
            double s = 0.0;
            for (double x : w) {
                if (!(x >= 0.0)) throw Error(std::string("malformed model: negative weight in ") + what);
                s += x;
            }
            if (std::abs(s - 1.0) > tol) throw Error(std::string("malformed model: ") + what + " does not sum to 1");
        };
        auto check_table = [&](const Table& t) {
            for (const auto& row : t) {
                if (!(row[0] >= 0.0) || !(row[1] >= 0.0) || std::abs(row[0] + row[1] - 1.0) > tol) {
                    throw Error("malformed model: response row is not a distribution");
                }
            }
        };
        check_weights(weights_lambda, "P_Lambda");
        check_weights(weights_lambda_prime, "P_Lambda'");
        if (response_a.size() != weights_lambda.size() || response_c.size() != weights_lambda_prime.size() ||
            response_b.size() != weights_lambda.size()) {
            throw Error("malformed model: response table sizes do not match hidden-variable alphabets");
        }
        for (const auto& t : response_a) check_table(t);
        for (const auto& t : response_c) check_table(t);
        for (const auto& row : response_b) {
            if (row.size() != weights_lambda_prime.size()) {
                throw Error("malformed model: response_b inner size does not match P_Lambda'");
            }
            for (const auto& t : row) check_table(t);
        }
    }

    /// Response table of a wing that always produces the given vertex bits.
    /// Bit 1 means the party reports the fixed outcome (label 0).
    static Table deterministic_table(const WingStrategy& w) {
        Table t{};
        for (int s = 0; s < 2; ++s) {
            const int label = w.output(s) == 1 ? 0 : 1;
            t[s][label] = 1.0;
        }
        return t;
    }

    /// Single-valued hidden variables encoding one deterministic strategy.
    static LhvModel deterministic(const DeterministicStrategy& s) {
        LhvModel m;
        m.weights_lambda = {1.0};
        m.weights_lambda_prime = {1.0};
        m.response_a = {deterministic_table(s.alpha)};
        m.response_b = {{deterministic_table(s.beta)}};
        m.response_c = {deterministic_table(s.gamma)};
        return m;
    }
};

/// P(xyz|stu) = sum_{l, l'} P(x|s,l) P(y|t,l,l') P(z|u,l') P(l) P(l').
inline FullDistribution lhv_evaluate(const LhvModel& model) {
    model.validate();
    std::vector<double> probs(64, 0.0);
    for (int x = 0; x < 8; ++x) {
        const int s = (x >> 2) & 1, t = (x >> 1) & 1, u = x & 1;
        for (int a = 0; a < 8; ++a) {
            const int oa = (a >> 2) & 1, ob = (a >> 1) & 1, oc = a & 1;
            double p = 0.0;
            for (std::size_t l = 0; l < model.weights_lambda.size(); ++l) {
                for (std::size_t lp = 0; lp < model.weights_lambda_prime.size(); ++lp) {
                    p += model.response_a[l][s][oa] * model.response_b[l][lp][t][ob] *
                         model.response_c[lp][u][oc] * model.weights_lambda[l] * model.weights_lambda_prime[lp];
                }
            }
            probs[static_cast<std::size_t>(x) * 8 + a] = p;
        }
    }
    return FullDistribution(kFullShape, std::move(probs));
}

struct SignallingWitness {
    int party = 0;
    std::vector<int> settings;      // full setting tuple
    int alternative_setting = 0;    // replacement for settings[party]
    std::vector<int> other_outcomes;  // outcomes of the remaining parties, in party order
    double deviation = 0.0;
};

struct NoSignallingResult {
    bool ok = true;
    std::optional<SignallingWitness> witness;
};

/// For every party, the joint marginal of the other parties must not depend
/// on that party's setting.
inline NoSignallingResult no_signalling_check(const FullDistribution& fd, double tol) {
    const auto& shape = fd.shape();
    const int n = shape.n;
    const int others = detail::ipow(shape.d, n - 1);
    for (int party = 0; party < n; ++party) {
        for (int x = 0; x < fd.setting_count(); ++x) {
            const auto settings = detail::decode_tuple(x, shape.m, n);
            for (int alt = settings[party] + 1; alt < shape.m; ++alt) {
                auto alt_settings = settings;
                alt_settings[party] = alt;
                const int xa = detail::encode_tuple(alt_settings, shape.m);
                for (int o = 0; o < others; ++o) {
                    const auto rest = detail::decode_tuple(o, shape.d, n - 1);
                    double m1 = 0.0, m2 = 0.0;
                    for (int own = 0; own < shape.d; ++own) {
                        std::vector<int> outcomes;
                        outcomes.reserve(n);
                        for (int i = 0, r = 0; i < n; ++i) outcomes.push_back(i == party ? own : rest[r++]);
                        const int ai = detail::encode_tuple(outcomes, shape.d);
                        m1 += fd.at(ai, x);
                        m2 += fd.at(ai, xa);
                    }
                    if (std::abs(m1 - m2) > tol) {
                        return {false, SignallingWitness{party, settings, alt, rest, std::abs(m1 - m2)}};
                    }
                }
            }
        }
    }
    return {true, std::nullopt};
}

enum class ScenarioKind { Honest, Intercepted };

inline ScenarioKind parse_scenario_kind(const std::string& s) {
    if (s == "honest") return ScenarioKind::Honest;
    if (s == "intercepted") return ScenarioKind::Intercepted;
    throw Error("unknown scenario kind '" + s + "' (expected honest|intercepted)");
}

inline std::string to_string(ScenarioKind k) { return k == ScenarioKind::Honest ? "honest" : "intercepted"; }

struct QkdScenario {
    DensityMatrix state;  // A-C view
    MeasurementSet measurements;
    ScenarioShape shape;
};

/// A-C view of the entanglement-based key exchange. Honest: one |Phi+> shared
/// by A and C. Intercepted: |Phi+> between A and B and another between B and C,
/// with B's two qubits traced out. Depolarizing noise acts on each pair.
inline QkdScenario qkd_scenario(ScenarioKind kind, double noise) {
    if (!(noise >= 0.0 && noise <= 1.0)) throw Error("invalid noise: must lie in [0,1]");
    const DensityMatrix pair = depolarize(bell_phi_plus(), noise);
    if (kind == ScenarioKind::Honest) {
        return {pair, bb84_measurements(2), kReducedShape};
    }
    // Qubit order A, B1, B2, C.
    const DensityMatrix chain = tensor(pair, pair);
    const std::array<int, 4> dims{2, 2, 2, 2};
    const std::array<bool, 4> keep{true, false, false, true};
    return {partial_trace(chain, dims, keep), bb84_measurements(2), kReducedShape};
}

} // namespace p3net
