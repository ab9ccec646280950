// measures.hpp — inversion, entropies, mutual information, tangle and concurrence

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cpbqed/errors.hpp"
#include "cpbqed/evolve.hpp"
#include "cpbqed/hilbert.hpp"
#include "cpbqed/linalg.hpp"

namespace cpbqed {

struct TimeSeries {
    std::string label;
    std::vector<double> times;  // lambda t
    std::vector<double> values;

    void validate() const {
        if (times.size() != values.size()) throw ValidationError("time series '" + label + "': size mismatch");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw ValidationError("time series '" + label + "': times not strictly increasing");
        for (double v : values)
            if (!std::isfinite(v)) throw ValidationError("time series '" + label + "': non-finite value");
    }
};

// Tr[rho (sigma_z (x) 1)]
inline double inversion(const Matrix& rho) {
    double s = 0.0;
    for (Index n = 0; n < rho.rows() / 2; ++n) s += rho(2 * n + 1, 2 * n + 1).real() - rho(2 * n, 2 * n).real();
    return s;
}

inline double inversion(const DensityMatrix& rho) { return inversion(rho.matrix()); }

inline double von_neumann_entropy_of(const RealVector& eigenvalues, double trace_tol = 1e-8) {
    if (eigenvalues.size() == 0) return 0.0;
    if (eigenvalues(0) < -1e-6)
        throw InvalidState("negative eigenvalue " + std::to_string(eigenvalues(0)) + " in entropy input");
    if (std::abs(eigenvalues.sum() - 1.0) > trace_tol)
        throw InvalidState("entropy input does not have unit trace");
    return entropy_of_spectrum(eigenvalues);
}

// -sum lambda ln lambda (natural log)
inline double von_neumann_entropy(const Matrix& reduced) { return von_neumann_entropy_of(hermitian_spectrum(reduced)); }

// S(rho_qubit) + S(rho_field) - S(rho). `spectrum` may carry a precomputed
// spectrum of rho.
inline double mutual_information(const DensityMatrix& rho, const RealVector* spectrum = nullptr) {
    const double s_joint = spectrum ? von_neumann_entropy_of(*spectrum) : von_neumann_entropy(rho.matrix());
    return von_neumann_entropy(partial_trace(rho, Subsystem::qubit)) +
           von_neumann_entropy(partial_trace(rho, Subsystem::field)) - s_joint;
}

// Tr[rho_qubit^2] of a pure composite state.
inline double qubit_marginal_purity(const Vector& psi) {
    double pg = 0.0, pe = 0.0;
    cplx c{};
    for (Index n = 0; n < psi.size() / 2; ++n) {
        const cplx g = psi(2 * n), e = psi(2 * n + 1);
        pg += std::norm(g);
        pe += std::norm(e);
        c += g * std::conj(e);
    }
    const double norm = pg + pe;
    pg /= norm;
    pe /= norm;
    return pg * pg + pe * pe + 2.0 * std::norm(c) / (norm * norm);
}

// 2 sum_i w_i (1 - Tr[(rho_a^(i))^2]) over the supplied pure-state ensemble.
// With the Kraus branches this is an upper bound on the convex-roof tangle,
// exact for a single pure branch.
inline double tangle(const std::vector<WeightedState>& branches) {
    double total = 0.0, s = 0.0;
    for (const auto& b : branches) {
        total += b.weight;
        s += b.weight * (1.0 - qubit_marginal_purity(b.state));
    }
    if (std::abs(total - 1.0) > 1e-8) throw InvalidState("tangle: branch weights do not sum to 1");
    return 2.0 * s;
}

inline double tangle(const BranchEnsemble& ensemble) { return tangle(ensemble.branches); }

// |00> = |g,n>, |01> = |e,n>, |10> = |g,n+1>, |11> = |e,n+1>, i.e. the
// contiguous composite indices 2n .. 2n+3.
struct EffectiveTwoQubitBasis {
    std::size_t n = 0;
    double projection_weight = 0.0;

    Index first_index() const { return static_cast<Index>(2 * n); }
};

inline EffectiveTwoQubitBasis effective_basis(const Matrix& rho) {
    const Index d = rho.rows() / 2;
    if (d < 2) throw ValidationError("effective two-qubit basis needs at least two Fock states");
    EffectiveTwoQubitBasis best{0, -1.0};
    for (Index n = 0; n + 1 < d; ++n) {
        double w = 0.0;
        for (Index i = 2 * n; i < 2 * n + 4; ++i) w += rho(i, i).real();
        if (w > best.projection_weight) best = {static_cast<std::size_t>(n), w};
    }
    return best;
}

inline EffectiveTwoQubitBasis effective_basis(const DensityMatrix& rho) { return effective_basis(rho.matrix()); }

// Wootters concurrence of a 4x4 two-qubit density matrix (unit trace).
inline double wootters_concurrence(const Eigen::Matrix4cd& rho) {
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Eigen::Matrix4cd flipped = yy * rho.conjugate() * yy;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
    const Eigen::Vector4d root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::Matrix4cd sqrt_rho = es.eigenvectors() * root.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    const Eigen::Matrix4cd r = sqrt_rho * flipped * sqrt_rho;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> er(Eigen::Matrix4cd(0.5 * (r + r.adjoint())),
                                                       Eigen::EigenvaluesOnly);
    Eigen::Vector4d l = er.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(l.data(), l.data() + 4, std::greater<>());
    return std::clamp(l(0) - l(1) - l(2) - l(3), 0.0, 1.0);
}

inline Eigen::Matrix4cd project_two_qubit(const Matrix& rho, const EffectiveTwoQubitBasis& basis) {
    const Index start = basis.first_index();
    if (start + 4 > rho.rows()) throw ValidationError("effective basis out of range");
    Eigen::Matrix4cd block = rho.block<4, 4>(start, start);
    const double w = block.trace().real();
    if (!(w > 1e-6)) throw NegligibleSupport("projection weight " + std::to_string(w) + " <= 1e-6");
    return block / w;
}

inline double concurrence(const Matrix& rho, const EffectiveTwoQubitBasis& basis) {
    if (!(basis.projection_weight > 1e-6))
        throw NegligibleSupport("projection weight " + std::to_string(basis.projection_weight) + " <= 1e-6");
    return wootters_concurrence(project_two_qubit(rho, basis));
}

inline double concurrence(const DensityMatrix& rho, const EffectiveTwoQubitBasis& basis) {
    return concurrence(rho.matrix(), basis);
}

} // namespace cpbqed
