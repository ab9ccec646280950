// model.hpp — Cooper-pair box / cavity Hamiltonian and its excitation-block eigensystem
//
// H = w (n + 1/2)
//   + [E/2 - E_J0 sin(2 xi) cos(pi Phi_e/Phi_0) f(n)] sigma_z
//   + cos(2 xi) E_J0 [a^k g_k(n) sigma_+ + h.c.]
//
// hbar = 1; energies in units of hbar*lambda, times in units of 1/lambda.
// The interaction only couples |e,n> with |g,n+k>, so H splits into 2x2
// blocks plus a few uncoupled states at the edges of the truncation.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cpbqed/errors.hpp"
#include "cpbqed/hilbert.hpp"
#include "cpbqed/linalg.hpp"

namespace cpbqed {

enum class CouplingOrdering {
    printed,         // a^k g_k(n): <e,n|H|g,n+k> carries g_k(n+k)
    coupling_first,  // g_k(n) a^k: <e,n|H|g,n+k> carries g_k(n)
};

struct ModelParams {
    double omega = 1.0;                        // cavity frequency
    std::optional<double> qubit_splitting;     // E; k * omega (resonance) when unset
    double josephson_energy = 1.0;             // E_J0
    double mixing_angle = pi / 2;              // xi
    double flux_amplitude = 0.1;               // phi = pi |Phi_lambda| / Phi_0
    double flux_ratio = 0.5;                   // Phi_e / Phi_0
    int photon_order = 1;                      // k
    double gamma = 0.0;                        // intrinsic decoherence rate
    int series_order = 3;                      // retained terms of g_k and f (capped at the printed count)
    CouplingOrdering ordering = CouplingOrdering::printed;

    double splitting() const { return qubit_splitting.value_or(photon_order * omega); }

    void validate() const {
        if (photon_order < 1 || photon_order > 3)
            throw UnsupportedOrder("photon process order k=" + std::to_string(photon_order) +
                                   " not supported (k in {1,2,3})");
        if (!(flux_amplitude > 0.0 && flux_amplitude < 1.0))
            throw ValidationError("flux amplitude phi must lie in (0, 1)");
        if (!(gamma >= 0.0)) throw ValidationError("gamma must be nonnegative");
        if (series_order < 1 || series_order > 3)
            throw ValidationError("series_order must be 1, 2 or 3 (only the printed terms are defined)");
        if (!std::isfinite(omega) || !std::isfinite(splitting()) || !std::isfinite(josephson_energy) ||
            !std::isfinite(mixing_angle) || !std::isfinite(flux_ratio))
            throw ValidationError("model parameters must be finite");
    }
};

namespace detail {

inline double partial_sum(const std::vector<double>& terms, int order) {
    double s = 0.0;
    const std::size_t n = std::min<std::size_t>(terms.size(), static_cast<std::size_t>(order));
    for (std::size_t i = 0; i < n; ++i) s += terms[i];
    return s;
}

} // namespace detail

// k-photon coupling g_k(n), truncated to series_order terms.
inline double coupling_g(const ModelParams& p, double n) {
    const double f = p.flux_amplitude;
    const double f2 = f * f, f3 = f2 * f, f4 = f2 * f2, f5 = f4 * f;
    switch (p.photon_order) {
    case 1:
        return sin_pi(p.flux_ratio) *
               detail::partial_sum({f, -f3 * n / 2.0, f5 * (2.0 * n * n + 1.0) / 24.0}, p.series_order);
    case 2:
        return cos_pi(p.flux_ratio) *
               detail::partial_sum({f2 / 2.0, -2.0 * f4 * (2.0 * n - 1.0) / 24.0}, p.series_order);
    case 3:
        return sin_pi(p.flux_ratio) *
               detail::partial_sum({-f3 / 6.0, 5.0 * f5 * (n - 1.0) / 120.0}, p.series_order);
    default:
        throw UnsupportedOrder("photon process order k=" + std::to_string(p.photon_order) + " not supported");
    }
}

// Intensity-dependent Stark function f(n).
inline double stark_f(const ModelParams& p, double n) {
    const double f2 = p.flux_amplitude * p.flux_amplitude, f4 = f2 * f2;
    return detail::partial_sum({f2 * (2.0 * n + 1.0) / 2.0, -3.0 * f4 * (2.0 * n * n + 2.0 * n + 1.0) / 24.0},
                               p.series_order);
}

struct DeviceParams {
    double charging_energy = 0.0;  // E_c
    double gate_charge = 0.0;      // C_g V_g / e
    int level_index = 0;           // n in the epsilon formula
    double josephson = 0.0;        // E_J

    double epsilon() const { return 2.0 * charging_energy * (gate_charge - (2.0 * level_index + 1.0)); }
};

// xi = 1/2 atan(E_J / 2 eps), principal branch; the degeneracy point maps to pi/4.
inline double derive_mixing_angle(const DeviceParams& dev) {
    const double eps = dev.epsilon();
    if (!std::isfinite(eps)) throw ValidationError("epsilon is not finite");
    if (eps == 0.0) {
        if (dev.josephson == 0.0) throw DegenerateError("mixing angle undefined for E_J = 0 and epsilon = 0");
        return pi / 4;
    }
    return 0.5 * std::atan(dev.josephson / (2.0 * eps));
}

// <q,n|H|q,n>
inline double diagonal_energy(const ModelParams& p, Qubit q, std::size_t n) {
    const double nd = static_cast<double>(n);
    const double sz = q == Qubit::e ? 1.0 : -1.0;
    const double stark = p.josephson_energy * std::sin(2.0 * p.mixing_angle) * cos_pi(p.flux_ratio) * stark_f(p, nd);
    return p.omega * (nd + 0.5) + sz * (0.5 * p.splitting() - stark);
}

// <e,n|H|g,n+k>
inline double block_coupling(const ModelParams& p, std::size_t n) {
    const int k = p.photon_order;
    double lowering = 1.0;  // sqrt((n+k)! / n!)
    for (int j = 1; j <= k; ++j) lowering *= std::sqrt(static_cast<double>(n + j));
    const double arg = p.ordering == CouplingOrdering::printed ? double(n + k) : double(n);
    return std::cos(2.0 * p.mixing_angle) * p.josephson_energy * coupling_g(p, arg) * lowering;
}

inline Matrix build_hamiltonian(const ModelParams& p, const FockBasis& basis) {
    p.validate();
    const std::size_t d = basis.dim();
    const std::size_t k = static_cast<std::size_t>(p.photon_order);
    if (d < k + 1) throw ValidationError("Fock dimension must be at least k + 1");
    Matrix h = Matrix::Zero(basis.composite_dim(), basis.composite_dim());
    for (std::size_t n = 0; n < d; ++n) {
        h(CompositeIndex{Qubit::g, n}.flat(), CompositeIndex{Qubit::g, n}.flat()) = diagonal_energy(p, Qubit::g, n);
        h(CompositeIndex{Qubit::e, n}.flat(), CompositeIndex{Qubit::e, n}.flat()) = diagonal_energy(p, Qubit::e, n);
    }
    for (std::size_t n = 0; n + k < d; ++n) {
        const Index e = CompositeIndex{Qubit::e, n}.flat();
        const Index g = CompositeIndex{Qubit::g, n + k}.flat();
        const double c = block_coupling(p, n);
        h(e, g) = c;
        h(g, e) = c;
    }
    return h;
}

// One invariant pair {|e,n>, |g,n+k>}. Column j of `rotation` is the
// eigenvector with energy energies[j], written in the (|e,n>, |g,n+k>) basis.
// Eigenvector 0 lives in the excited slot, eigenvector 1 in the ground slot.
struct ExcitationBlock {
    std::size_t photon = 0;
    Index excited_slot = 0;
    Index ground_slot = 0;
    std::array<double, 2> energies{};
    Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
};

struct UncoupledState {
    CompositeIndex state;
    double energy = 0.0;
};

// Exact eigensystem of H assembled from 2x2 blocks. Eigenvectors are indexed
// by the composite slots they occupy, so the bare <-> eigen transform is a
// block-sparse real rotation.
class BlockEigensystem {
  public:
    BlockEigensystem() = default;
    BlockEigensystem(Index dimension, std::vector<ExcitationBlock> blocks, std::vector<UncoupledState> uncoupled)
        : dimension_(dimension), blocks_(std::move(blocks)), uncoupled_(std::move(uncoupled)) {
        energies_ = RealVector::Zero(dimension_);
        partner_.assign(static_cast<std::size_t>(dimension_), -1);
        coeff_.assign(static_cast<std::size_t>(dimension_), {1.0, 0.0});
        for (const auto& b : blocks_) {
            energies_(b.excited_slot) = b.energies[0];
            energies_(b.ground_slot) = b.energies[1];
            partner_[b.excited_slot] = b.ground_slot;
            partner_[b.ground_slot] = b.excited_slot;
            // eigenvector at slot s = self * |s> + other * |partner(s)>
            coeff_[b.excited_slot] = {b.rotation(0, 0), b.rotation(1, 0)};
            coeff_[b.ground_slot] = {b.rotation(1, 1), b.rotation(0, 1)};
        }
        for (const auto& u : uncoupled_) energies_(u.state.flat()) = u.energy;
    }

    Index dimension() const { return dimension_; }
    std::size_t fock_dim() const { return static_cast<std::size_t>(dimension_ / 2); }
    const std::vector<ExcitationBlock>& blocks() const { return blocks_; }
    const std::vector<UncoupledState>& uncoupled() const { return uncoupled_; }
    const RealVector& energies() const { return energies_; }
    double spectral_radius() const { return energies_.size() ? energies_.cwiseAbs().maxCoeff() : 0.0; }

    // Slot paired with s inside its block, or -1.
    Index partner(Index s) const { return partner_[static_cast<std::size_t>(s)]; }
    // (self, partner) components of the eigenvector stored at slot s.
    std::array<double, 2> components(Index s) const { return coeff_[static_cast<std::size_t>(s)]; }

    // Columns are the eigenvectors.
    Matrix unitary() const {
        Matrix u = Matrix::Zero(dimension_, dimension_);
        for (Index s = 0; s < dimension_; ++s) {
            const auto c = components(s);
            u(s, s) = c[0];
            if (partner(s) >= 0) u(partner(s), s) = c[1];
        }
        return u;
    }

    // U^dagger M U
    Matrix to_eigenbasis(const Matrix& m) const {
        Matrix out = m;
        for (const auto& b : blocks_) rotate_rows(out, b, true);
        for (const auto& b : blocks_) rotate_cols(out, b, false);
        return out;
    }

    // U M U^dagger
    Matrix from_eigenbasis(const Matrix& m) const {
        Matrix out = m;
        for (const auto& b : blocks_) rotate_rows(out, b, false);
        for (const auto& b : blocks_) rotate_cols(out, b, true);
        return out;
    }

    Vector to_eigenbasis(const Vector& v) const {
        Vector out = v;
        for (const auto& b : blocks_) {
            const cplx x = v(b.excited_slot), y = v(b.ground_slot);
            out(b.excited_slot) = b.rotation(0, 0) * x + b.rotation(1, 0) * y;
            out(b.ground_slot) = b.rotation(0, 1) * x + b.rotation(1, 1) * y;
        }
        return out;
    }

    Vector from_eigenbasis(const Vector& v) const {
        Vector out = v;
        for (const auto& b : blocks_) {
            const cplx x = v(b.excited_slot), y = v(b.ground_slot);
            out(b.excited_slot) = b.rotation(0, 0) * x + b.rotation(0, 1) * y;
            out(b.ground_slot) = b.rotation(1, 0) * x + b.rotation(1, 1) * y;
        }
        return out;
    }

    // U diag(E) U^dagger
    Matrix reassemble() const {
        Matrix d = Matrix::Zero(dimension_, dimension_);
        d.diagonal() = energies_.cast<cplx>();
        return from_eigenbasis(d);
    }

  private:
    // rows (e, g) <- R^T (e, g) when transpose, else R (e, g)
    static void rotate_rows(Matrix& m, const ExcitationBlock& b, bool transpose) {
        const Eigen::Matrix2d r = transpose ? Eigen::Matrix2d(b.rotation.transpose()) : b.rotation;
        for (Index c = 0; c < m.cols(); ++c) {
            const cplx x = m(b.excited_slot, c), y = m(b.ground_slot, c);
            m(b.excited_slot, c) = r(0, 0) * x + r(0, 1) * y;
            m(b.ground_slot, c) = r(1, 0) * x + r(1, 1) * y;
        }
    }
    // cols (e, g) <- (e, g) R when !transpose, else (e, g) R^T
    static void rotate_cols(Matrix& m, const ExcitationBlock& b, bool transpose) {
        const Eigen::Matrix2d r = transpose ? Eigen::Matrix2d(b.rotation.transpose()) : b.rotation;
        for (Index row = 0; row < m.rows(); ++row) {
            const cplx x = m(row, b.excited_slot), y = m(row, b.ground_slot);
            m(row, b.excited_slot) = x * r(0, 0) + y * r(1, 0);
            m(row, b.ground_slot) = x * r(0, 1) + y * r(1, 1);
        }
    }

    Index dimension_ = 0;
    std::vector<ExcitationBlock> blocks_;
    std::vector<UncoupledState> uncoupled_;
    RealVector energies_;
    std::vector<Index> partner_;
    std::vector<std::array<double, 2>> coeff_;
};

// Analytic diagonalization of [[a, c], [c, b]]:
// E = mean +- sqrt(delta^2 + c^2), rotation angle 1/2 atan2(c, delta).
inline ExcitationBlock diagonalize_block(std::size_t n, Index excited_slot, Index ground_slot, double a, double b,
                                         double c) {
    ExcitationBlock blk;
    blk.photon = n;
    blk.excited_slot = excited_slot;
    blk.ground_slot = ground_slot;
    if (c == 0.0) {
        blk.energies = {a, b};
        return blk;
    }
    const double mean = 0.5 * (a + b), delta = 0.5 * (a - b);
    const double r = std::hypot(delta, c);
    const double angle = 0.5 * std::atan2(c, delta);
    const double cs = std::cos(angle), sn = std::sin(angle);
    blk.energies = {mean + r, mean - r};
    blk.rotation << cs, -sn, sn, cs;
    return blk;
}

inline BlockEigensystem block_eigensystem(const ModelParams& p, const FockBasis& basis) {
    p.validate();
    const std::size_t d = basis.dim();
    const std::size_t k = static_cast<std::size_t>(p.photon_order);
    if (d < k + 1) throw ValidationError("Fock dimension must be at least k + 1");
    std::vector<ExcitationBlock> blocks;
    std::vector<UncoupledState> uncoupled;
    blocks.reserve(d - k);
    for (std::size_t n = 0; n + k < d; ++n) {
        const CompositeIndex e{Qubit::e, n}, g{Qubit::g, n + k};
        blocks.push_back(diagonalize_block(n, e.flat(), g.flat(), diagonal_energy(p, Qubit::e, n),
                                           diagonal_energy(p, Qubit::g, n + k), block_coupling(p, n)));
    }
    for (std::size_t m = 0; m < k; ++m) uncoupled.push_back({{Qubit::g, m}, diagonal_energy(p, Qubit::g, m)});
    for (std::size_t n = d - k; n < d; ++n) uncoupled.push_back({{Qubit::e, n}, diagonal_energy(p, Qubit::e, n)});
    return BlockEigensystem(basis.composite_dim(), std::move(blocks), std::move(uncoupled));
}

} // namespace cpbqed
