// hilbert.hpp — Fock truncation, qubit (x) field indexing and initial states
//
// Composite basis ordering: the qubit index varies fastest,
//   flat = 2 * photon + (qubit == e ? 1 : 0)
// so |g,n> = 2n and |e,n> = 2n + 1. Two-level matrices are stored in the same
// (g, e) order.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cpbqed/errors.hpp"
#include "cpbqed/linalg.hpp"

namespace cpbqed {

inline constexpr double kTruncationTailBound = 1e-12;

class FockBasis {
  public:
    explicit FockBasis(std::size_t dim) : dim_(dim) {
        if (dim == 0) throw ValidationError("FockBasis: dim must be positive");
    }
    std::size_t dim() const { return dim_; }
    Index composite_dim() const { return static_cast<Index>(2 * dim_); }
    friend bool operator==(const FockBasis&, const FockBasis&) = default;

  private:
    std::size_t dim_;
};

enum class Qubit { g = 0, e = 1 };

struct CompositeIndex {
    Qubit qubit = Qubit::g;
    std::size_t photon = 0;

    Index flat() const { return static_cast<Index>(2 * photon + (qubit == Qubit::e ? 1 : 0)); }
    static CompositeIndex from_flat(Index flat) {
        return {flat % 2 == 1 ? Qubit::e : Qubit::g, static_cast<std::size_t>(flat / 2)};
    }
    friend bool operator==(const CompositeIndex&, const CompositeIndex&) = default;
};

struct QubitStateSpec {
    enum class Kind { mixed_diagonal, pure_superposition };

    Kind kind = Kind::mixed_diagonal;
    double theta = 0.0;

    // rho_A = cos^2(theta)|e><e| + sin^2(theta)|g><g|
    static QubitStateSpec mixed(double theta) { return {Kind::mixed_diagonal, theta}; }
    // Same, parametrized by the excited weight s1 = cos^2(theta).
    static QubitStateSpec mixed_with_excited_weight(double s1) {
        if (!(s1 >= 0.0 && s1 <= 1.0)) throw ValidationError("excited weight must lie in [0, 1]");
        return {Kind::mixed_diagonal, std::acos(std::sqrt(s1))};
    }
    // |psi> = cos(theta/2)|e> + sin(theta/2)|g>
    static QubitStateSpec pure(double theta) { return {Kind::pure_superposition, theta}; }

    bool is_pure() const { return kind == Kind::pure_superposition; }
    double excited_weight() const {
        return is_pure() ? std::pow(std::cos(theta / 2), 2) : std::pow(std::cos(theta), 2);
    }

    // 2x2 density matrix in (g, e) order.
    Matrix density() const {
        Matrix rho = Matrix::Zero(2, 2);
        if (is_pure()) {
            const Eigen::Vector2cd psi = amplitudes();
            rho = psi * psi.adjoint();
        } else {
            const double c = std::cos(theta), s = std::sin(theta);
            rho(0, 0) = s * s;
            rho(1, 1) = c * c;
        }
        return rho;
    }

    // Amplitudes (g, e) of the pure superposition.
    Eigen::Vector2cd amplitudes() const {
        return {std::sin(theta / 2), std::cos(theta / 2)};
    }
};

struct FieldStateSpec {
    enum class Kind { coherent, thermal, fock };

    Kind kind = Kind::coherent;
    cplx alpha{};
    double nbar = 0.0;
    std::size_t n = 0;

    static FieldStateSpec coherent(cplx alpha) { return {Kind::coherent, alpha, 0.0, 0}; }
    static FieldStateSpec coherent_with_mean(double nbar) {
        if (!(nbar >= 0.0)) throw ValidationError("coherent mean photon number must be nonnegative");
        return coherent(cplx{std::sqrt(nbar), 0.0});
    }
    static FieldStateSpec thermal(double nbar) {
        if (!(nbar >= 0.0)) throw ValidationError("thermal occupation must be nonnegative");
        return {Kind::thermal, {}, nbar, 0};
    }
    static FieldStateSpec fock(std::size_t n) { return {Kind::fock, {}, 0.0, n}; }

    bool is_pure() const { return kind != Kind::thermal; }
    double mean_photons() const {
        switch (kind) {
        case Kind::coherent: return std::norm(alpha);
        case Kind::thermal: return nbar;
        case Kind::fock: return static_cast<double>(n);
        }
        return 0.0;
    }
};

// b_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n < dim, by forward recurrence.
inline Vector coherent_amplitudes(cplx alpha, std::size_t dim) {
    Vector b(static_cast<Index>(dim));
    const double b0 = std::exp(-0.5 * std::norm(alpha));
    if (b0 == 0.0) throw ValidationError("coherent amplitude too large (|alpha|^2 > ~1400)");
    b(0) = b0;
    for (std::size_t n = 0; n + 1 < dim; ++n)
        b(static_cast<Index>(n + 1)) = b(static_cast<Index>(n)) * alpha / std::sqrt(double(n + 1));
    return b;
}

// p_n = nbar^n / (1 + nbar)^{n+1}
inline RealVector thermal_populations(double nbar, std::size_t dim) {
    RealVector p(static_cast<Index>(dim));
    const double ratio = nbar / (1.0 + nbar);
    p(0) = 1.0 / (1.0 + nbar);
    for (Index n = 1; n < static_cast<Index>(dim); ++n) p(n) = p(n - 1) * ratio;
    return p;
}

// Probability mass of fs on photon numbers >= dim.
inline double truncation_tail(const FieldStateSpec& fs, std::size_t dim) {
    switch (fs.kind) {
    case FieldStateSpec::Kind::fock: return fs.n >= dim ? 1.0 : 0.0;
    case FieldStateSpec::Kind::thermal:
        return std::pow(fs.nbar / (1.0 + fs.nbar), static_cast<double>(dim));
    case FieldStateSpec::Kind::coherent: {
        const double mean = std::norm(fs.alpha);
        // |b_n|^2 is a Poisson pmf; walk it in log space past dim.
        double tail = 0.0;
        for (std::size_t n = dim;; ++n) {
            const double logp = -mean + (mean > 0.0 ? double(n) * std::log(mean) : (n == 0 ? 0.0 : -INFINITY)) -
                                std::lgamma(double(n) + 1.0);
            const double term = std::exp(logp);
            tail += term;
            if (double(n) > mean && (term < 1e-30 || term < 1e-18 * tail)) break;
            if (n > dim + 1000000) break;
        }
        return tail;
    }
    }
    return 0.0;
}

// ceil(nbar + 10 sqrt(nbar) + 20), grown until the tail bound holds, and at
// least k + 1 (or fock n + 1).
inline FockBasis default_basis(const FieldStateSpec& fs, int photon_order = 1) {
    const double mean = fs.mean_photons();
    std::size_t dim = static_cast<std::size_t>(std::ceil(mean + 10.0 * std::sqrt(mean) + 20.0));
    dim = std::max<std::size_t>(dim, static_cast<std::size_t>(photon_order) + 1);
    if (fs.kind == FieldStateSpec::Kind::fock) dim = std::max(dim, fs.n + 1);
    while (truncation_tail(fs, dim) >= kTruncationTailBound) ++dim;
    return FockBasis(dim);
}

// A[n-1, n] = sqrt(n)
inline Matrix make_annihilation(const FockBasis& basis) {
    const Index d = static_cast<Index>(basis.dim());
    Matrix a = Matrix::Zero(d, d);
    for (Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

// Field density matrix on the truncated basis. Not renormalized: the retained
// amplitudes never depend on dim.
inline Matrix field_density(const FieldStateSpec& fs, const FockBasis& basis) {
    const double tail = truncation_tail(fs, basis.dim());
    if (tail >= kTruncationTailBound)
        throw TruncationError("field truncation tail " + std::to_string(tail) + " at dim " +
                              std::to_string(basis.dim()) + " exceeds 1e-12");
    const Index d = static_cast<Index>(basis.dim());
    switch (fs.kind) {
    case FieldStateSpec::Kind::coherent: {
        const Vector b = coherent_amplitudes(fs.alpha, basis.dim());
        return b * b.adjoint();
    }
    case FieldStateSpec::Kind::thermal: {
        Matrix rho = Matrix::Zero(d, d);
        rho.diagonal() = thermal_populations(fs.nbar, basis.dim()).cast<cplx>();
        return rho;
    }
    case FieldStateSpec::Kind::fock: {
        Matrix rho = Matrix::Zero(d, d);
        rho(static_cast<Index>(fs.n), static_cast<Index>(fs.n)) = 1.0;
        return rho;
    }
    }
    return {};
}

// Field state vector (pure specs only).
inline Vector field_amplitudes(const FieldStateSpec& fs, const FockBasis& basis) {
    if (!fs.is_pure()) throw ValidationError("thermal field has no state vector");
    const double tail = truncation_tail(fs, basis.dim());
    if (tail >= kTruncationTailBound)
        throw TruncationError("field truncation tail exceeds 1e-12 at dim " + std::to_string(basis.dim()));
    if (fs.kind == FieldStateSpec::Kind::coherent) return coherent_amplitudes(fs.alpha, basis.dim());
    Vector v = Vector::Zero(static_cast<Index>(basis.dim()));
    v(static_cast<Index>(fs.n)) = 1.0;
    return v;
}

// rho[2n+q, 2m+q'] = field[n, m] * qubit[q, q']
inline Matrix kron_field_qubit(const Matrix& field, const Matrix& qubit) {
    const Index d = field.rows();
    Matrix out(2 * d, 2 * d);
    for (Index m = 0; m < d; ++m)
        for (Index n = 0; n < d; ++n) out.block<2, 2>(2 * n, 2 * m) = field(n, m) * qubit;
    return out;
}

inline Vector kron_field_qubit(const Vector& field, const Eigen::Vector2cd& qubit) {
    const Index d = field.size();
    Vector out(2 * d);
    for (Index n = 0; n < d; ++n) out.segment<2>(2 * n) = field(n) * qubit;
    return out;
}

struct InvariantReport {
    double trace_defect = 0.0;
    double hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;

    bool ok(double trace_tol = 1e-10, double herm_tol = 1e-12, double eig_floor = -1e-9) const {
        return trace_defect <= trace_tol && hermiticity_defect <= herm_tol && min_eigenvalue >= eig_floor;
    }
};

// Dense qubit (x) field density matrix. Construction only checks the shape;
// check() reports the physical invariants.
class DensityMatrix {
  public:
    DensityMatrix() = default;
    explicit DensityMatrix(Matrix entries) : m_(std::move(entries)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0 || m_.rows() % 2 != 0)
            throw ValidationError("DensityMatrix must be square with even nonzero dimension");
    }

    const Matrix& matrix() const { return m_; }
    Index size() const { return m_.rows(); }
    std::size_t fock_dim() const { return static_cast<std::size_t>(m_.rows() / 2); }
    cplx operator()(Index i, Index j) const { return m_(i, j); }

    double trace_defect() const { return std::abs(m_.trace() - cplx{1.0}); }
    double hermiticity_defect() const { return cpbqed::hermiticity_defect(m_); }
    RealVector spectrum() const { return hermitian_spectrum(m_); }
    double min_eigenvalue() const { return spectrum()(0); }
    double purity() const { return (m_ * m_).trace().real(); }

    InvariantReport check() const { return check(spectrum()); }
    InvariantReport check(const RealVector& spectrum) const {
        return {trace_defect(), hermiticity_defect(), spectrum.size() ? spectrum(0) : 0.0};
    }

  private:
    Matrix m_;
};

// rho_A(0) (x) rho_F(0)
inline DensityMatrix make_initial_state(const QubitStateSpec& qs, const FieldStateSpec& fs,
                                        const FockBasis& basis) {
    return DensityMatrix(kron_field_qubit(field_density(fs, basis), qs.density()));
}

struct WeightedState {
    double weight = 0.0;
    Vector state;
};

// Initial state as a weighted mixture of product pure states; requires a pure
// field. Zero-weight components are dropped.
inline std::vector<WeightedState> pure_decomposition(const QubitStateSpec& qs, const FieldStateSpec& fs,
                                                     const FockBasis& basis) {
    const Vector field = field_amplitudes(fs, basis);
    std::vector<WeightedState> out;
    if (qs.is_pure()) {
        out.push_back({1.0, kron_field_qubit(field, qs.amplitudes())});
        return out;
    }
    const double s1 = std::pow(std::cos(qs.theta), 2), s2 = std::pow(std::sin(qs.theta), 2);
    if (s1 > 0.0) out.push_back({s1, kron_field_qubit(field, Eigen::Vector2cd{0.0, 1.0})});
    if (s2 > 0.0) out.push_back({s2, kron_field_qubit(field, Eigen::Vector2cd{1.0, 0.0})});
    return out;
}

enum class Subsystem { qubit, field };

inline Matrix partial_trace(const Matrix& rho, Subsystem keep) {
    const Index d = rho.rows() / 2;
    if (keep == Subsystem::qubit) {
        Matrix out = Matrix::Zero(2, 2);
        for (Index n = 0; n < d; ++n) out += rho.block<2, 2>(2 * n, 2 * n);
        return out;
    }
    Matrix out(d, d);
    for (Index m = 0; m < d; ++m)
        for (Index n = 0; n < d; ++n) out(n, m) = rho(2 * n, 2 * m) + rho(2 * n + 1, 2 * m + 1);
    return out;
}

inline Matrix partial_trace(const DensityMatrix& rho, Subsystem keep) { return partial_trace(rho.matrix(), keep); }

} // namespace cpbqed
