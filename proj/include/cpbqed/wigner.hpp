// wigner.hpp — Wigner function of the cavity field on a rectangular grid
//
// Conventions: x = (a + a^dagger)/sqrt(2), p = (a - a^dagger)/(i sqrt(2)),
// integral of W over dx dp equals 1, vacuum peak W(0,0) = 1/pi.
//
// W(x,p) = (1/pi) sum_n (-1)^n <n|D^dagger(beta) rho D(beta)|n>,
// beta = (x + i p)/sqrt(2). The displaced-parity matrix elements are
// generated exactly (no truncation of the displacement) by the Laguerre
// three-term recurrence.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cpbqed/errors.hpp"
#include "cpbqed/hilbert.hpp"
#include "cpbqed/linalg.hpp"

namespace cpbqed {

struct GridSpec {
    double x_min = -5.0, x_max = 5.0;
    double p_min = -5.0, p_max = 5.0;
    std::size_t nx = 201, np = 201;

    static GridSpec centered(double half_width, std::size_t points) {
        return {-half_width, half_width, -half_width, half_width, points, points};
    }
    // +-(|alpha| sqrt 2 + 5), 201 x 201
    static GridSpec default_for(cplx alpha) { return centered(std::abs(alpha) * std::sqrt(2.0) + 5.0, 201); }

    void validate() const {
        if (nx < 2 || np < 2) throw ValidationError("Wigner grid needs at least 2 points per axis");
        if (!(x_max > x_min) || !(p_max > p_min)) throw ValidationError("Wigner grid bounds are empty");
    }
    double dx() const { return (x_max - x_min) / double(nx - 1); }
    double dp() const { return (p_max - p_min) / double(np - 1); }
    double x(std::size_t i) const { return x_min + double(i) * dx(); }
    double p(std::size_t j) const { return p_min + double(j) * dp(); }
};

struct WignerGrid {
    GridSpec spec;
    Eigen::MatrixXd values;  // values(i, j) = W(x_i, p_j)
    double normalization_defect = 0.0;
    double max_imag_residue = 0.0;
    bool truncation_warning = false;
    std::string warning;
};

struct WignerPoint {
    double value;
    double imag_residue;
};

// Single point; rho_f is the field density matrix in the Fock basis.
inline WignerPoint wigner_point(const Matrix& rho_f, double x, double p, std::vector<cplx>& work) {
    const Index d = rho_f.rows();
    work.assign(static_cast<std::size_t>(d), cplx{});
    const cplx a{x / std::sqrt(2.0), p / std::sqrt(2.0)};
    const cplx a2 = 2.0 * a, a2c = std::conj(a2);
    double re = 0.0, im = 0.0;
    auto diag = [&](Index m, cplx w) {
        const cplx z = rho_f(m, m) * w;
        re += z.real();
        im += z.imag();
    };
    auto offdiag = [&](Index m, Index n, cplx w) {
        const cplx z = rho_f(m, n) * w + rho_f(n, m) * std::conj(w);
        re += z.real();
        im += z.imag();
    };

    work[0] = std::exp(-2.0 * std::norm(a)) / pi;
    diag(0, work[0]);
    for (Index n = 1; n < d; ++n) {
        work[n] = a2 * work[n - 1] / std::sqrt(double(n));
        offdiag(0, n, work[n]);
    }
    for (Index m = 1; m < d; ++m) {
        const double sm = std::sqrt(double(m));
        cplx temp = work[m];
        work[m] = (a2c * temp - sm * work[m - 1]) / sm;
        diag(m, work[m]);
        for (Index n = m + 1; n < d; ++n) {
            const cplx next = (a2 * work[n - 1] - sm * temp) / std::sqrt(double(n));
            temp = work[n];
            work[n] = next;
            offdiag(m, n, work[n]);
        }
    }
    return {re, im};
}

inline WignerPoint wigner_point(const Matrix& rho_f, double x, double p) {
    std::vector<cplx> work;
    return wigner_point(rho_f, x, p, work);
}

inline WignerGrid wigner_from_fock(const Matrix& rho_f, const GridSpec& spec) {
    spec.validate();
    if (rho_f.rows() != rho_f.cols() || rho_f.rows() == 0) throw ValidationError("field density must be square");
    if (std::abs(rho_f.trace() - cplx{1.0}) > 1e-8) throw InvalidState("field density trace differs from 1");

    WignerGrid out;
    out.spec = spec;
    out.values.resize(static_cast<Index>(spec.nx), static_cast<Index>(spec.np));
    std::vector<cplx> work;
    double sum = 0.0;
    for (std::size_t i = 0; i < spec.nx; ++i) {
        for (std::size_t j = 0; j < spec.np; ++j) {
            const WignerPoint w = wigner_point(rho_f, spec.x(i), spec.p(j), work);
            out.values(static_cast<Index>(i), static_cast<Index>(j)) = w.value;
            out.max_imag_residue = std::max(out.max_imag_residue, std::abs(w.imag_residue));
            sum += w.value;
        }
    }
    if (out.max_imag_residue > 1e-10)
        throw InvalidState("Wigner imaginary residue " + std::to_string(out.max_imag_residue) +
                           " (field density not Hermitian)");
    out.normalization_defect = std::abs(sum * spec.dx() * spec.dp() - 1.0);

    // The recurrence is exact for the given matrix; what can go wrong is a
    // field state that already reaches the top of the truncation.
    const Index d = rho_f.rows();
    double edge = rho_f(d - 1, d - 1).real();
    if (d > 1) edge += rho_f(d - 2, d - 2).real();
    if (edge > 1e-8) {
        out.truncation_warning = true;
        out.warning = "field population " + std::to_string(edge) + " in the top two Fock levels";
    }
    return out;
}

// Field Wigner function of a composite qubit (x) field state.
inline WignerGrid field_wigner(const DensityMatrix& rho, const GridSpec& spec) {
    return wigner_from_fock(partial_trace(rho, Subsystem::field), spec);
}

// Sum of max(0, -W) dx dp
inline double negativity_volume(const WignerGrid& w) {
    return (-w.values.array()).cwiseMax(0.0).sum() * w.spec.dx() * w.spec.dp();
}

} // namespace cpbqed
