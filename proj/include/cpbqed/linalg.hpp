// linalg.hpp — dense complex matrix aliases and Hermitian helpers

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace cpbqed {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// cos(pi x) / sin(pi x), exact at multiples of 1/2.
inline double cos_pi(double x) {
    double r = std::fmod(x, 2.0);
    if (r < 0.0) r += 2.0;
    if (r == 0.0) return 1.0;
    if (r == 0.5 || r == 1.5) return 0.0;
    if (r == 1.0) return -1.0;
    return std::cos(pi * r);
}

inline double sin_pi(double x) {
    double r = std::fmod(x, 2.0);
    if (r < 0.0) r += 2.0;
    if (r == 0.0 || r == 1.0) return 0.0;
    if (r == 0.5) return 1.0;
    if (r == 1.5) return -1.0;
    return std::sin(pi * r);
}

inline double hermiticity_defect(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

// Groups of indices connected through nonzero off-diagonal entries.
// A Hermitian matrix is block diagonal over these groups, so its spectrum is
// the union of the group spectra.
inline std::vector<std::vector<Index>> support_components(const Matrix& m) {
    const Index n = m.rows();
    std::vector<Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < j; ++i) {
            if (m(i, j) != cplx{} || m(j, i) != cplx{}) {
                const Index a = find(i), b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    std::vector<std::vector<Index>> groups;
    std::vector<Index> slot(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i) {
        const Index root = find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<Index>(groups.size());
            groups.emplace_back();
        }
        groups[slot[root]].push_back(i);
    }
    return groups;
}

// Ascending eigenvalues of a Hermitian matrix (lower triangle is read).
inline RealVector hermitian_spectrum(const Matrix& m) {
    const Index n = m.rows();
    if (n == 0) return RealVector{};
    const auto groups = support_components(m);
    if (groups.size() == 1) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n));
    for (const auto& g : groups) {
        const Index k = static_cast<Index>(g.size());
        if (k == 1) {
            values.push_back(m(g[0], g[0]).real());
            continue;
        }
        Matrix sub(k, k);
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b) sub(a, b) = m(g[a], g[b]);
        Eigen::SelfAdjointEigenSolver<Matrix> es(sub, Eigen::EigenvaluesOnly);
        for (Index a = 0; a < k; ++a) values.push_back(es.eigenvalues()(a));
    }
    std::sort(values.begin(), values.end());
    return Eigen::Map<RealVector>(values.data(), n);
}

// -sum p ln p over eigenvalues clipped to [0, 1]; 0 ln 0 := 0.
inline double entropy_of_spectrum(const RealVector& eigenvalues) {
    double s = 0.0;
    for (double p : eigenvalues) {
        p = std::clamp(p, 0.0, 1.0);
        if (p > 0.0) s -= p * std::log(p);
    }
    return s;
}

} // namespace cpbqed
