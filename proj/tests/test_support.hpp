// test_support.hpp — shared helpers for the unit tests: random states, dense reference propagation

#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "cpbqed/linalg.hpp"

namespace cpbqed::testing {

// Random density matrix rho = G G^dagger / Tr, G with Gaussian entries.
inline Matrix random_density(Index n, std::mt19937_64& rng, Index rank = -1) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (rank <= 0) rank = n;
    Matrix g(n, rank);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < rank; ++j) g(i, j) = cplx{gauss(rng), gauss(rng)};
    Matrix rho = g * g.adjoint();
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

inline Vector random_unit_vector(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = cplx{gauss(rng), gauss(rng)};
    return v.normalized();
}

// Reference solution from a dense eigendecomposition of H, written
// independently of the block eigensystem.
inline Matrix dense_milburn(const Matrix& h, const Matrix& rho0, double gamma, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Matrix& u = es.eigenvectors();
    const Eigen::VectorXd& e = es.eigenvalues();
    Matrix m = u.adjoint() * rho0 * u;
    for (Index j = 0; j < m.rows(); ++j)
        for (Index l = 0; l < m.cols(); ++l) {
            const double w = e(j) - e(l);
            m(j, l) *= std::exp(cplx{-0.5 * gamma * w * w * t, -w * t});
        }
    return u * m * u.adjoint();
}

} // namespace cpbqed::testing
