// test_model.cpp — series couplings, mixing angle, Hamiltonian elements and the block eigensystem

#include <algorithm>
#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"

#include "cpbqed/model.hpp"

using namespace cpbqed;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ModelParams params_k(int k, double flux_ratio = 0.5) {
    ModelParams p;
    p.photon_order = k;
    p.flux_ratio = flux_ratio;
    return p;
}

} // namespace

TEST_CASE("k = 1 coupling series", "[model]") {
    ModelParams p;
    const double phi = 0.1;
    // Term by term at n = 0 and n = 25.
    CHECK_THAT(coupling_g(p, 0.0), WithinRel(phi + std::pow(phi, 5) / 24.0, 1e-14));
    CHECK_THAT(coupling_g(p, 0.0), WithinAbs(0.100000417, 1e-9));
    const double n = 25.0;
    const double full = phi - std::pow(phi, 3) * n / 2.0 + std::pow(phi, 5) * (2.0 * n * n + 1.0) / 24.0;
    CHECK_THAT(coupling_g(p, n), WithinRel(full, 1e-14));
    p.series_order = 1;
    CHECK(coupling_g(p, n) == phi);
    p.series_order = 2;
    CHECK_THAT(coupling_g(p, n), WithinRel(phi - std::pow(phi, 3) * n / 2.0, 1e-14));

    p.series_order = 3;
    p.flux_ratio = 0.3;
    CHECK_THAT(coupling_g(p, n), WithinRel(std::sin(pi * 0.3) * full, 1e-13));
    p.flux_ratio = 1.0;
    CHECK(coupling_g(p, n) == 0.0);
}

TEST_CASE("k = 2 and k = 3 coupling series", "[model]") {
    const double phi = 0.1, n = 4.0;
    const ModelParams p2 = params_k(2, 0.25);
    CHECK_THAT(coupling_g(p2, n),
               WithinRel(std::cos(pi * 0.25) * (phi * phi / 2.0 - 2.0 * std::pow(phi, 4) * (2.0 * n - 1.0) / 24.0), 1e-13));
    CHECK(coupling_g(params_k(2, 0.5), n) == 0.0);

    const ModelParams p3 = params_k(3, 0.25);
    CHECK_THAT(coupling_g(p3, n),
               WithinRel(std::sin(pi * 0.25) * (-std::pow(phi, 3) / 6.0 + 5.0 * std::pow(phi, 5) * (n - 1.0) / 120.0), 1e-13));

    // series_order above the printed count keeps every printed term.
    ModelParams p2b = params_k(2, 0.25);
    p2b.series_order = 3;
    CHECK(coupling_g(p2b, n) == coupling_g(p2, n));
}

TEST_CASE("Stark function", "[model]") {
    ModelParams p;
    CHECK_THAT(stark_f(p, 0.0), WithinAbs(0.0049875, 1e-15));
    const double phi2 = 0.01, n = 7.0;
    CHECK_THAT(stark_f(p, n),
               WithinRel(phi2 * (2.0 * n + 1.0) / 2.0 - 3.0 * phi2 * phi2 * (2.0 * n * n + 2.0 * n + 1.0) / 24.0, 1e-14));
    p.series_order = 1;
    CHECK_THAT(stark_f(p, n), WithinRel(phi2 * (2.0 * n + 1.0) / 2.0, 1e-14));
}

TEST_CASE("parameter validation", "[model]") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.photon_order = 4;
    CHECK_THROWS_AS(p.validate(), UnsupportedOrder);
    p.photon_order = 0;
    CHECK_THROWS_AS(p.validate(), UnsupportedOrder);
    p = ModelParams{};
    p.series_order = 4;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = ModelParams{};
    p.flux_amplitude = 1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = ModelParams{};
    p.gamma = -0.1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    CHECK_THROWS_AS(build_hamiltonian(ModelParams{}, FockBasis(1)), ValidationError);
}

TEST_CASE("mixing angle from device parameters", "[model]") {
    DeviceParams dev{1.0, 2.0, 0, 0.5};  // eps = 2 (2 - 1) = 2
    CHECK_THAT(dev.epsilon(), WithinAbs(2.0, 1e-15));
    CHECK_THAT(derive_mixing_angle(dev), WithinRel(0.5 * std::atan(0.5 / 4.0), 1e-14));
    dev.gate_charge = 1.0;  // degeneracy point
    CHECK_THAT(derive_mixing_angle(dev), WithinAbs(pi / 4, 1e-15));
    dev.josephson = 0.0;
    CHECK_THROWS_AS(derive_mixing_angle(dev), DegenerateError);
}

TEST_CASE("Hamiltonian elements", "[model]") {
    ModelParams p;
    p.mixing_angle = pi / 3;
    p.flux_ratio = 0.3;
    p.omega = 1.3;
    p.qubit_splitting = 1.1;
    const FockBasis basis(6);
    const Matrix h = build_hamiltonian(p, basis);
    CHECK(hermiticity_defect(h) == 0.0);

    for (std::size_t n = 0; n < 6; ++n) {
        const double stark = std::sin(2.0 * p.mixing_angle) * std::cos(pi * 0.3) *
                             (0.01 * (2.0 * n + 1.0) / 2.0 - 3e-4 * (2.0 * n * n + 2.0 * n + 1.0) / 24.0);
        const double e = h(CompositeIndex{Qubit::e, n}.flat(), CompositeIndex{Qubit::e, n}.flat()).real();
        const double g = h(CompositeIndex{Qubit::g, n}.flat(), CompositeIndex{Qubit::g, n}.flat()).real();
        CHECK_THAT(e, WithinAbs(1.3 * (n + 0.5) + 0.55 - stark, 1e-13));
        CHECK_THAT(g, WithinAbs(1.3 * (n + 0.5) - 0.55 + stark, 1e-13));
    }
    for (std::size_t n = 0; n + 1 < 6; ++n) {
        const double nn = n + 1.0;
        const double g1 = std::sin(pi * 0.3) * (0.1 - 1e-3 * nn / 2.0 + 1e-5 * (2.0 * nn * nn + 1.0) / 24.0);
        const double expected = std::cos(2.0 * p.mixing_angle) * g1 * std::sqrt(nn);
        CHECK_THAT(h(CompositeIndex{Qubit::e, n}.flat(), CompositeIndex{Qubit::g, n + 1}.flat()).real(),
                   WithinAbs(expected, 1e-14));
    }
    // Everything else vanishes.
    for (Index i = 0; i < h.rows(); ++i)
        for (Index j = 0; j < h.cols(); ++j) {
            const auto a = CompositeIndex::from_flat(i), b = CompositeIndex::from_flat(j);
            const bool pair = (a.qubit == Qubit::e && b.qubit == Qubit::g && b.photon == a.photon + 1) ||
                              (b.qubit == Qubit::e && a.qubit == Qubit::g && a.photon == b.photon + 1);
            if (i != j && !pair) CHECK(h(i, j) == cplx{});
        }

    // The other operator ordering evaluates the series at the lower photon number.
    ModelParams q = p;
    q.ordering = CouplingOrdering::coupling_first;
    const Matrix hq = build_hamiltonian(q, basis);
    const double g1_at_2 = std::sin(pi * 0.3) * (0.1 - 1e-3 * 2.0 / 2.0 + 1e-5 * (2.0 * 4.0 + 1.0) / 24.0);
    CHECK_THAT(hq(CompositeIndex{Qubit::e, 2}.flat(), CompositeIndex{Qubit::g, 3}.flat()).real(),
               WithinAbs(std::cos(2.0 * p.mixing_angle) * g1_at_2 * std::sqrt(3.0), 1e-14));
}

TEST_CASE("k-photon couplings carry sqrt((n+k)!/n!)", "[model]") {
    for (int k = 2; k <= 3; ++k) {
        ModelParams p = params_k(k, 0.25);
        const Matrix h = build_hamiltonian(p, FockBasis(8));
        for (std::size_t n = 0; n + k < 8; ++n) {
            double lowering = 1.0;
            for (int j = 1; j <= k; ++j) lowering *= std::sqrt(double(n + j));
            const double expected = std::cos(2.0 * p.mixing_angle) * coupling_g(p, double(n + k)) * lowering;
            CHECK_THAT(h(CompositeIndex{Qubit::e, n}.flat(), CompositeIndex{Qubit::g, n + k}.flat()).real(),
                       WithinAbs(expected, 1e-14));
        }
    }
}

TEST_CASE("block eigensystem reproduces the dense Hamiltonian", "[model]") {
    std::vector<ModelParams> cases;
    cases.push_back(ModelParams{});
    ModelParams off = ModelParams{};
    off.mixing_angle = pi / 3;
    off.flux_ratio = 0.3;
    off.qubit_splitting = 0.7;
    cases.push_back(off);
    cases.push_back(params_k(2, 0.25));
    ModelParams k3 = params_k(3, 0.2);
    k3.josephson_energy = 2.5;
    cases.push_back(k3);
    ModelParams detuned = ModelParams{};
    detuned.qubit_splitting = 3.0;  // forces blocks where the g state lies below/above e
    cases.push_back(detuned);

    for (const auto& p : cases) {
        for (std::size_t dim : {std::size_t(4), std::size_t(9), std::size_t(30)}) {
            const FockBasis basis(dim);
            const Matrix h = build_hamiltonian(p, basis);
            const BlockEigensystem eig = block_eigensystem(p, basis);
            CHECK(max_abs_diff(eig.reassemble(), h) < 1e-10);

            const Matrix u = eig.unitary();
            CHECK(max_abs_diff(u.adjoint() * u, Matrix::Identity(h.rows(), h.cols())) < 1e-13);
            CHECK(max_abs_diff(u.adjoint() * h * u, Matrix(eig.energies().cast<cplx>().asDiagonal())) < 1e-10);

            Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
            std::vector<double> mine(eig.energies().data(), eig.energies().data() + eig.energies().size());
            std::sort(mine.begin(), mine.end());
            for (std::size_t i = 0; i < mine.size(); ++i)
                CHECK_THAT(mine[i], WithinAbs(es.eigenvalues()(static_cast<Index>(i)), 1e-9));
            CHECK_THAT(eig.spectral_radius(), WithinAbs(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-9));

            // Transform helpers agree with the explicit unitary.
            Matrix m = Matrix::Random(h.rows(), h.cols());
            CHECK(max_abs_diff(eig.to_eigenbasis(m), u.adjoint() * m * u) < 1e-12);
            CHECK(max_abs_diff(eig.from_eigenbasis(m), u * m * u.adjoint()) < 1e-12);
            Vector v = Vector::Random(h.rows());
            CHECK((eig.to_eigenbasis(v) - u.adjoint() * v).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((eig.from_eigenbasis(v) - u * v).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("uncoupled states and zero coupling", "[model]") {
    ModelParams p;
    p.photon_order = 2;  // flux_ratio 0.5 kills g_2 exactly
    const BlockEigensystem eig = block_eigensystem(p, FockBasis(5));
    CHECK(eig.blocks().size() == 3);
    CHECK(eig.uncoupled().size() == 4);  // |g,0>, |g,1>, |e,3>, |e,4>
    for (const auto& b : eig.blocks()) CHECK(b.rotation == Eigen::Matrix2d::Identity());
    const Matrix h = build_hamiltonian(p, FockBasis(5));
    CHECK(h.isDiagonal(0.0));
    for (Index s = 0; s < h.rows(); ++s) CHECK(eig.energies()(s) == h(s, s).real());
}
