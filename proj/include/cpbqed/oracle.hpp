// oracle.hpp — brute-force RK4 integrator of the Milburn master equation
//
// Deliberately naive: dense commutators, fixed step, no knowledge of the
// block structure. Used to certify the closed-form propagator on small
// truncations.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cpbqed/errors.hpp"
#include "cpbqed/linalg.hpp"

namespace cpbqed::oracle {

inline constexpr Index kMaxOracleDimension = 64;  // composite size, i.e. Fock dim 32

// -i[H, rho] - (gamma/2)[H, [H, rho]]   (hbar = 1)
inline Matrix rhs_milburn(const Matrix& h, const Matrix& rho, double gamma) {
    const Matrix comm = h * rho - rho * h;
    const Matrix double_comm = h * comm - comm * h;
    return -I * comm - (0.5 * gamma) * double_comm;
}

struct IntegratorConfig {
    double dt = 1e-3;
    double t_max = 1.0;
    std::size_t sample_every = 0;  // steps between recorded samples; 0 records only t = 0 and t_max

    // dt <= 1e-3 * 2 pi / spectral_radius
    void validate(double spectral_radius) const {
        if (!(dt > 0.0) || !(t_max > 0.0)) throw ValidationError("RK4 oracle needs dt > 0 and t_max > 0");
        if (spectral_radius > 0.0 && dt > 1e-3 * 2.0 * pi / spectral_radius * (1.0 + 1e-12))
            throw ValidationError("RK4 oracle step too large for the spectral radius");
    }

    static IntegratorConfig for_spectral_radius(double spectral_radius, double t_max) {
        const double bound = spectral_radius > 0.0 ? 1e-3 * 2.0 * pi / spectral_radius : 1e-3;
        const double steps = std::ceil(t_max / bound);
        return {t_max / steps, t_max, 0};
    }
};

struct Sample {
    double t;
    Matrix rho;
};

inline std::vector<Sample> integrate_rk4(const Matrix& h, const Matrix& rho0, double gamma,
                                         const IntegratorConfig& cfg) {
    if (h.rows() > kMaxOracleDimension) throw ValidationError("RK4 oracle is limited to dimension 64");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    cfg.validate(es.eigenvalues().cwiseAbs().maxCoeff());

    const std::size_t steps = static_cast<std::size_t>(std::llround(cfg.t_max / cfg.dt));
    const double dt = cfg.t_max / static_cast<double>(steps);
    const cplx trace0 = rho0.trace();

    std::vector<Sample> out{{0.0, rho0}};
    Matrix rho = rho0;
    for (std::size_t s = 1; s <= steps; ++s) {
        const Matrix k1 = rhs_milburn(h, rho, gamma);
        const Matrix k2 = rhs_milburn(h, rho + (0.5 * dt) * k1, gamma);
        const Matrix k3 = rhs_milburn(h, rho + (0.5 * dt) * k2, gamma);
        const Matrix k4 = rhs_milburn(h, rho + dt * k3, gamma);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double drift = std::abs(rho.trace() - trace0);
        if (drift > 1e-8)
            throw StepError("RK4 trace drift " + std::to_string(drift) + " at step " + std::to_string(s));
        if (s == steps || (cfg.sample_every > 0 && s % cfg.sample_every == 0))
            out.push_back({static_cast<double>(s) * dt, rho});
    }
    return out;
}

} // namespace cpbqed::oracle
