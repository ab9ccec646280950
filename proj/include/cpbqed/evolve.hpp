// evolve.hpp — intrinsic-decoherence (Milburn) evolution
//
//   d rho/dt = -i [H, rho] - (gamma/2) [H, [H, rho]]
//
// In the eigenbasis of H every coherence evolves independently:
//   rho_jl(t) = rho_jl(0) exp(-i w_jl t - (gamma/2) w_jl^2 t),  w_jl = E_j - E_l.
// That closed form is the primary path. The Kraus series
//   M_k = (gamma t)^{k/2} / sqrt(k!) H^k exp(-iHt) exp(-gamma t H^2 / 2)
// is kept for validation and for the ensemble decomposition used by the
// tangle.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "cpbqed/errors.hpp"
#include "cpbqed/hilbert.hpp"
#include "cpbqed/linalg.hpp"
#include "cpbqed/model.hpp"

namespace cpbqed {

inline constexpr std::size_t kDefaultKrausCap = 500;
inline constexpr double kDefaultKrausTol = 1e-10;

// ln P(X = k) for X ~ Poisson(mu).
inline double poisson_log_pmf(std::size_t k, double mu) {
    if (mu == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -mu + static_cast<double>(k) * std::log(mu) - std::lgamma(static_cast<double>(k) + 1.0);
}

// P(X > K) for X ~ Poisson(mu).
inline double poisson_tail(std::size_t K, double mu) {
    if (mu == 0.0) return 0.0;
    if (static_cast<double>(K) + 1.0 <= mu) {
        double cdf = 0.0;
        for (std::size_t k = 0; k <= K; ++k) cdf += std::exp(poisson_log_pmf(k, mu));
        return std::max(0.0, 1.0 - cdf);
    }
    // Terms decrease monotonically past the mode.
    double tail = 0.0;
    for (std::size_t k = K + 1;; ++k) {
        const double term = std::exp(poisson_log_pmf(k, mu));
        tail += term;
        if (term <= 1e-20 * tail || term < 1e-300) break;
    }
    return tail;
}

// Smallest K with P(X > K) <= tol.
inline std::size_t poisson_truncation(double mu, double tol, std::size_t cap) {
    if (mu == 0.0) return 0;
    for (std::size_t K = 0; K <= cap; ++K)
        if (poisson_tail(K, mu) <= tol) return K;
    throw ConvergenceError("Kraus series needs more than " + std::to_string(cap) +
                           " terms (gamma t E^2 = " + std::to_string(mu) + "); use the closed form");
}

struct KrausSet {
    std::vector<Matrix> operators;
    std::size_t truncation_K = 0;
    double tail_bound = 0.0;

    // max |sum_k M_k^dagger M_k - I|
    double completeness_defect() const {
        if (operators.empty()) return 1.0;
        const Index n = operators.front().rows();
        Matrix acc = -Matrix::Identity(n, n);
        for (const auto& m : operators) acc.noalias() += m.adjoint() * m;
        return acc.cwiseAbs().maxCoeff();
    }
};

struct BranchEnsemble {
    std::vector<WeightedState> branches;
    std::size_t truncation_K = 0;
    double weight_defect = 0.0;  // 1 - sum of weights, up to rounding
};

class Trajectory;

class Propagator {
  public:
    Propagator(BlockEigensystem eigensystem, double gamma)
        : eig_(std::make_shared<const BlockEigensystem>(std::move(eigensystem))), gamma_(gamma) {
        if (!(gamma >= 0.0)) throw ValidationError("gamma must be nonnegative");
    }

    static Propagator from_model(const ModelParams& p, const FockBasis& basis) {
        return Propagator(block_eigensystem(p, basis), p.gamma);
    }

    const BlockEigensystem& eigensystem() const { return *eig_; }
    double gamma() const { return gamma_; }
    Index dimension() const { return eig_->dimension(); }
    std::size_t fock_dim() const { return eig_->fock_dim(); }

    // exp(-i w t - gamma w^2 t / 2)
    cplx coherence_factor(double w, double t) const {
        return std::exp(cplx{-0.5 * gamma_ * w * w * t, -w * t});
    }

    DensityMatrix evolve(const DensityMatrix& rho0, double t) const {
        check_input(rho0, t);
        if (t == 0.0) return rho0;
        Matrix m = eig_->to_eigenbasis(rho0.matrix());
        const RealVector& e = eig_->energies();
        for (Index l = 0; l < m.cols(); ++l)
            for (Index j = 0; j < m.rows(); ++j) m(j, l) *= coherence_factor(e(j) - e(l), t);
        return DensityMatrix(eig_->from_eigenbasis(m));
    }

    inline Trajectory bind(const DensityMatrix& rho0) const;

    // Kraus operators M_0..M_K in the bare basis, K the smallest order whose
    // Poisson tail at the spectral radius is <= tol.
    KrausSet kraus_set(double t, double tol = kDefaultKrausTol, std::size_t cap = kDefaultKrausCap) const {
        if (!(t >= 0.0)) throw ValidationError("time must be nonnegative");
        if (!(tol > 0.0)) throw ValidationError("Kraus tolerance must be positive");
        const RealVector& e = eig_->energies();
        const double rho = eig_->spectral_radius();
        const double mu_max = gamma_ * t * rho * rho;
        KrausSet ks;
        ks.truncation_K = poisson_truncation(mu_max, tol, cap);
        ks.tail_bound = poisson_tail(ks.truncation_K, mu_max);
        const Index n = eig_->dimension();
        for (std::size_t k = 0; k <= ks.truncation_K; ++k) {
            Matrix diag = Matrix::Zero(n, n);
            for (Index j = 0; j < n; ++j) diag(j, j) = kraus_factor(k, e(j), t);
            ks.operators.push_back(eig_->from_eigenbasis(diag));
        }
        return ks;
    }

    // Eigenvalue of M_k on the eigenvector with energy E:
    // sign(E)^k sqrt(Poisson_k(gamma t E^2)) exp(-iEt)
    cplx kraus_factor(std::size_t k, double energy, double t) const {
        const double mu = gamma_ * t * energy * energy;
        const double mag = std::exp(0.5 * poisson_log_pmf(k, mu));
        const double sign = (energy < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
        return sign * mag * std::exp(cplx{0.0, -energy * t});
    }

    // Branches M_k|psi_i>/||.|| with weights w_i ||M_k|psi_i>||^2 of the
    // initial product mixture. K is chosen so that the weight missing from the
    // truncated series is <= tol for this particular initial state.
    BranchEnsemble ensemble_branches(const QubitStateSpec& qs, const FieldStateSpec& fs, double t,
                                     double tol = kDefaultKrausTol, std::size_t cap = kDefaultKrausCap) const {
        if (!(t >= 0.0)) throw ValidationError("time must be nonnegative");
        const auto components = pure_decomposition(qs, fs, FockBasis(fock_dim()));
        const RealVector& e = eig_->energies();
        const Index n = eig_->dimension();

        std::vector<Vector> coeffs;
        RealVector population = RealVector::Zero(n);
        for (const auto& c : components) {
            coeffs.push_back(eig_->to_eigenbasis(c.state));
            population += c.weight * coeffs.back().cwiseAbs2();
        }

        BranchEnsemble out;
        const double gt = gamma_ * t;
        RealVector mu(n), logp(n), cdf = RealVector::Zero(n);
        Vector phase(n);
        for (Index j = 0; j < n; ++j) {
            mu(j) = gt * e(j) * e(j);
            phase(j) = std::exp(cplx{0.0, -e(j) * t});
        }

        for (std::size_t k = 0;; ++k) {
            if (k > cap)
                throw ConvergenceError("ensemble decomposition needs more than " + std::to_string(cap) +
                                       " Kraus terms at t=" + std::to_string(t));
            RealVector pmf(n);
            for (Index j = 0; j < n; ++j) {
                if (mu(j) == 0.0) {
                    pmf(j) = k == 0 ? 1.0 : 0.0;
                    continue;
                }
                logp(j) = k == 0 ? -mu(j) : logp(j) + std::log(mu(j)) - std::log(double(k));
                pmf(j) = std::exp(logp(j));
            }
            cdf += pmf;

            for (std::size_t i = 0; i < components.size(); ++i) {
                Vector v(n);
                for (Index j = 0; j < n; ++j) {
                    const double sign = (e(j) < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
                    v(j) = coeffs[i](j) * (sign * std::sqrt(pmf(j))) * phase(j);
                }
                const double norm2 = v.squaredNorm();
                const double w = components[i].weight * norm2;
                if (w < 1e-300) continue;
                out.branches.push_back({w, eig_->from_eigenbasis(Vector(v / std::sqrt(norm2)))});
            }

            double missing = 0.0;
            for (Index j = 0; j < n; ++j) missing += population(j) * std::max(0.0, 1.0 - cdf(j));
            if (missing <= tol) {
                out.truncation_K = k;
                break;
            }
        }
        double total = 0.0;
        for (const auto& b : out.branches) total += b.weight;
        out.weight_defect = 1.0 - total;
        return out;
    }

  private:
    void check_input(const DensityMatrix& rho0, double t) const {
        if (!(t >= 0.0)) throw ValidationError("time must be nonnegative");
        if (rho0.size() != eig_->dimension())
            throw ValidationError("density matrix dimension does not match the propagator");
    }

    std::shared_ptr<const BlockEigensystem> eig_;
    double gamma_;
};

// Propagator bound to one initial state: the eigenbasis transform of rho0 is
// computed once, and only its nonzero upper-triangle entries are evolved.
// Outputs are exactly Hermitian.
class Trajectory {
  public:
    Trajectory(Propagator prop, const DensityMatrix& rho0) : prop_(std::move(prop)) {
        const BlockEigensystem& eig = prop_.eigensystem();
        if (rho0.size() != eig.dimension())
            throw ValidationError("density matrix dimension does not match the propagator");
        const Matrix m = eig.to_eigenbasis(rho0.matrix());
        const RealVector& e = eig.energies();
        for (Index l = 0; l < m.cols(); ++l) {
            for (Index j = 0; j <= l; ++j) {
                cplx v = j == l ? cplx{m(j, j).real(), 0.0} : 0.5 * (m(j, l) + std::conj(m(l, j)));
                if (v != cplx{}) entries_.push_back({j, l, v, e(j) - e(l)});
            }
        }
    }

    const Propagator& propagator() const { return prop_; }
    std::size_t stored_entries() const { return entries_.size(); }

    DensityMatrix state_at(double t) const {
        if (!(t >= 0.0)) throw ValidationError("time must be nonnegative");
        const BlockEigensystem& eig = prop_.eigensystem();
        const Index n = eig.dimension();
        Matrix out = Matrix::Zero(n, n);
        for (const auto& en : entries_) {
            const cplx v = en.j == en.l ? en.value : en.value * prop_.coherence_factor(en.omega, t);
            const auto sj = support(eig, en.j), sl = support(eig, en.l);
            if (en.j == en.l) {
                for (int a = 0; a < sj.count; ++a) {
                    for (int b = a; b < sj.count; ++b) {
                        const cplx term = (sj.coef[a] * sj.coef[b]) * v;
                        out(sj.idx[a], sj.idx[b]) += term;
                        if (a != b) out(sj.idx[b], sj.idx[a]) += std::conj(term);
                    }
                }
                continue;
            }
            for (int a = 0; a < sj.count; ++a) {
                for (int b = 0; b < sl.count; ++b) {
                    const cplx term = (sj.coef[a] * sl.coef[b]) * v;
                    out(sj.idx[a], sl.idx[b]) += term;
                    out(sl.idx[b], sj.idx[a]) += std::conj(term);
                }
            }
        }
        return DensityMatrix(std::move(out));
    }

  private:
    struct Entry {
        Index j, l;
        cplx value;
        double omega;
    };
    struct Support {
        int count;
        Index idx[2];
        double coef[2];
    };
    static Support support(const BlockEigensystem& eig, Index s) {
        const auto c = eig.components(s);
        const Index p = eig.partner(s);
        if (p < 0) return {1, {s, 0}, {c[0], 0.0}};
        return {2, {s, p}, {c[0], c[1]}};
    }

    Propagator prop_;
    std::vector<Entry> entries_;
};

inline Trajectory Propagator::bind(const DensityMatrix& rho0) const { return Trajectory(*this, rho0); }

inline DensityMatrix evolve_closed_form(const Propagator& prop, const DensityMatrix& rho0, double t) {
    return prop.evolve(rho0, t);
}

inline KrausSet kraus_set(const Propagator& prop, double t, double tol = kDefaultKrausTol,
                          std::size_t cap = kDefaultKrausCap) {
    return prop.kraus_set(t, tol, cap);
}

// sum_k M_k rho0 M_k^dagger
inline DensityMatrix evolve_kraus(const KrausSet& ks, const DensityMatrix& rho0) {
    if (ks.operators.empty()) throw ValidationError("empty Kraus set");
    if (ks.operators.front().rows() != rho0.size()) throw ValidationError("Kraus set dimension mismatch");
    Matrix acc = Matrix::Zero(rho0.size(), rho0.size());
    for (const auto& m : ks.operators) acc.noalias() += m * rho0.matrix() * m.adjoint();
    return DensityMatrix(std::move(acc));
}

inline BranchEnsemble ensemble_branches(const Propagator& prop, const QubitStateSpec& qs,
                                        const FieldStateSpec& fs, double t) {
    return prop.ensemble_branches(qs, fs, t);
}

} // namespace cpbqed
