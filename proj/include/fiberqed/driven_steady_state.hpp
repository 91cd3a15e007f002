#pragma once

// Weak-drive, single-excitation steady state
//   (Delta + i Gamma_11 / 2) c = H_off c + Omega_L v,   H = V - i Gamma / 2,
// with H_off the off-diagonal part of H. Rates are <sigma_i^dag sigma_j> = c_i^* c_j
// contracted with the channel matrices.

#include <Eigen/LU>

#include <cmath>
#include <string>
#include <vector>

#include "fiberqed/coupling_kernel.hpp"

namespace fiberqed {

struct DriveField {
    double omega_L = 0.01;  // Rabi frequency [gamma]
    double delta = 0.0;     // detuning [gamma]
    double phi = pi / 2;    // laser angle to the chain axis [rad]
};

inline constexpr double weak_drive_limit = 0.1;

struct SteadyStateAmplitudes {
    VectorXc c;
    double residual = 0.0;        // ||A c - Omega v|| / ||Omega v||
    double rcond = 0.0;           // reciprocal condition estimate of A
    double max_population = 0.0;  // max |c_i|^2
    std::vector<std::string> warnings;
};

struct EmissionRates {
    double N_p = 0.0, N_p_g = 0.0, N_p_gR = 0.0, N_p_gL = 0.0, N_p_u = 0.0;
};

/// v_j = exp(i k cos(phi) z_j); the transverse phase is global and dropped.
inline VectorXc drive_vector(const ChainSpec& chain, double phi) {
    VectorXc v(chain.N);
    const double kz = chain.k() * std::cos(phi);
    for (int j = 0; j < chain.N; ++j) v(j) = std::exp(I * (kz * chain.z(j)));
    return v;
}

/// Effective non-Hermitian Hamiltonian V - i Gamma/2 (units of gamma).
inline MatrixXc effective_hamiltonian(const CouplingMatrices& cm) { return cm.V - 0.5 * I * cm.Gamma; }

inline constexpr double min_rcond = 1e-14;

/// Linear operator Delta - H with the V diagonal removed.
inline MatrixXc steady_state_operator(const CouplingMatrices& cm, double delta) {
    MatrixXc A = -effective_hamiltonian(cm);
    for (int i = 0; i < A.rows(); ++i) A(i, i) = delta + 0.5 * I * cm.Gamma(i, i).real();
    return A;
}

inline SteadyStateAmplitudes solve_steady(const CouplingMatrices& cm, const VectorXc& v, double omega_L,
                                          double delta) {
    if (v.size() != cm.N()) throw DomainError("solve_steady: drive vector has wrong length");
    const MatrixXc A = steady_state_operator(cm, delta);
    Eigen::PartialPivLU<MatrixXc> lu(A);
    SteadyStateAmplitudes out;
    out.rcond = lu.rcond();
    if (!(out.rcond > min_rcond)) {
        throw SolverError("solve_steady: singular system at Delta = " + std::to_string(delta) +
                          " (rcond " + std::to_string(out.rcond) + ")");
    }
    const VectorXc rhs = omega_L * v;
    out.c = lu.solve(rhs);
    const double nr = rhs.norm();
    out.residual = nr > 0 ? (A * out.c - rhs).norm() / nr : 0.0;
    out.max_population = out.c.size() ? out.c.cwiseAbs2().maxCoeff() : 0.0;
    if (std::abs(omega_L) > weak_drive_limit)
        out.warnings.push_back("Omega_L exceeds gamma/10; single-excitation approximation questionable");
    return out;
}

inline SteadyStateAmplitudes solve_steady(const ChainSpec& chain, const CouplingMatrices& cm,
                                          const DriveField& drive) {
    return solve_steady(cm, drive_vector(chain, drive.phi), drive.omega_L, drive.delta);
}

inline double quadratic_form(const MatrixXc& X, const VectorXc& c) { return (c.adjoint() * X * c)(0).real(); }

inline EmissionRates emission_rates(const CouplingMatrices& cm, const VectorXc& c) {
    EmissionRates r;
    r.N_p = quadratic_form(cm.Gamma, c);
    r.N_p_gR = quadratic_form(cm.Gamma_gR, c);
    r.N_p_gL = quadratic_form(cm.Gamma_gL, c);
    r.N_p_u = quadratic_form(cm.Gamma_u, c);
    r.N_p_g = r.N_p_gR + r.N_p_gL;
    return r;
}

}  // namespace fiberqed
