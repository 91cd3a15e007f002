#pragma once

// Coupling matrices of a uniform atom chain beside the nanofiber.
//
// Phase convention: Gamma_ij = 2 pi sum_nu G*_{nu i} G_{nu j}, so that
//   Gamma^gR_ij = Gamma^gR_11 exp(-i beta_f (z_i - z_j)),
//   Gamma^u_ij  = int dbeta S(beta) exp(-i beta (z_i - z_j)).
// With this choice the mode that propagates towards +z is the one excited by
// a drive with phase gradient +beta_f along the chain. Rates are in units of
// the vacuum decay rate gamma, energies in units of hbar gamma.

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <tuple>
#include <utility>
#include <vector>

#include "fiberqed/constants.hpp"
#include "fiberqed/errors.hpp"
#include "fiberqed/fiber_dispersion.hpp"
#include "fiberqed/parallel.hpp"
#include "fiberqed/quadrature.hpp"

namespace fiberqed {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

struct ChainSpec {
    int N = 1;
    double a = 0.0;           // lattice constant [m]
    double h = 0.0;           // distance of the atoms from the fiber surface [m]
    double wavelength = 0.0;  // transition wavelength [m]
    Vec3c dipole{0.0, 0.0, 1.0};  // Cartesian; only the direction matters

    void validate() const {
        if (N < 1) throw DomainError("ChainSpec: N must be at least 1");
        if (N > 1 && !(a > 0.0)) throw DomainError("ChainSpec: lattice constant must be positive");
        if (!(h >= 0.0)) throw DomainError("ChainSpec: height must be non-negative");
        if (!(wavelength > 0.0)) throw DomainError("ChainSpec: wavelength must be positive");
        if (!(dipole.norm() > 0.0) || !dipole.allFinite()) throw DomainError("ChainSpec: dipole must be non-zero");
    }
    Vec3c unit_dipole() const { return dipole / dipole.norm(); }
    double k() const { return 2.0 * pi / wavelength; }
    double z(int j) const { return j * a; }
};

struct QuadratureConfig {
    double rel_tol = 1e-8;    // beta integral, per m shell
    double m_tol = 1e-8;      // stop when a shell adds less than this (relative)
    int m_cap = 60;
    int max_intervals = 2000;
    int initial_intervals = 4;
    bool fiber_scattering = true;  // false: radiation modes of empty space
    int threads = 0;
};

enum class VPolicy { tier1, tier2 };

struct ConvergenceCertificate {
    int m_max = 0;                   // highest |m| shell included
    double last_shell = 0.0;         // max |element| added by that shell
    double last_shell_relative = 0.0;
    double quad_error = 0.0;         // summed quadrature error estimates
    int evaluations = 0;
    bool quad_converged = true;
};

// ---------------------------------------------------------------------------
// Free space

/// Free-space dipole-dipole rates for a separation vector R: returns
/// (Gamma/gamma, V/(hbar gamma)) for a unit dipole d.
inline std::pair<double, double> free_space_pair(double k, const Eigen::Vector3d& R, const Vec3c& d) {
    const double dist = R.norm();
    if (dist == 0.0) return {1.0, 0.0};
    const double x = k * dist;
    const Eigen::Vector3d u = R / dist;
    const cplx e = std::exp(I * x) / (x * x * x);
    const cplx c1 = e * cplx(x * x - 1.0, x);
    const cplx c2 = e * cplx(3.0 - x * x, -3.0 * x);
    // d^T g d^* with g = c1 1 + c2 u u^T and u real.
    const double ud = std::norm((u.cast<cplx>().transpose() * d)(0));
    const cplx dgd = c1 * d.squaredNorm() + c2 * ud;
    const double img = dgd.imag(), reg = dgd.real();
    return {1.5 * img, -0.75 * reg};
}

/// Analytic free-space matrices (V_fs, Gamma_fs) for the chain.
inline std::pair<MatrixXc, MatrixXc> free_space_oracle(const ChainSpec& chain) {
    chain.validate();
    const double k = chain.k();
    const Vec3c d = chain.unit_dipole();
    MatrixXc V = MatrixXc::Zero(chain.N, chain.N), G = MatrixXc::Zero(chain.N, chain.N);
    for (int i = 0; i < chain.N; ++i) {
        for (int j = 0; j < chain.N; ++j) {
            if (i == j) {
                G(i, j) = 1.0;
                continue;
            }
            const auto [g, v] = free_space_pair(k, Eigen::Vector3d(0, 0, chain.z(i) - chain.z(j)), d);
            G(i, j) = g;
            V(i, j) = v;
        }
    }
    return {V, G};
}

// ---------------------------------------------------------------------------
// Guided channel

struct GuidedRates {
    double right = 0.0;  // f = +1, summed over l
    double left = 0.0;   // f = -1
    double total() const { return right + left; }
    double chirality() const { return (right - left) / (right + left); }
};

/// Single-atom guided decay rates (units of gamma) for a unit dipole d
/// (Cartesian, atom at azimuth 0) at distance r from the axis.
inline GuidedRates guided_rates(const GuidedModeData& g, double r, const Vec3c& d) {
    const double pref = 3.0 * pi / (2.0 * g.k * g.k) * speed_of_light * g.beta_f_prime;
    GuidedRates out;
    for (int f : {1, -1}) {
        double sum = 0.0;
        for (int l : {1, -1}) sum += std::norm((d.transpose() * guided_profile(g, ModeIndex::guided(f, l), r))(0));
        (f == 1 ? out.right : out.left) = pref * sum;
    }
    return out;
}

/// Directional guided matrices (Gamma^gR, Gamma^gL).
inline std::pair<MatrixXc, MatrixXc> guided_gamma(const ChainSpec& chain, const GuidedModeData& g) {
    chain.validate();
    const auto rates = guided_rates(g, g.fiber.radius + chain.h, chain.unit_dipole());
    MatrixXc R(chain.N, chain.N), L(chain.N, chain.N);
    for (int i = 0; i < chain.N; ++i) {
        for (int j = 0; j < chain.N; ++j) {
            const double phase = g.beta_f * (chain.z(i) - chain.z(j));
            R(i, j) = rates.right * std::exp(-I * phase);
            L(i, j) = rates.left * std::exp(I * phase);
        }
    }
    return {R, L};
}

// ---------------------------------------------------------------------------
// Radiation continuum

/// |m| shell of the radiation spectral density,
/// S_m(beta) = 3/(4k) sum_{+-m, l} |d . E_l(m, beta; r)|^2,
/// using the reflection rule to obtain -m from m.
inline double radiation_shell_density(int m, double beta, double k, double n, double rho, double r, const Vec3c& d) {
    const auto E = radiation_fields(m, beta, k, n, rho, r);
    double sum = 0.0;
    for (int s = 0; s < 2; ++s) {
        const Vec3c& e = E[s];
        sum += std::norm(d(0) * e(0) + d(1) * e(1) + d(2) * e(2));
        if (m != 0) sum += std::norm(d(0) * e(0) - d(1) * e(1) + d(2) * e(2));
    }
    return 3.0 / (4.0 * k) * sum;
}

struct RadiationKernel {
    std::vector<cplx> g;  // g[n] = Gamma^u between atoms n sites apart (i - j = n)
    ConvergenceCertificate certificate;
};

/// Gamma^u for separations 0, a, ..., (count-1) a along the axis at distance
/// r from it. The beta integral uses beta = k cos(theta), which removes the
/// square-root behaviour of the integrand at the light line.
inline RadiationKernel radiation_kernel(const FiberSpec& fiber, double r, const Vec3c& d, double a, int count,
                                        const QuadratureConfig& qc) {
    const double k = fiber.k();
    const double n = qc.fiber_scattering ? fiber.index() : 1.0;
    const double rho = fiber.radius;
    quad::Options opt;
    opt.rel_tol = qc.rel_tol;
    opt.abs_tol = 0.0;
    opt.max_intervals = qc.max_intervals;
    opt.initial_intervals = qc.initial_intervals;

    auto shell = [&](int m) {
        auto integrand = [&](double theta) {
            const double beta = k * std::cos(theta);
            const double w = radiation_shell_density(m, beta, k, n, rho, r, d) * k * std::sin(theta);
            VectorXc v(count);
            for (int j = 0; j < count; ++j) v(j) = w * std::exp(-I * beta * (j * a));
            return v;
        };
        return quad::integrate(integrand, 0.0, pi, opt);
    };

    RadiationKernel out;
    out.g.assign(count, cplx(0.0));
    auto& cert = out.certificate;
    // Shells below k r carry most of the weight; do not test convergence there.
    const int m_min = static_cast<int>(std::ceil(k * r)) + 2;
    const int threads = resolve_threads(qc.threads);
    int m = 0;
    while (true) {
        const int batch = std::min(threads, qc.m_cap + 1 - m);
        if (batch <= 0) break;
        std::vector<quad::Result<VectorXc>> results(batch);
        parallel_for(batch, threads, [&](int i) { results[i] = shell(m + i); });
        for (int i = 0; i < batch; ++i, ++m) {
            const auto& res = results[i];
            double peak = 0.0, added = 0.0;
            for (int j = 0; j < count; ++j) {
                out.g[j] += res.value(j);
                added = std::max(added, std::abs(res.value(j)));
            }
            for (int j = 0; j < count; ++j) peak = std::max(peak, std::abs(out.g[j]));
            cert.m_max = m;
            cert.last_shell = added;
            cert.last_shell_relative = peak > 0 ? added / peak : 0.0;
            cert.quad_error += res.error;
            cert.evaluations += res.evaluations;
            cert.quad_converged = cert.quad_converged && res.converged;
            if (m >= m_min && cert.last_shell_relative < qc.m_tol) return out;
        }
    }
    std::ostringstream msg;
    msg << "radiation_gamma: m sum not converged at |m| = " << qc.m_cap << ", last shell contribution "
        << cert.last_shell << " (relative " << cert.last_shell_relative << ")";
    throw ConvergenceError(msg.str());
}

inline MatrixXc toeplitz_hermitian(const std::vector<cplx>& g, int N) {
    MatrixXc M(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) M(i, j) = i >= j ? g[i - j] : std::conj(g[j - i]);
    }
    for (int i = 0; i < N; ++i) M(i, i) = M(i, i).real();
    return M;
}

/// Unguided dissipative matrix Gamma^u with its convergence certificate.
inline std::pair<MatrixXc, ConvergenceCertificate> radiation_gamma(const ChainSpec& chain, const FiberSpec& fiber,
                                                                    const QuadratureConfig& qc = {}) {
    chain.validate();
    fiber.validate();
    auto ker = radiation_kernel(fiber, fiber.radius + chain.h, chain.unit_dipole(), chain.a, chain.N, qc);
    return {toeplitz_hermitian(ker.g, chain.N), ker.certificate};
}

// ---------------------------------------------------------------------------
// Coherent part

/// Tier-1 V: analytic free-space dispersive kernel plus the principal-value
/// contribution of the guided pole,
///   V^g_ij = (i/2) sgn(z_i - z_j) (Gamma^gR_ij - Gamma^gL_ij).
inline MatrixXc coherent_v_tier1(const ChainSpec& chain, const MatrixXc& gR, const MatrixXc& gL,
                                 bool include_free_space = true, bool include_guided = true) {
    MatrixXc V = MatrixXc::Zero(chain.N, chain.N);
    if (include_free_space) V = free_space_oracle(chain).first;
    if (include_guided) {
        for (int i = 0; i < chain.N; ++i) {
            for (int j = 0; j < chain.N; ++j) {
                if (i == j) continue;
                const double sgn = i > j ? 1.0 : -1.0;
                V(i, j) += 0.5 * I * sgn * (gR(i, j) - gL(i, j));
            }
        }
    }
    return V;
}

// ---------------------------------------------------------------------------
// Bundle

struct CouplingMatrices {
    MatrixXc V, Gamma, Gamma_gR, Gamma_gL, Gamma_u;
    GuidedModeData guided;
    GuidedRates single_atom_guided;
    double single_atom_unguided = 0.0;
    QuadratureConfig quadrature;
    VPolicy v_policy = VPolicy::tier1;
    ConvergenceCertificate radiation_certificate;
    ConvergenceCertificate v_certificate;  // tier-2 only
    int N() const { return static_cast<int>(Gamma.rows()); }
};

inline void require_same_wavelength(const ChainSpec& chain, const FiberSpec& fiber) {
    if (std::abs(chain.wavelength - fiber.wavelength) > 1e-12 * fiber.wavelength)
        throw PreconditionError("chain and fiber wavelengths differ");
}

}  // namespace fiberqed

#include "fiberqed/scattered_green.hpp"

namespace fiberqed {

/// Tier-selectable coherent coupling.
inline std::pair<MatrixXc, ConvergenceCertificate> coherent_v(const ChainSpec& chain, const GuidedModeData& g,
                                                              VPolicy policy, const QuadratureConfig& qc = {}) {
    chain.validate();
    require_same_wavelength(chain, g.fiber);
    if (policy == VPolicy::tier2) return coherent_v_tier2(chain, g, qc);
    auto [R, L] = guided_gamma(chain, g);
    return {coherent_v_tier1(chain, R, L), ConvergenceCertificate{}};
}

/// All coupling matrices for the chain beside the fiber.
inline CouplingMatrices assemble(const ChainSpec& chain, const FiberSpec& fiber, const QuadratureConfig& qc = {},
                                 VPolicy policy = VPolicy::tier1) {
    chain.validate();
    fiber.validate();
    require_same_wavelength(chain, fiber);
    CouplingMatrices out;
    out.quadrature = qc;
    out.v_policy = policy;
    out.guided = solve_he11(fiber);
    const double r = fiber.radius + chain.h;
    out.single_atom_guided = guided_rates(out.guided, r, chain.unit_dipole());
    std::tie(out.Gamma_gR, out.Gamma_gL) = guided_gamma(chain, out.guided);
    std::tie(out.Gamma_u, out.radiation_certificate) = radiation_gamma(chain, fiber, qc);
    out.single_atom_unguided = out.Gamma_u(0, 0).real();
    out.Gamma = out.Gamma_gR + out.Gamma_gL + out.Gamma_u;
    if (policy == VPolicy::tier1) {
        out.V = coherent_v_tier1(chain, out.Gamma_gR, out.Gamma_gL);
    } else {
        std::tie(out.V, out.v_certificate) = coherent_v_tier2(chain, out.guided, qc);
    }
    return out;
}

}  // namespace fiberqed
