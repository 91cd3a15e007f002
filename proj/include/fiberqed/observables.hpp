#pragma once

// Detuning-integrated collective observables, the mode-matching angle and
// single-atom rates under dipole rotations.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fiberqed/collective_modes.hpp"
#include "fiberqed/driven_steady_state.hpp"
#include "fiberqed/quadrature.hpp"

namespace fiberqed {

struct CollectiveObservables {
    // Detuning integrals divided by Omega_L^2 (units of gamma).
    double Gamma_C = 0.0, Gamma_C_g = 0.0, Gamma_C_gR = 0.0, Gamma_C_gL = 0.0, Gamma_C_u = 0.0;
    double beta_C = 0.0;
    double C_C = 0.0;
    // Certificates.
    double delta_max = 0.0;
    double tail_fraction = 0.0;        // share of Gamma_C from the |Delta| > delta_max correction
    double tail_error_relative = 0.0;  // size of the next-order tail term relative to Gamma_C
    double quad_error_relative = 0.0;
    int evaluations = 0;
    bool resolved = true;
    std::vector<std::string> warnings;
};

struct SpectrumOptions {
    double delta_max_factor = 50.0;  // delta_max = factor * max gamma_c (plus the largest shift)
    double rel_tol = 1e-9;
    int max_intervals = 20000;
};

namespace detail {

inline void finish_ratios(CollectiveObservables& o) {
    o.Gamma_C_g = o.Gamma_C_gR + o.Gamma_C_gL;
    o.beta_C = o.Gamma_C > 0 ? o.Gamma_C_g / o.Gamma_C : 0.0;
    o.C_C = o.Gamma_C_g > 0 ? (o.Gamma_C_gR - o.Gamma_C_gL) / o.Gamma_C_g : 0.0;
    o.beta_C = std::clamp(o.beta_C, 0.0, 1.0);
    o.C_C = std::clamp(o.C_C, -1.0, 1.0);
}

}  // namespace detail

/// Integrate the channel rates over detuning on [-delta_max, delta_max] with
/// panels seeded at every resonance of H, and add the large-|Delta| tail
///   int_{|Delta|>D} N_X = Omega^2 [2 v^dag X v / D + 2/3 (|Hv|_X^2 + 2 Re v^dag X H^2 v) / D^3].
/// The amplitudes are linear in Omega_L, so the drive is taken as v itself and
/// every integral comes out divided by Omega_L^2.
inline CollectiveObservables integrate_collective(const CouplingMatrices& cm, const VectorXc& v,
                                                  const SpectrumOptions& opt = {}) {
    if (v.size() != cm.N()) throw DomainError("integrate_collective: drive vector has wrong length");
    CollectiveObservables out;
    MatrixXc H = effective_hamiltonian(cm);
    for (int i = 0; i < H.rows(); ++i) H(i, i) = -0.5 * I * cm.Gamma(i, i).real();
    Eigen::ComplexEigenSolver<MatrixXc> es(H, false);
    Eigen::SelfAdjointEigenSolver<MatrixXc> gs(0.5 * (cm.Gamma + cm.Gamma.adjoint()), Eigen::EigenvaluesOnly);
    const double gmax = std::max(gs.eigenvalues().maxCoeff(), 1e-300);
    double shift = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) shift = std::max(shift, std::abs(es.eigenvalues()(i).real()));
    const double D = shift + opt.delta_max_factor * gmax;
    out.delta_max = D;

    std::vector<double> pts{-D, D};
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double c = es.eigenvalues()(i).real();
        const double w = std::max(std::abs(es.eigenvalues()(i).imag()), 1e-12 * D);
        for (double s : {-30.0, -3.0, -1.0, 0.0, 1.0, 3.0, 30.0}) {
            const double x = c + s * w;
            if (x > -D && x < D) pts.push_back(x);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto rates = [&](double delta) {
        const MatrixXc A = steady_state_operator(cm, delta);
        const VectorXc c = A.partialPivLu().solve(v);
        Eigen::Vector4d r;
        r << quadratic_form(cm.Gamma, c), quadratic_form(cm.Gamma_gR, c), quadratic_form(cm.Gamma_gL, c),
            quadratic_form(cm.Gamma_u, c);
        return r;
    };
    quad::Options qo;
    qo.rel_tol = opt.rel_tol;
    qo.max_intervals = opt.max_intervals;
    const auto res = quad::integrate(rates, pts, qo);
    out.evaluations = res.evaluations;

    const VectorXc Hv = H * v;
    const VectorXc HHv = H * Hv;
    auto tail = [&](const MatrixXc& X, double& second) {
        const double t1 = 2.0 * quadratic_form(X, v) / D;
        const double c4 = quadratic_form(X, Hv) + 2.0 * (v.adjoint() * X * HHv)(0).real();
        second = 2.0 / 3.0 * c4 / (D * D * D);
        return t1 + second;
    };
    double s0, s1, s2, s3;
    const double tp = tail(cm.Gamma, s0), tR = tail(cm.Gamma_gR, s1), tL = tail(cm.Gamma_gL, s2),
                 tu = tail(cm.Gamma_u, s3);
    out.Gamma_C = res.value(0) + tp;
    out.Gamma_C_gR = res.value(1) + tR;
    out.Gamma_C_gL = res.value(2) + tL;
    out.Gamma_C_u = res.value(3) + tu;
    detail::finish_ratios(out);
    out.tail_fraction = out.Gamma_C > 0 ? tp / out.Gamma_C : 0.0;
    out.tail_error_relative = out.Gamma_C > 0 ? std::abs(s0) / out.Gamma_C : 0.0;
    out.quad_error_relative = out.Gamma_C > 0 ? res.error / out.Gamma_C : 0.0;
    out.resolved = res.converged;
    if (!res.converged) out.warnings.push_back("spectrum integration budget exhausted; peaks may be unresolved");
    if (out.tail_error_relative > 1e-4) out.warnings.push_back("tail correction uncertainty above 1e-4");
    return out;
}

/// Closed-form detuning integrals from the eigen-decomposition H = R diag(l) R^-1:
///   int c c^dag dDelta / Omega^2 = R [B_a B_b^* 2 pi i / (l_b^* - l_a)] R^dag,  B = R^-1 v.
inline CollectiveObservables integrate_collective_exact(const CouplingMatrices& cm, const VectorXc& v) {
    MatrixXc H = effective_hamiltonian(cm);
    for (int i = 0; i < H.rows(); ++i) H(i, i) = -0.5 * I * cm.Gamma(i, i).real();
    Eigen::ComplexEigenSolver<MatrixXc> es(H);
    const MatrixXc& R = es.eigenvectors();
    const VectorXc& lam = es.eigenvalues();
    const VectorXc B = R.partialPivLu().solve(v);
    const int N = static_cast<int>(v.size());
    MatrixXc Qt(N, N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) Qt(a, b) = B(a) * std::conj(B(b)) * 2.0 * pi * I / (std::conj(lam(b)) - lam(a));
    const MatrixXc Q = R * Qt * R.adjoint();
    CollectiveObservables out;
    auto tr = [&](const MatrixXc& X) { return (X * Q).trace().real(); };
    out.Gamma_C = tr(cm.Gamma);
    out.Gamma_C_gR = tr(cm.Gamma_gR);
    out.Gamma_C_gL = tr(cm.Gamma_gL);
    out.Gamma_C_u = tr(cm.Gamma_u);
    out.delta_max = std::numeric_limits<double>::infinity();
    detail::finish_ratios(out);
    return out;
}

/// Laser angle imprinting a phase step matching the guided mode:
///   phi = arccos(branch (n lambda_a / a - lambda_a / lambda_f)).
inline std::optional<double> mode_matching_angle(double a, double lambda_a, double lambda_f, int n, int branch) {
    if (n < 1) throw DomainError("mode_matching_angle: n must be at least 1");
    if (branch != 1 && branch != -1) throw DomainError("mode_matching_angle: branch must be +1 or -1");
    if (!(a > 0.0)) throw DomainError("mode_matching_angle: lattice constant must be positive");
    const double arg = branch * (n * lambda_a / a - lambda_a / lambda_f);
    if (arg < -1.0 || arg > 1.0) return std::nullopt;
    return std::acos(arg);
}

// ---------------------------------------------------------------------------
// Single atom

struct SingleAtomObservables {
    double Gamma_total = 0.0, Gamma_g = 0.0, Gamma_gR = 0.0, Gamma_gL = 0.0, Gamma_u = 0.0;
    double beta = 0.0;
    double C = 0.0;
    ConvergenceCertificate certificate;
};

/// Circular dipole in the plane spanned by the atom-fiber separation (x) and
/// the fiber axis (z).
inline Vec3c base_circular_dipole() { return Vec3c(cplx(0, 1), 0, -1) / std::sqrt(2.0); }

/// Rotate by theta_z about the fiber axis, then by theta_x about the
/// atom-fiber separation axis.
inline Vec3c rotate_dipole(const Vec3c& d, double theta_z, double theta_x) {
    const Eigen::Matrix3d Rz = Eigen::AngleAxisd(theta_z, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const Eigen::Matrix3d Rx = Eigen::AngleAxisd(theta_x, Eigen::Vector3d::UnitX()).toRotationMatrix();
    return (Rx * Rz).cast<cplx>() * d;
}

inline SingleAtomObservables single_atom(const FiberSpec& fiber, const GuidedModeData& g, double h, const Vec3c& d,
                                         const QuadratureConfig& qc = {}) {
    const Vec3c u = d / d.norm();
    const double r = fiber.radius + h;
    SingleAtomObservables out;
    const auto gr = guided_rates(g, r, u);
    out.Gamma_gR = gr.right;
    out.Gamma_gL = gr.left;
    out.Gamma_g = gr.total();
    auto ker = radiation_kernel(fiber, r, u, 0.0, 1, qc);
    out.Gamma_u = ker.g[0].real();
    out.certificate = ker.certificate;
    out.Gamma_total = out.Gamma_g + out.Gamma_u;
    out.beta = std::clamp(out.Gamma_g / out.Gamma_total, 0.0, 1.0);
    out.C = out.Gamma_g > 0 ? std::clamp((out.Gamma_gR - out.Gamma_gL) / out.Gamma_g, -1.0, 1.0) : 0.0;
    return out;
}

inline SingleAtomObservables single_atom(const ChainSpec& chain, const FiberSpec& fiber, double theta_z,
                                         double theta_x, const QuadratureConfig& qc = {}) {
    if (chain.N != 1) throw PreconditionError("single_atom: chain must hold exactly one atom");
    chain.validate();
    require_same_wavelength(chain, fiber);
    const auto g = solve_he11(fiber);
    return single_atom(fiber, g, chain.h, rotate_dipole(chain.unit_dipole(), theta_z, theta_x), qc);
}

}  // namespace fiberqed
