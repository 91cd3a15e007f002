#pragma once

// Collective decay modes: Gamma = M^dagger diag(gamma_c) M with the rows of
// M the collective jump-operator coefficients.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <vector>

#include "fiberqed/coupling_kernel.hpp"

namespace fiberqed {

struct ModeLabel {
    int rank = 0;                 // 0 = most superradiant
    double overlap_right = 0.0;   // |<M_c|w_R>|^2 with the ideal rightward guided profile
    double overlap_left = 0.0;
};

struct CollectiveModes {
    Eigen::VectorXd gamma_c;  // descending
    MatrixXc M;               // rows are modes
    std::vector<ModeLabel> labels;
    double reconstruction_residual = 0.0;  // max |Gamma - M^dag diag M| / max |Gamma|
    bool top_pair_degenerate = false;      // |gamma_1 - gamma_2| < 1e-6
    int N() const { return static_cast<int>(gamma_c.size()); }
};

inline constexpr double hermitian_tolerance = 1e-10;
inline constexpr double degeneracy_tolerance = 1e-6;

namespace detail {

// Largest-magnitude component made real and positive; ties broken by the
// lowest index.
inline void fix_phase(Eigen::Ref<Eigen::RowVectorXcd, 0, Eigen::InnerStride<>> row) {
    const double peak = row.cwiseAbs().maxCoeff();
    if (peak == 0.0) return;
    int idx = 0;
    for (int j = 0; j < row.size(); ++j) {
        if (std::abs(row(j)) >= peak * (1.0 - 1e-9)) {
            idx = j;
            break;
        }
    }
    row *= std::conj(row(idx)) / std::abs(row(idx));
    row(idx) = std::abs(row(idx));
}

}  // namespace detail

/// Ideal guided-mode row profile exp(f i beta_f z_j)/sqrt(N).
inline Eigen::RowVectorXcd guided_plane_profile(int N, double a, double beta_f, int f) {
    Eigen::RowVectorXcd w(N);
    for (int j = 0; j < N; ++j) w(j) = std::exp(I * (f * beta_f * j * a)) / std::sqrt(double(N));
    return w;
}

/// Diagonalize a Hermitian PSD Gamma. If chain geometry is given, modes are
/// labelled by their overlap with the ideal guided profiles.
inline CollectiveModes diagonalize(const MatrixXc& Gamma, std::optional<std::pair<double, double>> a_beta = {}) {
    if (Gamma.rows() != Gamma.cols() || Gamma.rows() == 0) throw DomainError("diagonalize: matrix must be square");
    const double scale = std::max(Gamma.cwiseAbs().maxCoeff(), 1e-300);
    if ((Gamma - Gamma.adjoint()).cwiseAbs().maxCoeff() > hermitian_tolerance * scale)
        throw DomainError("diagonalize: matrix is not Hermitian within tolerance");
    const MatrixXc H = 0.5 * (Gamma + Gamma.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(H);
    if (es.info() != Eigen::Success) throw SolverError("diagonalize: eigensolver failed");

    const int N = static_cast<int>(H.rows());
    CollectiveModes out;
    out.gamma_c.resize(N);
    out.M.resize(N, N);
    for (int c = 0; c < N; ++c) {
        const int src = N - 1 - c;
        out.gamma_c(c) = es.eigenvalues()(src);
        out.M.row(c) = es.eigenvectors().col(src).adjoint();
        detail::fix_phase(out.M.row(c));
    }
    const MatrixXc rec = out.M.adjoint() * out.gamma_c.cast<cplx>().asDiagonal() * out.M;
    out.reconstruction_residual = (rec - H).cwiseAbs().maxCoeff() / scale;
    out.top_pair_degenerate = N > 1 && std::abs(out.gamma_c(0) - out.gamma_c(1)) < degeneracy_tolerance;

    out.labels.resize(N);
    for (int c = 0; c < N; ++c) {
        out.labels[c].rank = c;
        if (a_beta) {
            const auto [a, beta_f] = *a_beta;
            const auto wR = guided_plane_profile(N, a, beta_f, +1);
            const auto wL = guided_plane_profile(N, a, beta_f, -1);
            out.labels[c].overlap_right = std::norm(out.M.row(c).dot(wR));
            out.labels[c].overlap_left = std::norm(out.M.row(c).dot(wL));
        }
    }
    return out;
}

/// Modes of the guided-only dissipator Gamma^gR + Gamma^gL.
inline CollectiveModes guided_only_modes(const MatrixXc& gR, const MatrixXc& gL, double a, double beta_f) {
    if (gR.rows() != gL.rows() || gR.cols() != gL.cols()) throw DomainError("guided_only_modes: shape mismatch");
    return diagonalize(gR + gL, std::make_pair(a, beta_f));
}

/// Number of eigenvalues above the threshold (units of gamma).
inline int count_above(const CollectiveModes& m, double threshold) {
    return static_cast<int>((m.gamma_c.array() > threshold).count());
}

struct ModeProfile {
    Eigen::VectorXd magnitude;
    Eigen::VectorXd phase;  // unwrapped so that neighbouring steps lie in (-pi, pi]
    bool ill_conditioned = false;
};

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double x) {
    double y = std::remainder(x, 2.0 * pi);
    if (y <= -pi) y += 2.0 * pi;
    return y;
}

inline ModeProfile mode_profile(const CollectiveModes& modes, int c) {
    if (c < 0 || c >= modes.N()) throw DomainError("mode_profile: mode index out of range");
    const int N = modes.N();
    ModeProfile p;
    p.magnitude.resize(N);
    p.phase.resize(N);
    for (int j = 0; j < N; ++j) {
        p.magnitude(j) = std::abs(modes.M(c, j));
        const double ph = std::arg(modes.M(c, j));
        p.phase(j) = j == 0 ? ph : p.phase(j - 1) + wrap_angle(ph - std::arg(modes.M(c, j - 1)));
    }
    p.ill_conditioned = modes.top_pair_degenerate && c < 2;
    return p;
}

inline ModeProfile superradiant_profile(const CollectiveModes& modes) { return mode_profile(modes, 0); }

/// Least-squares slope of the unwrapped phase (radians per site).
inline double phase_gradient(const ModeProfile& p) {
    const int N = static_cast<int>(p.phase.size());
    if (N < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 0; j < N; ++j) {
        sx += j;
        sy += p.phase(j);
        sxx += double(j) * j;
        sxy += j * p.phase(j);
    }
    return (N * sxy - sx * sy) / (N * sxx - sx * sx);
}

/// Table of |<a_c|b_c'>|^2.
inline Eigen::MatrixXd overlap_table(const CollectiveModes& a, const CollectiveModes& b) {
    if (a.N() != b.N()) throw DomainError("overlap_table: dimension mismatch");
    const MatrixXc S = a.M.conjugate() * b.M.transpose();
    return S.cwiseAbs2();
}

struct HybridizationOverlap {
    Eigen::MatrixXd with_guided;
    Eigen::MatrixXd with_free_space;
};

inline HybridizationOverlap hybridization_overlap(const CollectiveModes& full, const CollectiveModes& guided,
                                                  const CollectiveModes& free_space) {
    return {overlap_table(full, guided), overlap_table(full, free_space)};
}

}  // namespace fiberqed
