#pragma once

// Fiber-scattered part of the dipole Green function between two atoms at the
// same (r, phi), expanded in cylindrical partial waves and integrated over the
// axial wavenumber beta along the real axis:
//   |beta| < k          propagating, beta = k cos(theta)
//   k < |beta|          evanescent outside the fiber, beta = k cosh(t) near k
//   beta = +-beta_f     guided poles: principal value plus i pi times the residue
// Only included from coupling_kernel.hpp.

#include <Eigen/LU>

#include <atomic>
#include <limits>
#include <stdexcept>
#include <functional>

namespace fiberqed {

namespace green {

inline cplx ipow(int n) {
    static const cplx t[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    return t[((n % 4) + 4) % 4];
}

/// sqrt(k^2 - beta^2) on the branch with non-negative imaginary part.
struct Transverse {
    double mag = 0.0;
    bool evanescent = false;
    cplx value() const { return evanescent ? cplx(0, mag) : cplx(mag, 0); }
};

inline Transverse transverse(double k, double beta) {
    const double d = (k - beta) * (k + beta);
    return d >= 0 ? Transverse{std::sqrt(d), false} : Transverse{std::sqrt(-d), true};
}

struct CylinderFns {
    cplx J, Jp, H, Hp;  // J_m, H^(1)_m and their derivatives at kappa r
};

// With kappa = i q: J_m(iqr) = i^m I_m(qr), H_m(iqr) = (2/pi) i^-(m+1) K_m(qr).
inline CylinderFns cylinder_fns(int m, const Transverse& t, double r) {
    const double x = t.mag * r;
    if (!t.evanescent) return {bessel::J(m, x), bessel::Jp(m, x), bessel::H1(m, x), bessel::H1p(m, x)};
    return {ipow(m) * bessel::In(m, x), ipow(m - 1) * bessel::Ip(m, x), (2.0 / pi) * ipow(-(m + 1)) * bessel::K(m, x),
            (2.0 / pi) * ipow(-(m + 2)) * bessel::Kp(m, x)};
}

/// Outgoing (a, b) per unit regular incident (a, b); columns TM, TE.
inline Eigen::Matrix2cd scattering_matrix(int m, double beta, double k, double n, double rho) {
    const Transverse out = transverse(k, beta), in = transverse(n * k, beta);
    const auto fo = cylinder_fns(m, out, rho), fi = cylinder_fns(m, in, rho);
    auto tang = [&](cplx a, cplx b, cplx kap, double nn, cplx Z, cplx Zd) {
        auto f = partial_wave(m, beta, k, nn, kap, a, b, Z, Zd, rho);
        return Eigen::Vector4cd(f.E(2), f.Hz, f.E(1), f.Hphi);
    };
    Eigen::Matrix4cd A;
    A.col(0) = tang(1.0, 0.0, in.value(), n, fi.J, fi.Jp);
    A.col(1) = tang(0.0, 1.0, in.value(), n, fi.J, fi.Jp);
    A.col(2) = -tang(1.0, 0.0, out.value(), 1.0, fo.H, fo.Hp);
    A.col(3) = -tang(0.0, 1.0, out.value(), 1.0, fo.H, fo.Hp);
    Eigen::PartialPivLU<Eigen::Matrix4cd> lu(A);
    Eigen::Matrix2cd R;
    for (int s = 0; s < 2; ++s) {
        const Eigen::Vector4cd x = lu.solve(tang(s == 0 ? 1.0 : 0.0, s == 1 ? 1.0 : 0.0, out.value(), 1.0, fo.J, fo.Jp));
        R.col(s) = x.tail<2>();
    }
    return R;
}

/// d . E_scattered at the source position for one (m, beta), source dipole
/// src, in units of k^3 / (4 pi eps0). The axial phase is left out.
inline cplx scattered_shell(int m, double beta, double k, double n, double rho, double r, const Vec3c& src,
                            const Vec3c& d) {
    const Transverse out = transverse(k, beta);
    const cplx kap = out.value();
    const auto f = cylinder_fns(m, out, r);
    const double dm = m;
    const cplx a_inc = I / (2 * k * k * k) * (kap * kap * src(2) * f.H - I * beta * kap * src(0) * f.Hp -
                                               beta * dm / r * src(1) * f.H);
    const cplx b_inc = I / (2 * k * k) * (I * kap * src(1) * f.Hp - dm / r * src(0) * f.H);
    const Eigen::Vector2cd sc = scattering_matrix(m, beta, k, n, rho) * Eigen::Vector2cd(a_inc, b_inc);
    const Vec3c E = partial_wave(m, beta, k, 1.0, kap, sc(0), sc(1), f.H, f.Hp, r).E;
    return (d.transpose() * E)(0);
}

struct ShellSum {
    cplx value;
    int m_max = 0;
    double last = 0.0;
};

inline constexpr int m_cap = 400;

/// Highest |m| kept at this beta. Beyond |kappa| r the shells fall off like
/// (rho/r)^(2m); the cut depends on beta only through |kappa| so the
/// truncation stays smooth across the guided poles.
inline int shell_cut(double beta, double k, double rho, double r, double m_tol) {
    const int extra = static_cast<int>(std::ceil(std::log(1e-3 * m_tol) / (2.0 * std::log(rho / r))));
    return static_cast<int>(std::ceil(transverse(k, beta).mag * r)) + std::max(extra, 2);
}

/// Sum of scattered_shell over |m| <= shell_cut.
inline ShellSum scattered_sum(double beta, double k, double n, double rho, double r, const Vec3c& src,
                              const Vec3c& d, double m_tol) {
    const int m_stop = shell_cut(beta, k, rho, r, m_tol);
    if (m_stop > m_cap)
        throw ConvergenceError("scattered Green function: needs |m| up to " + std::to_string(m_stop) + ", cap is " +
                               std::to_string(m_cap));
    ShellSum s;
    for (int m = 0; m <= m_stop; ++m) {
        cplx t;
        try {
            t = scattered_shell(m, beta, k, n, rho, r, src, d);
            if (m > 0) t += scattered_shell(-m, beta, k, n, rho, r, src, d);
        } catch (const std::overflow_error&) {
            t = cplx(std::numeric_limits<double>::infinity(), 0.0);
        }
        if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) {
            // Factor overflow close to the light line, where the shells
            // past |kappa| r are already geometrically small.
            if (m > transverse(k, beta).mag * r + 2) return s;
            throw SolverError("scattered Green function: non-finite shell at m = " + std::to_string(m) +
                              ", beta/k = " + std::to_string(beta / k));
        }
        s.value += t;
        s.m_max = m;
        s.last = std::abs(t);
    }
    return s;
}

struct ScatteredKernel {
    std::vector<cplx> K;  // K[n] at z_field - z_source = n a, n = -(count-1) .. count-1
    int count = 0;
    ConvergenceCertificate certificate;
    cplx at(int n) const { return K[n + count - 1]; }
};

/// Scattered field kernel int dbeta sum_m d . E_sc(src = conj d) exp(i beta dz).
inline ScatteredKernel scattered_kernel(const GuidedModeData& g, double r, const Vec3c& d, double a, int count,
                                        const QuadratureConfig& qc) {
    const double k = g.k, n = g.n, rho = g.fiber.radius, bf = g.beta_f;
    const double h = r - rho;
    if (!(h > 0)) throw DomainError("scattered Green function: atom must sit outside the fiber");
    const Vec3c src = d.conjugate();
    const int nz = 2 * count - 1;
    Eigen::VectorXd dz(nz);
    for (int i = 0; i < nz; ++i) dz(i) = (i - (count - 1)) * a;

    std::atomic<int> m_seen{0};
    std::atomic<int> evals{0};
    auto F = [&](double beta) -> Eigen::VectorXcd {
        // On the light line the measure vanishes and Y_m, K_m overflow.
        if (green::transverse(k, beta).mag * r < 1e-9) return Eigen::VectorXcd::Zero(nz);
        const auto s = scattered_sum(beta, k, n, rho, r, src, d, qc.m_tol);
        int cur = m_seen.load();
        while (s.m_max > cur && !m_seen.compare_exchange_weak(cur, s.m_max)) {
        }
        ++evals;
        Eigen::VectorXcd v(nz);
        for (int i = 0; i < nz; ++i) v(i) = s.value * std::exp(I * (beta * dz(i)));
        return v;
    };

    const double delta = 0.5 * std::min(bf - k, n * k - bf);
    const double t1 = std::acosh((bf - delta) / k);
    // Within lc of the light line the shell sums lose digits to cancellation
    // between the TM and TE parts. There F ~ c0 + c1 ln(x) + c2 x^2 (x = theta
    // or t), fitted at lc, 2 lc, 4 lc and integrated against the weight k x.
    // The error is taken as the change from dropping the x^2 term.
    const double lc = std::min(1e-2, t1 / 16);
    auto sliver = [&](auto&& Fx) {
        Eigen::Matrix3d A;
        Eigen::MatrixXcd B(3, nz);
        for (int i = 0; i < 3; ++i) {
            const double x = lc * (1 << i);
            A.row(i) << 1.0, std::log(x), x * x;
            B.row(i) = Fx(x).transpose();
        }
        const Eigen::MatrixXcd c = A.cast<cplx>().partialPivLu().solve(B);
        const double L = std::log(lc);
        const Eigen::RowVector3d w(0.5 * lc * lc, 0.5 * lc * lc * L - 0.25 * lc * lc, 0.25 * lc * lc * lc * lc);
        quad::Result<Eigen::VectorXcd> res;
        res.value = k * (w.cast<cplx>() * c).transpose();
        const Eigen::RowVectorXcd c1 = (B.row(1) - B.row(0)) / std::log(2.0);
        const Eigen::RowVectorXcd two_term = (0.5 * k * lc * lc) * (B.row(0) - 0.5 * c1);
        res.error = quad::detail::magnitude(Eigen::VectorXcd(res.value - two_term.transpose()));
        res.evaluations = 3;
        res.converged = true;
        return res;
    };
    const double q_max = 12.0 / h;
    const double b_max = std::sqrt(k * k + q_max * q_max);
    std::vector<double> tail_pts{bf + delta};
    for (double q : {1.0 / h, 3.0 / h, 6.0 / h}) {
        const double b = std::sqrt(k * k + q * q);
        if (b > tail_pts.back()) tail_pts.push_back(b);
    }
    if (b_max > tail_pts.back()) tail_pts.push_back(b_max);

    quad::Options qo;
    qo.rel_tol = qc.rel_tol;
    qo.abs_tol = 1e-3 * qc.rel_tol;
    qo.max_intervals = qc.max_intervals;
    qo.initial_intervals = qc.initial_intervals;

    using Piece = std::function<quad::Result<Eigen::VectorXcd>()>;
    std::vector<Piece> pieces;
    pieces.push_back([&] {
        return quad::integrate([&](double th) -> Eigen::VectorXcd { return F(k * std::cos(th)) * (k * std::sin(th)); },
                               lc, pi - lc, qo);
    });
    pieces.push_back([&] { return sliver([&](double x) { return F(k * std::cos(x)); }); });
    pieces.push_back([&] { return sliver([&](double x) { return F(-k * std::cos(x)); }); });
    for (int sg : {1, -1}) {
        pieces.push_back([&, sg] {
            return quad::integrate(
                [&](double t) -> Eigen::VectorXcd { return F(sg * k * std::cosh(t)) * (k * std::sinh(t)); }, lc, t1,
                qo);
        });
        pieces.push_back([&, sg] { return sliver([&](double t) { return F(sg * k * std::cosh(t)); }); });
        pieces.push_back([&, sg] {
            return quad::integrate(
                [&](double u) -> Eigen::VectorXcd { return F(sg * (bf + u)) + F(sg * (bf - u)); }, 0.0, delta, qo);
        });
        pieces.push_back([&, sg] {
            return quad::integrate([&](double b) -> Eigen::VectorXcd { return F(sg * b); }, tail_pts, qo);
        });
        pieces.push_back([&, sg] {
            // Retarded poles: +beta_f lies above the real axis, -beta_f below.
            const double eps = 1e-5 * bf;
            const Eigen::VectorXcd res = 0.5 * eps * (F(sg * bf + eps) - F(sg * bf - eps));
            quad::Result<Eigen::VectorXcd> r;
            r.value = (double(sg) * pi * I) * res;
            r.converged = true;
            return r;
        });
    }

    std::vector<quad::Result<Eigen::VectorXcd>> results(pieces.size());
    parallel_for(static_cast<int>(pieces.size()), qc.threads, [&](int i) { results[i] = pieces[i](); });

    ScatteredKernel out;
    out.count = count;
    Eigen::VectorXcd tot = Eigen::VectorXcd::Zero(nz);
    for (const auto& r : results) {
        tot += r.value;
        out.certificate.quad_error += r.error;
        out.certificate.quad_converged = out.certificate.quad_converged && r.converged;
    }
    out.K.assign(tot.data(), tot.data() + nz);
    out.certificate.m_max = m_seen.load();
    out.certificate.evaluations = evals.load();
    return out;
}

}  // namespace green

/// Scattered part of the effective Hamiltonian, H_ij = -(3/4) K(z_j - z_i)
/// (units of gamma, same phase convention as the dissipators).
inline std::pair<MatrixXc, ConvergenceCertificate> scattered_hamiltonian(const ChainSpec& chain,
                                                                         const GuidedModeData& g,
                                                                         const QuadratureConfig& qc = {}) {
    chain.validate();
    const auto ker = green::scattered_kernel(g, g.fiber.radius + chain.h, chain.unit_dipole(), chain.a, chain.N, qc);
    MatrixXc H(chain.N, chain.N);
    for (int i = 0; i < chain.N; ++i)
        for (int j = 0; j < chain.N; ++j) H(i, j) = -0.75 * ker.at(j - i);
    return {H, ker.certificate};
}

/// Coherent couplings from the full Green function: free space plus the
/// Hermitian part of the scattered Hamiltonian, diagonal removed.
inline std::pair<MatrixXc, ConvergenceCertificate> coherent_v_tier2(const ChainSpec& chain, const GuidedModeData& g,
                                                                    const QuadratureConfig& qc = {}) {
    auto [Hs, cert] = scattered_hamiltonian(chain, g, qc);
    MatrixXc V = free_space_oracle(chain).first + 0.5 * (Hs + Hs.adjoint());
    V.diagonal().setZero();
    return {V, cert};
}

}  // namespace fiberqed
