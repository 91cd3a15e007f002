#pragma once

// Step-index silica nanofiber in vacuum: Sellmeier index, single-mode test,
// HE11 dispersion and the guided / radiation field profiles.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include "fiberqed/bessel.hpp"
#include "fiberqed/constants.hpp"
#include "fiberqed/errors.hpp"
#include "fiberqed/root_finding.hpp"

namespace fiberqed {

using Vec3c = Eigen::Vector3cd;

// Fused silica, room temperature (Malitson 1965). Wavelengths in micrometres.
inline constexpr std::array<double, 3> sellmeier_B{0.6961663, 0.4079426, 0.8974794};
inline constexpr std::array<double, 3> sellmeier_C{0.0684043, 0.1162414, 9.896161};
inline constexpr double sellmeier_min_wavelength = 0.21e-6;
inline constexpr double sellmeier_max_wavelength = 3.7e-6;

/// Fused-silica refractive index at vacuum wavelength `lambda` (metres).
inline double sellmeier_index(double lambda) {
    if (!(lambda >= sellmeier_min_wavelength && lambda <= sellmeier_max_wavelength)) {
        std::ostringstream msg;
        msg << "sellmeier_index: wavelength " << lambda
            << " m outside the fused-silica validity range [0.21, 3.7] um";
        throw DomainError(msg.str());
    }
    const double l2 = (lambda * 1e6) * (lambda * 1e6);
    double n2 = 1.0;
    for (int i = 0; i < 3; ++i) n2 += sellmeier_B[i] * l2 / (l2 - sellmeier_C[i] * sellmeier_C[i]);
    return std::sqrt(n2);
}

struct FiberSpec {
    double radius = 0.0;      // r_f [m]
    double wavelength = 0.0;  // lambda_a [m]
    // Fixed core index; when empty the Sellmeier index is used and follows
    // the wavelength (this matters for dbeta/domega).
    std::optional<double> index_override;
    double cladding_index = 1.0;

    double index_at(double lambda) const { return index_override ? *index_override : sellmeier_index(lambda); }
    double index() const { return index_at(wavelength); }
    double k() const { return 2.0 * pi / wavelength; }

    void validate() const {
        if (!(radius > 0.0)) throw DomainError("FiberSpec: radius must be positive");
        if (!(wavelength > 0.0)) throw DomainError("FiberSpec: wavelength must be positive");
        if (index_override && !(*index_override > 1.0))
            throw DomainError("FiberSpec: core index must exceed 1");
        if (!index_override) (void)index();
    }
};

/// Largest radius for single-mode operation at the fiber's wavelength.
inline double single_mode_cutoff_radius(const FiberSpec& fiber) {
    const double n = fiber.index();
    return 2.405 * fiber.wavelength / (2.0 * pi * std::sqrt(n * n - 1.0));
}

inline bool check_single_mode(const FiberSpec& fiber) {
    fiber.validate();
    return fiber.radius < single_mode_cutoff_radius(fiber);
}

/// HE11 eigenvalue function for vacuum cladding,
///   (x + y)(n^2 x + y) - (beta/k)^2 (1/U^2 + 1/W^2)^2,
/// with x = J1'(U)/(U J1(U)), y = K1'(W)/(W K1(W)).
inline double he11_characteristic(double beta, double k, double n, double rho) {
    const double h = std::sqrt(n * n * k * k - beta * beta);
    const double q = std::sqrt(beta * beta - k * k);
    const double U = h * rho;
    const double W = q * rho;
    const double x = bessel::Jp(1, U) / (U * bessel::J(1, U));
    const double y = bessel::Kp(1, W) / (W * bessel::K(1, W));
    const double t = 1.0 / (U * U) + 1.0 / (W * W);
    const double b = beta / k;
    return (x + y) * (n * n * x + y) - b * b * t * t;
}

// The bracket is padded away from k and k n_f. Thin fibers (V below about
// 0.7) have beta_f - k under the first padding, so smaller ones are tried.
inline constexpr std::array<double, 3> he11_bracket_paddings{1e-6, 1e-9, 1e-12};
inline constexpr int he11_scan_samples = 128;
inline constexpr double he11_root_rel_tol = 1e-15;
inline constexpr double he11_fd_rel_step = 1e-6;

/// HE11 propagation constant at wavenumber k and core index n.
inline roots::RootResult solve_he11_beta(double k, double n, double rho) {
    auto F = [&](double b) { return he11_characteristic(b, k, n, rho); };
    for (double pad : he11_bracket_paddings) {
        const double lo = k * (1.0 + pad);
        const double hi = k * n * (1.0 - 1e-6);
        auto brackets = roots::scan_sign_changes(F, lo, hi, he11_scan_samples);
        if (brackets.size() > 1) throw SolverError("solve_he11: several HE11 roots found; fiber is not single-mode");
        if (brackets.size() == 1) return roots::solve_bracketed(F, brackets[0].lo, brackets[0].hi, he11_root_rel_tol);
    }
    throw SolverError("solve_he11: no sign change of the HE11 function in (k, k n_f)");
}

struct GuidedModeData {
    FiberSpec fiber;
    double k = 0.0;
    double n = 0.0;
    double beta_f = 0.0;
    double beta_f_prime = 0.0;  // dbeta/domega [s/m]
    double lambda_f = 0.0;      // 2 pi / beta_f
    double residual = 0.0;      // characteristic function at the root
    // Profile coefficients.
    double h = 0.0, q = 0.0, U = 0.0, W = 0.0;
    double s = 0.0;     // hybrid-mode parameter
    double R = 0.0;     // J1(U)/K1(W), matches e_z across the boundary
    double norm = 0.0;  // amplitude C so that 2 pi int n^2 |e|^2 r dr = 1
};

namespace detail {

// Primitive of t Z_n(t)^2 for Z = J: x^2/2 (J_n^2 - J_{n-1} J_{n+1}).
inline double int_x_J2(int n, double x) {
    return 0.5 * x * x * (bessel::J(n, x) * bessel::J(n, x) - bessel::J(n - 1, x) * bessel::J(n + 1, x));
}
// int_W^inf t K_n(t)^2 dt = W^2/2 (K_{n-1} K_{n+1} - K_n^2).
inline double int_x_K2_tail(int n, double W) {
    return 0.5 * W * W * (bessel::K(n - 1, W) * bessel::K(n + 1, W) - bessel::K(n, W) * bessel::K(n, W));
}

}  // namespace detail

/// Amplitude C of the unit-amplitude profile such that
/// 2 pi int_0^inf n(r)^2 |e|^2 r dr = 1, using closed-form Bessel integrals.
inline double guided_normalization(const GuidedModeData& g) {
    const double b = g.beta_f, h = g.h, q = g.q, s = g.s;
    const double ai = b / (2.0 * h);
    const double ao = b / (2.0 * q);
    auto Ji = [&](int n) { return detail::int_x_J2(n, g.U) / (h * h); };
    auto Ko = [&](int n) { return detail::int_x_K2_tail(n, g.W) / (q * q); };
    const double inside = ai * ai * 2.0 * ((1 - s) * (1 - s) * Ji(0) + (1 + s) * (1 + s) * Ji(2)) + Ji(1);
    const double outside = g.R * g.R * (ao * ao * 2.0 * ((1 - s) * (1 - s) * Ko(0) + (1 + s) * (1 + s) * Ko(2)) + Ko(1));
    return 1.0 / std::sqrt(2.0 * pi * (g.n * g.n * inside + outside));
}

/// Solve for the HE11 mode. dbeta/domega comes from a central difference in
/// omega with the root (and Sellmeier index) re-evaluated at omega +- d.
inline GuidedModeData solve_he11(const FiberSpec& fiber) {
    if (!check_single_mode(fiber)) throw PreconditionError("solve_he11: fiber violates the single-mode condition");
    GuidedModeData g;
    g.fiber = fiber;
    g.k = fiber.k();
    g.n = fiber.index();
    const auto root = solve_he11_beta(g.k, g.n, fiber.radius);
    g.beta_f = root.x;
    g.residual = root.residual;
    g.lambda_f = 2.0 * pi / g.beta_f;

    const double omega = g.k * speed_of_light;
    const double d = he11_fd_rel_step * omega;
    auto beta_at = [&](double w) {
        const double lam = 2.0 * pi * speed_of_light / w;
        return solve_he11_beta(w / speed_of_light, fiber.index_at(lam), fiber.radius).x;
    };
    g.beta_f_prime = (beta_at(omega + d) - beta_at(omega - d)) / (2.0 * d);

    const double rho = fiber.radius;
    g.h = std::sqrt(g.n * g.n * g.k * g.k - g.beta_f * g.beta_f);
    g.q = std::sqrt(g.beta_f * g.beta_f - g.k * g.k);
    g.U = g.h * rho;
    g.W = g.q * rho;
    const double x = bessel::Jp(1, g.U) / (g.U * bessel::J(1, g.U));
    const double y = bessel::Kp(1, g.W) / (g.W * bessel::K(1, g.W));
    g.s = (1.0 / (g.U * g.U) + 1.0 / (g.W * g.W)) / (x + y);
    g.R = bessel::J(1, g.U) / bessel::K(1, g.W);
    g.norm = guided_normalization(g);
    return g;
}

enum class ModeKind { guided, unguided };

struct ModeIndex {
    ModeKind kind = ModeKind::guided;
    int f = 1;          // guided: propagation direction
    int l = 1;          // polarization
    int m = 0;          // unguided: azimuthal order
    double beta = 0.0;  // unguided: axial wavenumber, |beta| < k
    double omega = 0.0;

    static ModeIndex guided(int f, int l) { return {ModeKind::guided, f, l, 0, 0.0, 0.0}; }
    static ModeIndex unguided(int m, int l, double beta) { return {ModeKind::unguided, 0, l, m, beta, 0.0}; }
};

/// HE11 profile (e_r, e_phi, e_z) at radius r. The azimuthal and axial phase
/// exp(i(f beta z + l phi)) is not included; in the cylindrical basis the
/// components are independent of phi. Symmetries:
///   e^(f,l)_phi = l e^(+,+)_phi, e^(f,l)_z = f e^(+,+)_z, conj(e^(f,l)) = -e^(-f,-l).
inline Vec3c guided_profile(const GuidedModeData& g, const ModeIndex& mode, double r) {
    if (mode.kind != ModeKind::guided) throw DomainError("guided_profile: mode index is not guided");
    if (!(r >= 0.0)) throw DomainError("guided_profile: negative radius");
    const double C = g.norm, s = g.s;
    cplx er, ep, ez;
    if (r < g.fiber.radius) {
        const double a = C * g.beta_f / (2.0 * g.h);
        const double hr = g.h * r;
        const double j0 = bessel::J(0, hr), j2 = bessel::J(2, hr);
        er = I * a * ((1 - s) * j0 - (1 + s) * j2);
        ep = -a * ((1 - s) * j0 + (1 + s) * j2);
        ez = C * bessel::J(1, hr);
    } else {
        const double a = C * g.beta_f / (2.0 * g.q) * g.R;
        const double qr = g.q * r;
        const double k0 = bessel::K(0, qr), k2 = bessel::K(2, qr);
        er = I * a * ((1 - s) * k0 + (1 + s) * k2);
        ep = -a * ((1 - s) * k0 - (1 + s) * k2);
        ez = C * g.R * bessel::K(1, qr);
    }
    return {er, double(mode.l) * ep, double(mode.f) * ez};
}

// ---------------------------------------------------------------------------
// Radiation modes. For each (beta, m) two scattering states are used: a free
// cylindrical wave incident on the fiber with E_z (TM, l = +1) or Z0 H_z
// (TE, l = -1) amplitude p/k, p = sqrt(k^2 - beta^2), plus outgoing H^(1)_m
// scattered waves and a regular interior solution. Fields are in units where
// the magnetic field is scaled by the vacuum impedance.

struct CylFields {
    Vec3c E;  // (E_r, E_phi, E_z)
    cplx Hphi;
    cplx Hz;
};

/// Fields of a single cylindrical partial wave with E_z = a Z(kap r),
/// H_z = b Z(kap r) in a medium of index n.
inline CylFields partial_wave(int m, double beta, double k, double n, cplx kap, cplx a, cplx b, cplx Z,
                              cplx Zd, double r) {
    const cplx pre = I / (kap * kap);
    const double dm = m;
    CylFields out;
    out.E(0) = pre * (beta * kap * a * Zd + I * dm * k * b * Z / r);
    out.E(1) = pre * (I * dm * beta * a * Z / r - k * kap * b * Zd);
    out.E(2) = a * Z;
    out.Hphi = pre * (I * dm * beta * b * Z / r + k * n * n * kap * a * Zd);
    out.Hz = b * Z;
    return out;
}

struct ScatteringCoefficients {
    // Per polarization (0: TM, 1: TE): interior (a, b) and scattered (a, b).
    std::array<std::array<cplx, 4>, 2> x;
};

/// Boundary-matching coefficients for both incident polarizations.
inline ScatteringCoefficients radiation_coefficients(int m, double beta, double k, double n, double rho) {
    const double p = std::sqrt(k * k - beta * beta);
    const double hin = std::sqrt(n * n * k * k - beta * beta);
    const cplx J = bessel::J(m, hin * rho), Jd = bessel::Jp(m, hin * rho);
    const cplx H = bessel::H1(m, p * rho), Hd = bessel::H1p(m, p * rho);
    const cplx Jo = bessel::J(m, p * rho), Jod = bessel::Jp(m, p * rho);
    auto tang = [&](cplx a, cplx b, double kap, double nn, cplx Z, cplx Zd) {
        auto f = partial_wave(m, beta, k, nn, kap, a, b, Z, Zd, rho);
        return Eigen::Vector4cd(f.E(2), f.Hz, f.E(1), f.Hphi);
    };
    Eigen::Matrix4cd A;
    A.col(0) = tang(1.0, 0.0, hin, n, J, Jd);
    A.col(1) = tang(0.0, 1.0, hin, n, J, Jd);
    A.col(2) = -tang(1.0, 0.0, p, 1.0, H, Hd);
    A.col(3) = -tang(0.0, 1.0, p, 1.0, H, Hd);
    Eigen::PartialPivLU<Eigen::Matrix4cd> lu(A);
    ScatteringCoefficients out;
    for (int s = 0; s < 2; ++s) {
        const cplx a0 = s == 0 ? cplx(p / k) : cplx(0.0);
        const cplx b0 = s == 0 ? cplx(0.0) : cplx(p / k);
        Eigen::Vector4cd sol = lu.solve(tang(a0, b0, p, 1.0, Jo, Jod));
        if (!sol.allFinite()) throw SolverError("radiation_coefficients: singular boundary system");
        for (int i = 0; i < 4; ++i) out.x[s][i] = sol(i);
    }
    return out;
}

/// Electric field of both radiation scattering states (TM, TE) at radius r,
/// for a core of index n (n = 1 gives free cylindrical waves).
inline std::array<Vec3c, 2> radiation_fields(int m, double beta, double k, double n, double rho, double r) {
    const double p = std::sqrt(k * k - beta * beta);
    std::array<Vec3c, 2> out;
    if (n == 1.0) {
        const cplx Z = bessel::J(m, p * r), Zd = bessel::Jp(m, p * r);
        out[0] = partial_wave(m, beta, k, 1.0, p, p / k, 0.0, Z, Zd, r).E;
        out[1] = partial_wave(m, beta, k, 1.0, p, 0.0, p / k, Z, Zd, r).E;
        return out;
    }
    const auto c = radiation_coefficients(m, beta, k, n, rho);
    if (r >= rho) {
        const cplx Z = bessel::J(m, p * r), Zd = bessel::Jp(m, p * r);
        const cplx H = bessel::H1(m, p * r), Hd = bessel::H1p(m, p * r);
        for (int s = 0; s < 2; ++s) {
            const cplx a0 = s == 0 ? cplx(p / k) : cplx(0.0);
            const cplx b0 = s == 0 ? cplx(0.0) : cplx(p / k);
            out[s] = partial_wave(m, beta, k, 1.0, p, a0, b0, Z, Zd, r).E +
                     partial_wave(m, beta, k, 1.0, p, c.x[s][2], c.x[s][3], H, Hd, r).E;
        }
    } else {
        const double hin = std::sqrt(n * n * k * k - beta * beta);
        const cplx Z = bessel::J(m, hin * r), Zd = bessel::Jp(m, hin * r);
        for (int s = 0; s < 2; ++s)
            out[s] = partial_wave(m, beta, k, n, hin, c.x[s][0], c.x[s][1], Z, Zd, r).E;
    }
    return out;
}

/// Scale factor from the scattering-state fields to the radiation-mode
/// profile e^(u), which carries units of sqrt(time)/length.
inline double radiation_profile_scale(double k) { return std::sqrt(k / (2.0 * pi * speed_of_light)); }

/// Radiation-mode profile e^(u) at radius r. Polarization l = +1 is the
/// TM-incident state, l = -1 the TE-incident state. Reflection in m:
///   e^(-m,l) = l (-1)^m diag(1, -1, 1) e^(m,l).
inline Vec3c radiation_profile(const FiberSpec& fiber, const ModeIndex& mode, double r) {
    if (mode.kind != ModeKind::unguided) throw DomainError("radiation_profile: mode index is not unguided");
    const double k = fiber.k();
    if (!(std::abs(mode.beta) < k)) throw DomainError("radiation_profile: |beta| must be below k");
    if (!(r > 0.0)) throw DomainError("radiation_profile: radius must be positive");
    const auto E = radiation_fields(mode.m, mode.beta, k, fiber.index(), fiber.radius, r);
    return radiation_profile_scale(k) * E[mode.l == 1 ? 0 : 1];
}

}  // namespace fiberqed
