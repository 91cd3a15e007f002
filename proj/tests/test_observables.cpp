#include <gtest/gtest.h>

#include <random>

#include "fiberqed/driven_steady_state.hpp"
#include "fiberqed/observables.hpp"
#include "synthetic.hpp"

using namespace fiberqed;
using fiberqed::testing::from_blocks;
using fiberqed::testing::synthetic_matrices;

namespace {

const Vec3c circ = Vec3c(cplx(0, 1), 0, -1) / std::sqrt(2.0);

const GuidedModeData& guided() {
    static const GuidedModeData g = solve_he11(FiberSpec{220e-9, 1e-6, {}, 1.0});
    return g;
}

}  // namespace

TEST(Collective, SingleAtomLorentzianArea) {
    const auto cm = from_blocks(MatrixXc::Zero(1, 1), MatrixXc::Identity(1, 1));
    const auto o = integrate_collective(cm, VectorXc::Ones(1));
    EXPECT_NEAR(o.Gamma_C, 2 * pi, 1e-7);
    EXPECT_TRUE(o.resolved);
    EXPECT_NEAR(o.beta_C, 0.7, 1e-9);
    EXPECT_NEAR(o.C_C, 3.0 / 7.0, 1e-9);
}

TEST(Collective, WindowedMatchesPoleSum) {
    for (double a : {0.15e-6, 0.37e-6, 0.8e-6}) {
        const ChainSpec chain{12, a, 100e-9, 1e-6, circ};
        const auto cm = synthetic_matrices(chain, guided());
        for (double phi : {pi / 2, 1.0}) {
            const auto v = drive_vector(chain, phi);
            const auto w = integrate_collective(cm, v);
            const auto e = integrate_collective_exact(cm, v);
            EXPECT_NEAR(w.Gamma_C, e.Gamma_C, 1e-6 * e.Gamma_C);
            EXPECT_NEAR(w.Gamma_C_gR, e.Gamma_C_gR, 1e-6 * e.Gamma_C);
            EXPECT_NEAR(w.Gamma_C_gL, e.Gamma_C_gL, 1e-6 * e.Gamma_C);
            EXPECT_NEAR(w.Gamma_C_u, e.Gamma_C_u, 1e-6 * e.Gamma_C);
            EXPECT_NEAR(w.beta_C, e.beta_C, 1e-6);
            EXPECT_NEAR(w.C_C, e.C_C, 1e-6);
        }
    }
}

TEST(Collective, TotalIsTwoPiPerAtom) {
    // Integrating c^dag Gamma c over all detunings gives 2 pi |v|^2 for any
    // dissipative H, so the total cannot depend on geometry.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.1e-6, 1.0e-6);
    for (int t = 0; t < 5; ++t) {
        const ChainSpec chain{3 + 2 * t, U(rng), 100e-9, 1e-6, circ};
        const auto cm = synthetic_matrices(chain, guided());
        const auto e = integrate_collective_exact(cm, drive_vector(chain, 0.4 + 0.3 * t));
        EXPECT_NEAR(e.Gamma_C, 2 * pi * chain.N, 1e-8 * e.Gamma_C);
    }
}

TEST(Collective, RatiosBounded) {
    const ChainSpec chain{9, 0.37e-6, 100e-9, 1e-6, circ};
    const auto cm = synthetic_matrices(chain, guided());
    const auto o = integrate_collective(cm, drive_vector(chain, pi / 2));
    EXPECT_GE(o.beta_C, 0.0);
    EXPECT_LE(o.beta_C, 1.0);
    EXPECT_GE(o.C_C, -1.0);
    EXPECT_LE(o.C_C, 1.0);
    EXPECT_NEAR(o.Gamma_C, o.Gamma_C_g + o.Gamma_C_u, 1e-6 * o.Gamma_C);
    EXPECT_LT(o.tail_fraction, 0.05);
}

TEST(ModeMatching, AngleFormula) {
    const auto phi = mode_matching_angle(0.6e-6, 1e-6, 0.951e-6, 1, 1);
    ASSERT_TRUE(phi.has_value());
    EXPECT_NEAR(std::cos(*phi), 1.0 / 0.6 - 1.0 / 0.951, 1e-12);
    EXPECT_FALSE(mode_matching_angle(0.2e-6, 1e-6, 0.951e-6, 1, 1).has_value());
    EXPECT_THROW(mode_matching_angle(0.37e-6, 1e-6, 0.951e-6, 0, 1), DomainError);
    EXPECT_THROW(mode_matching_angle(0.37e-6, 1e-6, 0.951e-6, 1, 2), DomainError);
}

TEST(Dipole, RotationOrderAndNorm) {
    const Vec3c d = base_circular_dipole();
    EXPECT_NEAR((rotate_dipole(d, 0, 0) - d).norm(), 0.0, 1e-15);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-pi, pi);
    for (int t = 0; t < 10; ++t) EXPECT_NEAR(rotate_dipole(d, U(rng), U(rng)).norm(), 1.0, 1e-14);
    // theta_z = pi/2 sends x to y; theta_x = pi/2 then sends y to z.
    const Vec3c x(1, 0, 0);
    EXPECT_NEAR((rotate_dipole(x, pi / 2, pi / 2) - Vec3c(0, 0, 1)).norm(), 0.0, 1e-15);
}

TEST(SingleAtom, RequiresOneAtom) {
    const FiberSpec fiber{220e-9, 1e-6, {}, 1.0};
    EXPECT_THROW(single_atom(ChainSpec{2, 0.3e-6, 100e-9, 1e-6, circ}, fiber, 0, 0), PreconditionError);
}

TEST(SingleAtom, CircularDipoleDirectionality) {
    const FiberSpec fiber{220e-9, 1e-6, {}, 1.0};
    const auto o = single_atom(ChainSpec{1, 0.0, 100e-9, 1e-6, circ}, fiber, 0, 0);
    EXPECT_NEAR(o.Gamma_gR, 0.15971322450528275, 1e-9);
    EXPECT_NEAR(o.Gamma_u, 1.060310941464932, 1e-7);
    EXPECT_NEAR(o.Gamma_total, o.Gamma_g + o.Gamma_u, 1e-15);
    // Rotating about the fiber axis by pi swaps x -> -x, which mirrors the chirality.
    const auto m = single_atom(ChainSpec{1, 0.0, 100e-9, 1e-6, circ}, fiber, pi, 0);
    EXPECT_NEAR(m.C, -o.C, 1e-9);
}

TEST(Collective, OneAtomReducesToSingleAtom) {
    const FiberSpec fiber{220e-9, 1e-6, {}, 1.0};
    for (double tx : {0.0, 0.4, 1.2}) {
        const Vec3c d = rotate_dipole(base_circular_dipole(), 0.3, tx);
        const ChainSpec chain{1, 0.0, 100e-9, 1e-6, d};
        const auto cm = assemble(chain, fiber);
        const auto o = integrate_collective(cm, drive_vector(chain, 1.0));
        const auto s = single_atom(chain, fiber, 0.0, 0.0);
        EXPECT_NEAR(o.beta_C, s.beta, 1e-4 * s.beta);
        EXPECT_NEAR(o.C_C, s.C, 1e-4 * std::abs(s.C) + 1e-12);
        // Integrated total emission of one atom is 2 pi per Omega_L^2.
        EXPECT_NEAR(o.Gamma_C, 2 * pi, 1e-4 * 2 * pi);
    }
}
