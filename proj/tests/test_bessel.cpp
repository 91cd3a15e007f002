#include <gtest/gtest.h>

#include <cmath>

#include "fiberqed/bessel.hpp"

using namespace fiberqed;

namespace {

struct Row {
    int n;
    double x, J, Y, K, I;
};

// Reference values from 40-digit arbitrary-precision evaluation.
const Row table[] = {
    {0, 0.05, 0.99937509764946858081, -1.9793110008172096366, 3.1142340294719898387, 1.000625097663031949},
    {0, 1.3, 0.62008598956150910849, 0.28653535716557011776, 0.27824764630002698247, 1.4692777979442509241},
    {1, 0.4, 0.19602657795531875455, -1.7808720442700513199, 2.1843544247326872337, 0.20402675573357060806},
    {1, 2.2, 0.55596304981906391382, 0.001487789289763368232, 0.10789681011908725046, 1.9140946505863864718},
    {2, 0.9, 0.094586304274801170611, -1.9459096009826028336, 2.0790271498873872359, 0.1082597253709859308},
    {2, 3.7, 0.42832965620657586556, 0.11915507531954182124, 0.025159327544450043464, 4.7192954719881338956},
    {3, 1.7, 0.085149926948015258315, -1.5670362330493097343, 1.1783157298719844071, 0.12223264970844363605},
    {5, 2.5, 0.019501625134503219886, -3.830176000740751863, 2.7168842907865433582, 0.032843475172023213389},
    {7, 0.8, 3.1863526255933476453e-7, -143672.95784390364736, 213959.70390656492282, 3.3163905361528306247e-7},
    {10, 4.0, 0.0001950405546600345098, -178.33055590796431174, 114.91408364049616836, 0.00040378896132693060265},
    {15, 3.1, 4.7094758978185979604e-10, -46058798.797885213691, 51328389.202430496744, 6.3592082665192038291e-10},
    {20, 6.5, 4.271003592807386979e-9, -3941061.5304623591362, 2034882.6910940523966, 1.1683027252169298198e-8},
    {25, 2.0, 6.203528306296886343e-26, -2.0590544596781932214e+23, 2.9757498528362230687e+23, 6.699556894866545022e-26},
    {30, 9.0, 7.6921564693355001859e-14, -144607097991.58717285, 56173720664.54007734, 2.8417503117164804955e-13},
    {1, 8.5, 0.27312196367405374427, -0.026168679398537470028, 0.000091197247750068985436, 641.6199025400667608},
    {0, 12.0, 0.047689310796833536624, -0.22523731263436143369, 2.2008253973114914005e-6, 18948.925349296308861},
    {4, 0.2, 4.1583402744719335632e-6, -19162.41484104570792, 29900.249178224061422, 4.1750069477523573084e-6},
    {12, 0.6, 1.1018201097456805662e-15, -24104912679882.042601, 37249358610704.458776, 1.1171821902696564522e-15},
    {6, 5.5, 0.18678273301384587586, -0.55046679267324345356, 0.036927486645522171451, 1.6610815611166202845},
    {40, 1.5, 1.2157553391372473294e-53, -6.5501269994146257289e+50, 9.9963596056519903067e+50, 1.2495763679461264857e-53},
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Bessel, MatchesHighPrecisionTable) {
    for (const auto& r : table) {
        SCOPED_TRACE(testing::Message() << "n=" << r.n << " x=" << r.x);
        EXPECT_LE(rel(bessel::J(r.n, r.x), r.J), 1e-12);
        EXPECT_LE(rel(bessel::Y(r.n, r.x), r.Y), 1e-12);
        EXPECT_LE(rel(bessel::K(r.n, r.x), r.K), 1e-12);
        EXPECT_LE(rel(bessel::In(r.n, r.x), r.I), 1e-12);
    }
}

TEST(Bessel, NegativeOrders) {
    for (int n = 1; n <= 6; ++n) {
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        EXPECT_DOUBLE_EQ(bessel::J(-n, 1.7), sgn * bessel::J(n, 1.7));
        EXPECT_DOUBLE_EQ(bessel::Y(-n, 1.7), sgn * bessel::Y(n, 1.7));
        EXPECT_DOUBLE_EQ(bessel::K(-n, 1.7), bessel::K(n, 1.7));
    }
}

TEST(Bessel, DerivativesAgreeWithFiniteDifferences) {
    const double x = 2.3, d = 1e-5;
    for (int n = -3; n <= 5; ++n) {
        EXPECT_NEAR(bessel::Jp(n, x), (bessel::J(n, x + d) - bessel::J(n, x - d)) / (2 * d), 1e-9);
        EXPECT_NEAR(bessel::Yp(n, x), (bessel::Y(n, x + d) - bessel::Y(n, x - d)) / (2 * d), 1e-8);
        EXPECT_NEAR(bessel::Kp(n, x), (bessel::K(n, x + d) - bessel::K(n, x - d)) / (2 * d), 1e-8);
        EXPECT_NEAR(bessel::Ip(n, x), (bessel::In(n, x + d) - bessel::In(n, x - d)) / (2 * d), 1e-8);
    }
}

TEST(Bessel, WronskianOfHankel) {
    // J_n Y'_n - J'_n Y_n = 2 / (pi x)
    for (int n : {0, 1, 4, 11}) {
        for (double x : {0.3, 1.9, 7.5}) {
            const double w = bessel::J(n, x) * bessel::Yp(n, x) - bessel::Jp(n, x) * bessel::Y(n, x);
            EXPECT_NEAR(w * pi * x / 2.0, 1.0, 1e-10);
        }
    }
}
