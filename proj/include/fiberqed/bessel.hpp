#pragma once

// Integer-order Bessel functions of real argument. Thin wrappers over
// Boost.Math that accept negative orders and provide derivatives.

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include <cstdlib>

#include "fiberqed/constants.hpp"

namespace fiberqed::bessel {

namespace detail {
inline double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }
}  // namespace detail

inline double J(int n, double x) {
    if (n < 0) return detail::parity(n) * boost::math::cyl_bessel_j(-n, x);
    return boost::math::cyl_bessel_j(n, x);
}

inline double Y(int n, double x) {
    if (n < 0) return detail::parity(n) * boost::math::cyl_neumann(-n, x);
    return boost::math::cyl_neumann(n, x);
}

// K and I are even in the order.
inline double K(int n, double x) { return boost::math::cyl_bessel_k(std::abs(n), x); }
inline double In(int n, double x) { return boost::math::cyl_bessel_i(std::abs(n), x); }

// Derivatives via the recurrences Z'_n = (Z_{n-1} - Z_{n+1}) / 2 for J, Y
// and K'_n = -(K_{n-1} + K_{n+1}) / 2, I'_n = (I_{n-1} + I_{n+1}) / 2.
inline double Jp(int n, double x) { return 0.5 * (J(n - 1, x) - J(n + 1, x)); }
inline double Yp(int n, double x) { return 0.5 * (Y(n - 1, x) - Y(n + 1, x)); }
inline double Kp(int n, double x) { return -0.5 * (K(n - 1, x) + K(n + 1, x)); }
inline double Ip(int n, double x) { return 0.5 * (In(n - 1, x) + In(n + 1, x)); }

/// Hankel function of the first kind, H_n^(1) = J_n + i Y_n.
inline cplx H1(int n, double x) { return {J(n, x), Y(n, x)}; }
inline cplx H1p(int n, double x) { return {Jp(n, x), Yp(n, x)}; }

}  // namespace fiberqed::bessel
