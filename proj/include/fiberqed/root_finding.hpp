#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "fiberqed/errors.hpp"

namespace fiberqed::roots {

struct Bracket {
    double lo, hi;
};

/// Sample f on a uniform grid over [a, b] and return every sub-interval
/// across which f changes sign. Non-finite samples are skipped.
template <typename F>
std::vector<Bracket> scan_sign_changes(F&& f, double a, double b, int samples) {
    std::vector<Bracket> out;
    double x_prev = a;
    double f_prev = f(a);
    for (int i = 1; i <= samples; ++i) {
        const double x = (i == samples) ? b : a + (b - a) * i / samples;
        const double fx = f(x);
        if (std::isfinite(fx) && std::isfinite(f_prev) && ((fx < 0) != (f_prev < 0)))
            out.push_back({x_prev, x});
        if (std::isfinite(fx)) {
            x_prev = x;
            f_prev = fx;
        }
    }
    return out;
}

struct RootResult {
    double x;
    double residual;
    int iterations;
};

/// Bisection safeguarded secant iteration on a sign-change bracket.
/// Converges when the bracket is narrower than rel_tol * |x| (or a few ulp).
template <typename F>
RootResult solve_bracketed(F&& f, double lo, double hi, double rel_tol = 1e-15, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo < 0) == (fhi < 0)) throw SolverError("solve_bracketed: no sign change in bracket");

    double width_prev = hi - lo;
    for (int it = 1; it <= max_iter; ++it) {
        // Secant through the bracket ends, unless it stalls.
        double x = hi - fhi * (hi - lo) / (fhi - flo);
        const double width = hi - lo;
        if (!(x > lo && x < hi) || width > 0.5 * width_prev) x = 0.5 * (lo + hi);
        width_prev = width;

        const double fx = f(x);
        if (fx == 0.0) return {x, 0.0, it};
        if ((fx < 0) == (flo < 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        const double scale = std::max(std::abs(lo), std::abs(hi));
        const double tol = std::max(rel_tol * scale, 4.0 * std::numeric_limits<double>::epsilon() * scale);
        if (hi - lo <= tol) {
            const bool pick_lo = std::abs(flo) < std::abs(fhi);
            return {pick_lo ? lo : hi, pick_lo ? flo : fhi, it};
        }
    }
    std::ostringstream msg;
    msg << "solve_bracketed: no convergence after " << max_iter << " iterations, residual "
        << std::min(std::abs(flo), std::abs(fhi));
    throw SolverError(msg.str());
}

}  // namespace fiberqed::roots
