#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature for scalar and vector-valued
// integrands. Intervals are refined worst-first; the final sum is taken in
// left-endpoint order so results do not depend on refinement history.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <stdexcept>
#include <vector>

namespace fiberqed::quad {

namespace detail {

inline constexpr std::array<double, 8> xgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for nodes xgk[1], xgk[3], xgk[5], xgk[7].
inline constexpr std::array<double, 4> wg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }
template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

template <typename V>
V zero_like(const V& v) {
    if constexpr (std::is_arithmetic_v<V> || std::is_same_v<V, std::complex<double>>) {
        return V{};
    } else {
        return V::Zero(v.rows(), v.cols());
    }
}

}  // namespace detail

template <typename V>
struct Result {
    V value;
    double error = 0.0;
    int evaluations = 0;
    int intervals = 0;
    bool converged = false;
};

template <typename V>
struct Panel {
    double a, b;
    V value;
    double error;
};

/// One 15-point Kronrod panel with the embedded 7-point Gauss error estimate.
template <typename F>
auto kronrod_panel(F& f, double a, double b) {
    using V = std::decay_t<decltype(f(a))>;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    V fc = f(c);
    V kron = fc * detail::wgk[7];
    V gauss = fc * detail::wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * detail::xgk[j];
        V f1 = f(c - dx);
        V f2 = f(c + dx);
        V s = f1 + f2;
        kron = kron + s * detail::wgk[j];
        if (j % 2 == 1) gauss = gauss + s * detail::wg[j / 2];
    }
    kron = kron * h;
    gauss = gauss * h;
    V diff = kron - gauss;
    return Panel<V>{a, b, kron, detail::magnitude(diff)};
}

struct Options {
    double abs_tol = 0.0;
    double rel_tol = 1e-8;
    int max_intervals = 4000;
    int initial_intervals = 1;
};

/// Integrate f over consecutive panels [points[0], points[1]], ... . The
/// result is flagged unconverged (not thrown) when the interval budget runs
/// out; callers decide how to report it.
template <typename F>
auto integrate(F&& f, const std::vector<double>& points, const Options& opt = {}) {
    using V = std::decay_t<decltype(f(points.front()))>;
    auto worse = [](const Panel<V>& x, const Panel<V>& y) { return x.error < y.error; };
    std::priority_queue<Panel<V>, std::vector<Panel<V>>, decltype(worse)> heap(worse);

    Result<V> out;
    double err_sum = 0.0;
    V total{};
    bool first = true;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        auto p = kronrod_panel(f, points[i], points[i + 1]);
        out.evaluations += 15;
        total = first ? p.value : V(total + p.value);
        first = false;
        err_sum += p.error;
        heap.push(std::move(p));
    }
    if (heap.empty()) throw std::invalid_argument("quad::integrate: empty integration range");

    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)); };
    while (err_sum > target() && static_cast<int>(heap.size()) < opt.max_intervals) {
        Panel<V> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {  // interval at machine resolution
            heap.push(std::move(worst));
            break;
        }
        auto left = kronrod_panel(f, worst.a, mid);
        auto right = kronrod_panel(f, mid, worst.b);
        out.evaluations += 30;
        total = total - worst.value + left.value + right.value;
        err_sum += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
    }

    std::vector<Panel<V>> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    V sum = detail::zero_like(panels.front().value);
    double err = 0.0;
    for (const auto& p : panels) {
        sum = sum + p.value;
        err += p.error;
    }
    out.value = sum;
    out.error = err;
    out.intervals = static_cast<int>(panels.size());
    out.converged = err <= std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(sum));
    return out;
}

/// Integrate f over [a, b], starting from opt.initial_intervals equal panels.
template <typename F>
auto integrate(F&& f, double a, double b, const Options& opt = {}) {
    const int n0 = std::max(1, opt.initial_intervals);
    std::vector<double> pts(n0 + 1);
    for (int i = 0; i <= n0; ++i) pts[i] = (i == n0) ? b : a + (b - a) * i / n0;
    return integrate(std::forward<F>(f), pts, opt);
}

}  // namespace fiberqed::quad
