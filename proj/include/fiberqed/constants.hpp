#pragma once

#include <complex>
#include <numbers>

namespace fiberqed {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr cplx I{0.0, 1.0};

}  // namespace fiberqed
