#pragma once

#include <complex>

namespace phototherm {

using cplx = std::complex<double>;

inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double c_light = 299792458.0;      // m / s
inline constexpr double two_pi = 6.283185307179586476925286766559;

inline constexpr cplx ci{0.0, 1.0};

} // namespace phototherm
