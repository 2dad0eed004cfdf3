#pragma once

namespace ican {

// Bessel function of the first kind, order 1.
//
// Classic rational/asymptotic approximation (Abramowitz & Stegun 9.4 fits).
// Absolute error below ~1e-8 over the full range, which is far below any
// link-budget tolerance here, at roughly 10x the speed of the libstdc++
// special function. Verified against std::cyl_bessel_j in the unit tests.
double bessel_j1(double x);

// First positive root of J1; boundary of the antenna pattern main lobe.
inline constexpr double kBesselJ1FirstRoot = 3.8317059702075123;

}  // namespace ican
