#pragma once

// Physical constants shared across the simulator. SI units throughout.

namespace ican {

inline constexpr double kEarthRadiusM = 6371e3;       // spherical Earth model
inline constexpr double kMuEarth = 3.986004418e14;    // m^3/s^2
inline constexpr double kEarthRotRateRadS = 7.2921159e-5;
inline constexpr double kSpeedOfLightMS = 299792458.0;
inline constexpr double kBoltzmannJK = 1.380649e-23;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace ican
