#include "ican/geo.hpp"

#include <cmath>

namespace ican {

Eigen::Vector3d geodetic_to_ecef(const Geodetic& g) {
    const double r = kEarthRadiusM + g.alt_m;
    const double lat = g.lat_deg * kDegToRad;
    const double lon = g.lon_deg * kDegToRad;
    return {r * std::cos(lat) * std::cos(lon),
            r * std::cos(lat) * std::sin(lon),
            r * std::sin(lat)};
}

Geodetic ecef_to_geodetic(const Eigen::Vector3d& ecef) {
    const double r = ecef.norm();
    Geodetic g;
    g.lat_deg = std::asin(ecef.z() / r) * kRadToDeg;
    g.lon_deg = std::atan2(ecef.y(), ecef.x()) * kRadToDeg;
    g.alt_m = r - kEarthRadiusM;
    return g;
}

EnuBasis enu_basis(const Eigen::Vector3d& ground_ecef) {
    EnuBasis b;
    b.up = ground_ecef.normalized();
    b.east = Eigen::Vector3d::UnitZ().cross(b.up).normalized();
    b.north = b.up.cross(b.east);
    return b;
}

double ground_arc_m(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double c = a.normalized().dot(b.normalized());
    return kEarthRadiusM * std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace ican
