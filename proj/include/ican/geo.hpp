#pragma once

#include <Eigen/Dense>

#include "ican/constants.hpp"

namespace ican {

// Geodetic coordinates on the spherical Earth model.
struct Geodetic {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double alt_m = 0.0;
};

// Geodetic -> ECEF on a sphere of radius kEarthRadiusM + alt.
Eigen::Vector3d geodetic_to_ecef(const Geodetic& g);

// ECEF -> geodetic (spherical). alt = |r| - kEarthRadiusM.
Geodetic ecef_to_geodetic(const Eigen::Vector3d& ecef);

// Local east/north/up unit vectors at a ground point (spherical Earth).
// Undefined at the poles; callers keep UEs away from them.
struct EnuBasis {
    Eigen::Vector3d east;
    Eigen::Vector3d north;
    Eigen::Vector3d up;
};
EnuBasis enu_basis(const Eigen::Vector3d& ground_ecef);

// Great-circle distance between two ECEF directions, in meters of ground arc.
double ground_arc_m(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

}  // namespace ican
