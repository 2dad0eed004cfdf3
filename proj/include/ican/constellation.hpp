#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ican/geo.hpp"

namespace ican {

// Walker-style shell definition.
struct ShellConfig {
    int num_planes = 40;
    int sats_per_plane = 60;
    double altitude_m = 1.2e6;
    double inclination_deg = 87.5;
    double raan_offset_deg = 0.0;
    int phasing_factor = 0;        // Walker inter-plane phase parameter
    bool earth_rotation = true;    // rotate inertial motion into ECEF

    int total_sats() const { return num_planes * sats_per_plane; }
    void validate() const;  // throws Error("invalid-config") on bad fields
};

struct SatId {
    int plane = 0;
    int slot = 0;

    auto operator<=>(const SatId&) const = default;
};

// Linear index used for CSV output and hashing; matches SatId ordering.
inline int sat_linear_id(const SatId& id, const ShellConfig& cfg) {
    return id.plane * cfg.sats_per_plane + id.slot;
}

// Circular-orbit elements at epoch 0.
struct OrbitalElement {
    SatId id;
    double semi_major_m = 0.0;
    double inclination_rad = 0.0;
    double raan_rad = 0.0;
    double arg_latitude_epoch_rad = 0.0;  // argument of latitude at t=0
};

struct SatelliteState {
    SatId id;
    Eigen::Vector3d position;  // ECEF (or inertial when earth_rotation off), m
    Eigen::Vector3d velocity;  // frame-consistent derivative of position, m/s
    Geodetic nadir;            // sub-satellite point, alt = 0
};

struct GeometrySample {
    double elevation_deg = 0.0;
    double slant_range_m = 0.0;
    Eigen::Vector3d unit_ue_to_sat;  // ECEF
};

// Satellite visible from a UE, with its geometry attached.
struct VisibleSat {
    SatId id;
    std::size_t state_index = 0;  // into the states vector passed in
    GeometrySample geom;
};

// Evenly spaced Walker shell: RAAN over 360/num_planes, in-plane anomaly over
// 360/sats_per_plane, inter-plane phase = phasing_factor * 360/total.
std::vector<OrbitalElement> build_constellation(const ShellConfig& cfg);

// Circular two-body motion at rate sqrt(mu/a^3). With earth_rotation the
// inertial states are rotated into ECEF at kEarthRotRateRadS; velocity is the
// ECEF-frame derivative (transport term included).
std::vector<SatelliteState> propagate(const std::vector<OrbitalElement>& elements,
                                      double epoch_s, bool earth_rotation);

// Orbital period 2*pi*sqrt(a^3/mu) for a circular orbit at the given altitude.
double orbital_period_s(double altitude_m);

// Elevation, slant range and line-of-sight unit vector, spherical Earth.
GeometrySample geometry(const SatelliteState& sat, const Geodetic& ue);

// Satellites at elevation >= min_elevation_deg, sorted by descending
// elevation; ties broken by ascending sat id.
std::vector<VisibleSat> visible_satellites(const Geodetic& ue,
                                           const std::vector<SatelliteState>& states,
                                           double min_elevation_deg);

}  // namespace ican
