#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ican/constellation.hpp"

namespace ican {

// Direction cosines in the satellite UV plane (u^2 + v^2 <= 1).
struct UVPoint {
    double u = 0.0;
    double v = 0.0;
};

enum class BeamRole : std::uint8_t { Communication, Positioning };
enum class Phase : std::uint8_t { CRSB, PRSB };
enum class Scheme : std::uint8_t { BH, TMCB };

struct BeamSpec {
    SatId owner;
    int beam_index = 0;
    UVPoint uv;
    int color = 0;
    BeamRole role = BeamRole::Communication;
    bool active = true;
};

// Bessel-aperture antenna model.
struct AntennaModel {
    double aperture_radius_m = 1.0;
    double carrier_hz = 2e9;
    double boresight_eirp_density_dbw_mhz = 40.0;

    double wavenumber() const;          // 2*pi*f/c
    void validate() const;
};

// Normalized aperture gain 4*|J1(x)/x|^2 with x = k*a*sin(angle); 1 at
// boresight, 0 behind the aperture plane (angle > pi/2).
double pattern_gain(double off_boresight_rad, const AntennaModel& model);

// Argument x where the pattern crosses half power (gain 0.5), by bisection.
double half_power_x();

// Full half-power beamwidth of the pattern, radians.
double half_power_beamwidth_rad(const AntennaModel& model);

// Adjacent-beam spacing convention: sqrt(3) * sin(HPBW/2).
double default_uv_spacing(const AntennaModel& model);

// Hexagonal lattice of 3r^2+3r+1 points centered at (0,0): center first,
// then rings 1..r counter-clockwise starting on the +u axis. Throws
// "layout-exceeds-unit-disk" if the lattice leaves the unit disk.
std::vector<UVPoint> hex_layout(int rings, double uv_spacing);

// Pointwise shift of a layout in UV coordinates; throws
// "layout-exceeds-unit-disk" if any shifted point leaves the unit disk.
std::vector<UVPoint> translate_layout(const std::vector<UVPoint>& layout, UVPoint center);

// Lattice coloring: reuse 1 -> all 0; reuse 3/4 -> proper coloring where
// adjacent beams never share a color. Deterministic given the layout.
std::vector<int> assign_colors(const std::vector<UVPoint>& layout, int reuse_factor);

// Satellite-local UV frame: e1 = velocity projected normal to the nadir
// direction, e2 = nadir x e1. Beam direction = u*e1 + v*e2 + w*nadir_dir.
struct UvBasis {
    Eigen::Vector3d e1;
    Eigen::Vector3d e2;
    Eigen::Vector3d nadir_dir;
};
UvBasis uv_basis(const SatelliteState& sat);

Eigen::Vector3d beam_direction(const UvBasis& basis, UVPoint uv);

// UV coordinates steering a beam at target_ecef: (sin t cos p, sin t sin p)
// with t the angle off nadir and p the azimuth in the UV basis. Throws
// "target-behind-satellite" when the target is >= 90 deg off nadir.
UVPoint steer_to_target(const SatelliteState& sat, const Eigen::Vector3d& target_ecef);

// First intersection of a ray from the satellite with the spherical Earth.
std::optional<Eigen::Vector3d> ground_intersection(const Eigen::Vector3d& sat_pos,
                                                   const Eigen::Vector3d& dir);

// Per-satellite slice of a network beam plan. Beam colors are shared across
// satellites (aligned color maps); directions are precomputed world-frame
// unit vectors for link evaluation.
struct SatBeamSet {
    SatId sat;
    std::size_t state_index = 0;
    bool redirected = false;
    std::vector<UVPoint> uv;
    std::vector<Eigen::Vector3d> dir;
    std::vector<std::uint8_t> active;

    int active_count() const;
};

struct BeamPlan {
    Scheme scheme = Scheme::TMCB;
    Phase phase = Phase::CRSB;
    BeamRole role = BeamRole::Communication;
    SatId serving;
    std::vector<SatId> assisting;
    std::vector<int> colors;         // per beam index, common to all satellites
    std::vector<SatBeamSet> sats;
    double footprint_radius_m = 0.0; // serving communication footprint (ground arc)

    // Flattened per-beam view in (satellite, beam_index) order.
    std::vector<BeamSpec> all_beams() const;
};

struct BeamPlanOptions {
    bool edge_shutoff = true;  // drop assisting beams outside the serving footprint
};

// Network-wide plan over `states` (pass every satellite that can matter to the
// observers of interest). CRSB phase and TMCB keep every layout on its own
// nadir. BH+PRSB re-points each assisting satellite's layout at the serving
// satellite's nadir; beams that would leave the unit disk are switched off,
// and edge_shutoff additionally drops beams landing outside the serving
// communication footprint.
BeamPlan build_beam_plan(Scheme scheme, Phase phase, std::size_t serving_index,
                         const std::vector<std::size_t>& assisting_indices,
                         const std::vector<SatelliteState>& states,
                         const std::vector<UVPoint>& base_layout,
                         const std::vector<int>& colors,
                         const BeamPlanOptions& opts = {});

}  // namespace ican
