#include "ican/constellation.hpp"

#include <algorithm>
#include <cmath>

#include "ican/constants.hpp"
#include "ican/errors.hpp"

namespace ican {

void ShellConfig::validate() const {
    if (num_planes < 1 || sats_per_plane < 1)
        throw Error("invalid-config", "plane/slot counts must be >= 1");
    if (altitude_m <= 0.0)
        throw Error("invalid-config", "altitude must be positive");
    if (inclination_deg < 0.0 || inclination_deg > 180.0)
        throw Error("invalid-config", "inclination outside [0, 180] deg");
}

std::vector<OrbitalElement> build_constellation(const ShellConfig& cfg) {
    cfg.validate();
    const int total = cfg.total_sats();
    const double raan_step = 2.0 * kPi / cfg.num_planes;
    const double anomaly_step = 2.0 * kPi / cfg.sats_per_plane;
    const double phase_step = cfg.phasing_factor * 2.0 * kPi / total;

    std::vector<OrbitalElement> out;
    out.reserve(total);
    for (int p = 0; p < cfg.num_planes; ++p) {
        for (int s = 0; s < cfg.sats_per_plane; ++s) {
            OrbitalElement e;
            e.id = {p, s};
            e.semi_major_m = kEarthRadiusM + cfg.altitude_m;
            e.inclination_rad = cfg.inclination_deg * kDegToRad;
            e.raan_rad = cfg.raan_offset_deg * kDegToRad + p * raan_step;
            e.arg_latitude_epoch_rad = s * anomaly_step + p * phase_step;
            out.push_back(e);
        }
    }
    return out;
}

double orbital_period_s(double altitude_m) {
    const double a = kEarthRadiusM + altitude_m;
    return 2.0 * kPi * std::sqrt(a * a * a / kMuEarth);
}

std::vector<SatelliteState> propagate(const std::vector<OrbitalElement>& elements,
                                      double epoch_s, bool earth_rotation) {
    std::vector<SatelliteState> out;
    out.reserve(elements.size());
    const double theta_e = earth_rotation ? kEarthRotRateRadS * epoch_s : 0.0;
    const double cte = std::cos(theta_e);
    const double ste = std::sin(theta_e);

    for (const auto& e : elements) {
        if (e.semi_major_m <= kEarthRadiusM)
            throw Error("invalid-config", "semi-major axis below Earth radius");
        const double a = e.semi_major_m;
        const double n = std::sqrt(kMuEarth / (a * a * a));
        const double u = e.arg_latitude_epoch_rad + n * epoch_s;

        const double cu = std::cos(u), su = std::sin(u);
        const double ci = std::cos(e.inclination_rad), si = std::sin(e.inclination_rad);
        const double co = std::cos(e.raan_rad), so = std::sin(e.raan_rad);

        // Rz(raan) * Rx(incl) applied to in-plane position/velocity.
        const Eigen::Vector3d pos_i(a * (cu * co - su * ci * so),
                                    a * (cu * so + su * ci * co),
                                    a * su * si);
        const double v = n * a;
        const Eigen::Vector3d vel_i(v * (-su * co - cu * ci * so),
                                    v * (-su * so + cu * ci * co),
                                    v * cu * si);

        SatelliteState st;
        st.id = e.id;
        if (earth_rotation) {
            // Rotate into ECEF (Rz(-theta_e)) and add the transport term so
            // velocity is the ECEF-frame derivative of position.
            st.position = {cte * pos_i.x() + ste * pos_i.y(),
                           -ste * pos_i.x() + cte * pos_i.y(), pos_i.z()};
            const Eigen::Vector3d vel_rot(cte * vel_i.x() + ste * vel_i.y(),
                                          -ste * vel_i.x() + cte * vel_i.y(),
                                          vel_i.z());
            const Eigen::Vector3d omega(0.0, 0.0, kEarthRotRateRadS);
            st.velocity = vel_rot - omega.cross(st.position);
        } else {
            st.position = pos_i;
            st.velocity = vel_i;
        }
        st.nadir = ecef_to_geodetic(st.position);
        st.nadir.alt_m = 0.0;
        out.push_back(st);
    }
    return out;
}

GeometrySample geometry(const SatelliteState& sat, const Geodetic& ue) {
    const Eigen::Vector3d ue_ecef = geodetic_to_ecef(ue);
    const Eigen::Vector3d los = sat.position - ue_ecef;
    GeometrySample g;
    g.slant_range_m = los.norm();
    g.unit_ue_to_sat = los / g.slant_range_m;
    const Eigen::Vector3d up = ue_ecef.normalized();
    const double s = std::clamp(up.dot(g.unit_ue_to_sat), -1.0, 1.0);
    g.elevation_deg = std::asin(s) * kRadToDeg;
    return g;
}

std::vector<VisibleSat> visible_satellites(const Geodetic& ue,
                                           const std::vector<SatelliteState>& states,
                                           double min_elevation_deg) {
    std::vector<VisibleSat> out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        GeometrySample g = geometry(states[i], ue);
        if (g.elevation_deg >= min_elevation_deg)
            out.push_back({states[i].id, i, g});
    }
    std::sort(out.begin(), out.end(), [](const VisibleSat& a, const VisibleSat& b) {
        if (a.geom.elevation_deg != b.geom.elevation_deg)
            return a.geom.elevation_deg > b.geom.elevation_deg;
        return a.id < b.id;
    });
    return out;
}

}  // namespace ican
