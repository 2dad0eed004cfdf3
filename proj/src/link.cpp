#include "ican/link.hpp"

#include <cmath>
#include <limits>

#include "ican/bessel.hpp"
#include "ican/constants.hpp"
#include "ican/errors.hpp"

namespace ican {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void UeRfModel::validate() const {
    if (per_color_bandwidth_hz <= 0.0)
        throw Error("invalid-config", "per-color bandwidth must be positive");
    if (noise_figure_db < 0.0)
        throw Error("invalid-config", "noise figure must be >= 0 dB");
    if (antenna_temperature_k < 0.0)
        throw Error("invalid-config", "antenna temperature must be >= 0 K");
}

double db_from_linear(double x) {
    return x > 0.0 ? 10.0 * std::log10(x) : kNegInf;
}

double linear_from_db(double db) {
    return std::pow(10.0, db / 10.0);
}

double free_space_path_loss_db(double distance_m, double frequency_hz) {
    if (distance_m <= 0.0) throw Error("invalid-config", "distance must be positive");
    return 20.0 * std::log10(4.0 * kPi * distance_m * frequency_hz / kSpeedOfLightMS);
}

double noise_power_dbm(const UeRfModel& rf) {
    rf.validate();
    const double t_sys =
        rf.antenna_temperature_k + 290.0 * (linear_from_db(rf.noise_figure_db) - 1.0);
    return db_from_linear(kBoltzmannJK * t_sys * rf.per_color_bandwidth_hz) + 30.0;
}

double eirp_color_w(const AntennaModel& ant, const UeRfModel& rf) {
    const double eirp_dbw = ant.boresight_eirp_density_dbw_mhz +
                            10.0 * std::log10(rf.per_color_bandwidth_hz / 1e6);
    return linear_from_db(eirp_dbw);
}

namespace {

// EIRP * G_rx * (lambda/(4*pi))^2 / extra-loss: received watts = this / d^2 * gain.
double link_constant(const AntennaModel& ant, const UeRfModel& rf) {
    const double lam_over_4pi = kSpeedOfLightMS / ant.carrier_hz / (4.0 * kPi);
    return eirp_color_w(ant, rf) * linear_from_db(rf.antenna_gain_dbi) *
           lam_over_4pi * lam_over_4pi / linear_from_db(rf.extra_loss_db);
}

// Pattern gain from the cosine of the off-boresight angle; back hemisphere
// is fully suppressed.
double gain_from_cos(double cos_off, double ka) {
    if (cos_off <= 0.0) return 0.0;
    const double s2 = std::max(0.0, 1.0 - cos_off * cos_off);
    if (s2 == 0.0) return 1.0;
    const double x = ka * std::sqrt(s2);
    const double t = 2.0 * bessel_j1(x) / x;
    return t * t;
}

}  // namespace

SatLinkEval evaluate_sat(const Geodetic& ue, const SatBeamSet& set,
                         const std::vector<int>& colors,
                         const std::vector<SatelliteState>& states,
                         const AntennaModel& ant, const UeRfModel& rf) {
    const SatelliteState& st = states[set.state_index];
    SatLinkEval ev;
    const GeometrySample g = geometry(st, ue);
    ev.elevation_deg = g.elevation_deg;
    ev.slant_range_m = g.slant_range_m;
    ev.above_horizon = g.elevation_deg >= 0.0;
    if (!ev.above_horizon) return ev;

    const Eigen::Vector3d to_ue = -g.unit_ue_to_sat;  // satellite -> UE
    const double ka = ant.wavenumber() * ant.aperture_radius_m;
    const double c0 = link_constant(ant, rf) / (g.slant_range_m * g.slant_range_m);

    for (std::size_t b = 0; b < set.uv.size(); ++b) {
        if (!set.active[b]) continue;
        const double cos_off = set.dir[b].dot(to_ue);
        const double gain = gain_from_cos(cos_off, ka);
        if (gain <= 0.0) continue;
        const double p = c0 * gain;
        const int c = colors[b];
        ev.color_power_w[c] += p;
        if (p > ev.best_power_w[c]) {
            ev.best_power_w[c] = p;
            ev.best_beam[c] = static_cast<int>(b);
            ev.best_off_boresight[c] = std::acos(std::clamp(cos_off, -1.0, 1.0));
        }
    }
    return ev;
}

UePlanEval evaluate_plan(const Geodetic& ue, const BeamPlan& plan,
                         const std::vector<SatelliteState>& states,
                         const AntennaModel& ant, const UeRfModel& rf) {
    UePlanEval out;
    out.noise_w = linear_from_db(noise_power_dbm(rf) - 30.0);
    out.sats.reserve(plan.sats.size());
    for (const SatBeamSet& set : plan.sats) {
        SatLinkEval ev = evaluate_sat(ue, set, plan.colors, states, ant, rf);
        for (int c = 0; c < kMaxColors; ++c) out.color_total_w[c] += ev.color_power_w[c];
        out.sats.push_back(std::move(ev));
    }
    return out;
}

LinkMeasurement best_measurement(const SatLinkEval& eval, const SatId& sat,
                                 const std::array<double, kMaxColors>& color_total_w,
                                 double noise_w) {
    LinkMeasurement m;
    m.sat = sat;
    m.rsrp_dbm = kNegInf;
    m.sinr_db = kNegInf;
    m.snr_db = kNegInf;
    m.slant_range_m = eval.slant_range_m;
    if (!eval.above_horizon) return m;

    double best_sinr = -1.0;
    for (int c = 0; c < kMaxColors; ++c) {
        if (eval.best_beam[c] < 0) continue;
        const double p = eval.best_power_w[c];
        const double interf = std::max(0.0, color_total_w[c] - p);
        const double s = p / (interf + noise_w);
        if (s > best_sinr) {
            best_sinr = s;
            m.beam_index = eval.best_beam[c];
            m.rsrp_dbm = db_from_linear(p) + 30.0;
            m.sinr_db = db_from_linear(s);
            m.snr_db = db_from_linear(p / noise_w);
            m.off_boresight_rad = eval.best_off_boresight[c];
        }
    }
    return m;
}

double received_power_dbm(const BeamPlan& plan, std::size_t sat_index, int beam_index,
                          const std::vector<SatelliteState>& states, const Geodetic& ue,
                          const AntennaModel& ant, const UeRfModel& rf) {
    const SatBeamSet& set = plan.sats.at(sat_index);
    if (!set.active.at(beam_index))
        throw Error("inactive-beam", "received power of a switched-off beam");
    const SatelliteState& st = states[set.state_index];
    const GeometrySample g = geometry(st, ue);
    if (g.elevation_deg < 0.0)
        throw Error("invalid-config", "UE below the satellite horizon");
    const double cos_off = set.dir[beam_index].dot(-g.unit_ue_to_sat);
    const double gain = gain_from_cos(cos_off, ant.wavenumber() * ant.aperture_radius_m);
    const double p =
        link_constant(ant, rf) / (g.slant_range_m * g.slant_range_m) * gain;
    return db_from_linear(p) + 30.0;
}

LinkMeasurement sinr(const Geodetic& ue, const BeamPlan& plan, std::size_t sat_index,
                     int beam_index, const std::vector<SatelliteState>& states,
                     const AntennaModel& ant, const UeRfModel& rf) {
    const SatBeamSet& set = plan.sats.at(sat_index);
    if (!set.active.at(beam_index))
        throw Error("inactive-beam", "SINR of a switched-off beam");
    const UePlanEval ev = evaluate_plan(ue, plan, states, ant, rf);
    const SatLinkEval& se = ev.sats[sat_index];

    LinkMeasurement m;
    m.sat = set.sat;
    m.beam_index = beam_index;
    m.slant_range_m = se.slant_range_m;
    m.rsrp_dbm = kNegInf;
    m.sinr_db = kNegInf;
    m.snr_db = kNegInf;
    if (!se.above_horizon) return m;

    // Recompute the target beam's power (it may not be the per-color best).
    const SatelliteState& st = states[set.state_index];
    const GeometrySample g = geometry(st, ue);
    const double cos_off = set.dir[beam_index].dot(-g.unit_ue_to_sat);
    const double gain = gain_from_cos(cos_off, ant.wavenumber() * ant.aperture_radius_m);
    const double p =
        link_constant(ant, rf) / (g.slant_range_m * g.slant_range_m) * gain;
    const int c = plan.colors[beam_index];
    const double interf = std::max(0.0, ev.color_total_w[c] - p);
    m.off_boresight_rad = std::acos(std::clamp(cos_off, -1.0, 1.0));
    m.rsrp_dbm = db_from_linear(p) + 30.0;
    m.snr_db = db_from_linear(p / ev.noise_w);
    m.sinr_db = db_from_linear(p / (interf + ev.noise_w));
    return m;
}

}  // namespace ican
