#pragma once

#include <array>
#include <vector>

#include "ican/beams.hpp"
#include "ican/constellation.hpp"

namespace ican {

inline constexpr int kMaxColors = 4;

// Handheld-class receiver front end.
struct UeRfModel {
    double antenna_gain_dbi = 0.0;
    double noise_figure_db = 7.0;
    double antenna_temperature_k = 290.0;
    double per_color_bandwidth_hz = 10e6;
    double extra_loss_db = 0.0;  // fixed scenario loss for sensitivity studies

    void validate() const;
};

struct LinkMeasurement {
    int ue_id = -1;
    SatId sat;
    int beam_index = -1;
    double rsrp_dbm = 0.0;
    double sinr_db = 0.0;
    double snr_db = 0.0;
    double off_boresight_rad = 0.0;
    double slant_range_m = 0.0;
};

// 20*log10(4*pi*d*f/c).
double free_space_path_loss_db(double distance_m, double frequency_hz);

// kTB over the color bandwidth with T_sys = T_ant + 290*(10^(NF/10)-1), dBm.
double noise_power_dbm(const UeRfModel& rf);

// Boresight EIRP over one color bandwidth, linear watts.
double eirp_color_w(const AntennaModel& ant, const UeRfModel& rf);

// Received power of one beam at the UE, dBm (-inf at a pattern null).
// Throws "inactive-beam" if the beam is switched off in the plan.
double received_power_dbm(const BeamPlan& plan, std::size_t sat_index, int beam_index,
                          const std::vector<SatelliteState>& states, const Geodetic& ue,
                          const AntennaModel& ant, const UeRfModel& rf);

// Aggregate per-UE evaluation of a beam plan: per-satellite, per-color best
// beam powers plus network-wide co-color totals. One pass over every active
// beam of every satellite above the UE's horizon.
struct SatLinkEval {
    bool above_horizon = false;
    double elevation_deg = -90.0;
    double slant_range_m = 0.0;
    std::array<double, kMaxColors> color_power_w{};  // this satellite's total per color
    std::array<double, kMaxColors> best_power_w{};   // strongest beam per color
    std::array<int, kMaxColors> best_beam{-1, -1, -1, -1};
    std::array<double, kMaxColors> best_off_boresight{};
};

struct UePlanEval {
    std::vector<SatLinkEval> sats;             // parallel to plan.sats
    std::array<double, kMaxColors> color_total_w{};
    double noise_w = 0.0;
};

UePlanEval evaluate_plan(const Geodetic& ue, const BeamPlan& plan,
                         const std::vector<SatelliteState>& states,
                         const AntennaModel& ant, const UeRfModel& rf);

// Single-satellite contribution, reusable for delta updates when only a few
// satellites differ between two plans.
SatLinkEval evaluate_sat(const Geodetic& ue, const SatBeamSet& set,
                         const std::vector<int>& colors,
                         const std::vector<SatelliteState>& states,
                         const AntennaModel& ant, const UeRfModel& rf);

// Best-beam measurement for one satellite given network color totals.
// Picks the beam maximizing SINR; ties resolved toward the lower color index.
LinkMeasurement best_measurement(const SatLinkEval& eval, const SatId& sat,
                                 const std::array<double, kMaxColors>& color_total_w,
                                 double noise_w);

// Full-plan SINR of one target beam (spec-style single-beam query).
LinkMeasurement sinr(const Geodetic& ue, const BeamPlan& plan, std::size_t sat_index,
                     int beam_index, const std::vector<SatelliteState>& states,
                     const AntennaModel& ant, const UeRfModel& rf);

double db_from_linear(double x);
double linear_from_db(double db);

}  // namespace ican
