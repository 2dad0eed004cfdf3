#include "ican/procedure.hpp"

#include <cmath>
#include <limits>

#include "ican/errors.hpp"

namespace ican {

void IsbSchedule::validate() const {
    if (t_per_s <= 0.0 || t_crsb_s <= 0.0 || t_prsb_s <= 0.0)
        throw Error("invalid-config", "schedule durations must be positive");
    if (t_crsb_s + t_prsb_s > t_per_s)
        throw Error("invalid-config", "CRSB + PRSB exceed the period");
}

WindowInfo schedule_windows(const IsbSchedule& s, double epoch_s) {
    s.validate();
    const double period_start = std::floor(epoch_s / s.t_per_s) * s.t_per_s;
    const double t = epoch_s - period_start;
    WindowInfo w;
    if (t < s.t_crsb_s) {
        w.label = WindowLabel::CRSB;
        w.start_s = period_start;
        w.end_s = period_start + s.t_crsb_s;
    } else if (t < s.t_crsb_s + s.t_prsb_s) {
        w.label = WindowLabel::PRSB;
        w.start_s = period_start + s.t_crsb_s;
        w.end_s = period_start + s.t_crsb_s + s.t_prsb_s;
    } else {
        w.label = WindowLabel::Quiet;
        w.start_s = period_start + s.t_crsb_s + s.t_prsb_s;
        w.end_s = period_start + s.t_per_s;
    }
    return w;
}

std::string_view action_name(UEAction a) {
    switch (a) {
        case UEAction::None: return "none";
        case UEAction::CampAccess: return "camp-access";
        case UEAction::Reselection: return "reselection";
        case UEAction::LostCoverage: return "lost-coverage";
        case UEAction::StartPositioning: return "start-positioning";
        case UEAction::InsufficientSatellites: return "insufficient-satellites";
        case UEAction::MeasurementRequest: return "measurement-request";
        case UEAction::ReportFix: return "report-fix";
    }
    return "none";
}

std::string_view phase_name(UEPhase p) {
    switch (p) {
        case UEPhase::Searching: return "SEARCHING";
        case UEPhase::Camped: return "CAMPED";
        case UEPhase::Positioning: return "POSITIONING";
        case UEPhase::Located: return "LOCATED";
    }
    return "SEARCHING";
}

namespace {

const SatRadio* find_sat(const RadioSnapshot& radio, const SatId& id) {
    for (const auto& s : radio.sats)
        if (s.sat == id) return &s;
    return nullptr;
}

// Strongest CRSB; ties to the lowest sat id.
const SatRadio* best_sat(const RadioSnapshot& radio) {
    const SatRadio* best = nullptr;
    for (const auto& s : radio.sats) {
        if (!best || s.crsb_rsrp_dbm > best->crsb_rsrp_dbm ||
            (s.crsb_rsrp_dbm == best->crsb_rsrp_dbm && s.sat < best->sat))
            best = &s;
    }
    return best;
}

}  // namespace

StepResult step(const UEProcState& state, const RadioSnapshot& radio,
                const ProcedureThresholds& thresholds) {
    StepResult out;
    out.state = state;

    switch (state.phase) {
        case UEPhase::Searching: {
            const SatRadio* best = best_sat(radio);
            if (best && best->crsb_rsrp_dbm >= thresholds.access_rsrp_dbm) {
                out.state.phase = UEPhase::Camped;
                out.state.serving_sat = best->sat;
                out.state.prsb_config_known = true;  // SI read from the serving CRSB
                out.action = UEAction::CampAccess;
            }
            break;
        }
        case UEPhase::Camped: {
            const SatRadio* serving = find_sat(radio, *state.serving_sat);
            const SatRadio* best = best_sat(radio);
            const double serving_rsrp = serving
                                            ? serving->crsb_rsrp_dbm
                                            : -std::numeric_limits<double>::infinity();
            if (!serving &&
                (!best || best->crsb_rsrp_dbm < thresholds.access_rsrp_dbm)) {
                out.state.phase = UEPhase::Searching;
                out.state.serving_sat.reset();
                out.state.prsb_config_known = false;
                out.action = UEAction::LostCoverage;
                break;
            }
            if (best && best->sat != *state.serving_sat &&
                best->crsb_rsrp_dbm >
                    serving_rsrp + thresholds.reselection_hysteresis_db) {
                out.state.serving_sat = best->sat;
                out.action = UEAction::Reselection;
                break;
            }
            if (radio.positioning_requested && state.prsb_config_known) {
                out.state.phase = UEPhase::Positioning;
                out.action = UEAction::StartPositioning;
            }
            break;
        }
        case UEPhase::Positioning: {
            if (radio.measurable_sats >= thresholds.required_sats) {
                out.state.phase = UEPhase::Located;
                out.action = UEAction::MeasurementRequest;
            } else {
                out.action = UEAction::InsufficientSatellites;
            }
            break;
        }
        case UEPhase::Located: {
            out.state.phase = UEPhase::Camped;
            out.state.last_fix_snapshot = radio.snapshot_index;
            out.action = UEAction::ReportFix;
            break;
        }
    }
    return out;
}

}  // namespace ican
