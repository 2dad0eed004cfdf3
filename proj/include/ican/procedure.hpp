#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ican/constellation.hpp"

namespace ican {

// Integrated signal block timing: CRSB then PRSB windows inside each period.
struct IsbSchedule {
    double t_per_s = 20e-3;
    double t_crsb_s = 5e-3;
    double t_prsb_s = 5e-3;
    enum class Layout : std::uint8_t { Uniform, Separate } layout = Layout::Separate;

    void validate() const;
};

enum class WindowLabel : std::uint8_t { CRSB, PRSB, Quiet };

struct WindowInfo {
    WindowLabel label = WindowLabel::Quiet;
    double start_s = 0.0;  // absolute window bounds containing the epoch
    double end_s = 0.0;
};

// Label and bounds of the window containing `epoch_s`. The labels partition
// each period exactly: [0, t_crsb) CRSB, [t_crsb, t_crsb+t_prsb) PRSB, rest
// quiet. A uniform layout realizes CRSB and PRSB in the same block; the
// combined window keeps the CRSB label and PRSB measurements share it.
WindowInfo schedule_windows(const IsbSchedule& s, double epoch_s);

enum class UEPhase : std::uint8_t { Searching, Camped, Positioning, Located };

struct UEProcState {
    UEPhase phase = UEPhase::Searching;
    std::optional<SatId> serving_sat;
    bool prsb_config_known = false;
    std::optional<Eigen::Vector3d> last_fix;
    int last_fix_snapshot = -1;
};

struct SatRadio {
    SatId sat;
    double crsb_rsrp_dbm = 0.0;
    bool prsb_available = true;
};

struct RadioSnapshot {
    std::vector<SatRadio> sats;  // visible satellites this snapshot
    bool positioning_requested = false;
    int measurable_sats = 0;  // satellites with usable PRSB measurements
    int snapshot_index = 0;
};

struct ProcedureThresholds {
    double access_rsrp_dbm = -110.0;
    double reselection_hysteresis_db = 3.0;
    int required_sats = 6;
};

enum class UEAction : std::uint8_t {
    None,
    CampAccess,
    Reselection,
    LostCoverage,
    StartPositioning,
    InsufficientSatellites,
    MeasurementRequest,
    ReportFix,
};

std::string_view action_name(UEAction a);
std::string_view phase_name(UEPhase p);

struct StepResult {
    UEProcState state;
    UEAction action = UEAction::None;
};

// One deterministic transition of the control procedure:
//   Searching  -> Camped       best CRSB RSRP >= access threshold
//   Camped     -> Camped       reselection when a challenger beats the serving
//                              RSRP by the hysteresis margin
//   Camped     -> Positioning  positioning requested and SI (PRSB config) known
//   Positioning-> Located      >= required_sats measurable (measurement request)
//   Located    -> Camped       fix reported
// Camped UEs that lose every eligible satellite fall back to Searching.
StepResult step(const UEProcState& state, const RadioSnapshot& radio,
                const ProcedureThresholds& thresholds);

}  // namespace ican
