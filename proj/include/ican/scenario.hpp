#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ican/beams.hpp"
#include "ican/constellation.hpp"
#include "ican/link.hpp"
#include "ican/positioning.hpp"
#include "ican/procedure.hpp"

namespace ican {

// Full experiment description. Defaults reproduce the reference scenario:
// a 40x60 Walker shell at 1200 km with 61-beam satellites, handheld UEs in a
// 10x10 degree equatorial region, both beam schemes, 6 and 8 positioning
// satellites, 100 snapshots over one orbit period.
struct ScenarioConfig {
    int schema_version = 1;

    ShellConfig shell;
    AntennaModel antenna;
    UeRfModel rf;
    PrsbSignal signal;
    IsbSchedule schedule;

    int beam_rings = 4;          // 61 beams
    double uv_spacing = 0.0;     // 0 -> sqrt(3)*sin(HPBW/2) from the antenna
    int reuse_factor = 3;
    bool edge_shutoff = true;

    int ue_count = 500;
    double region_lon_min_deg = -70.0;
    double region_lon_max_deg = -60.0;
    double region_lat_min_deg = -5.0;
    double region_lat_max_deg = 5.0;

    int num_snapshots = 100;
    std::vector<Scheme> schemes{Scheme::BH, Scheme::TMCB};
    std::vector<int> num_sats_list{6, 8};
    SelectionRule selection_rule = SelectionRule::BestSinr;
    CrlbMode crlb_mode = CrlbMode::ThreeD;
    std::uint64_t seed = 1;
    double min_elevation_deg = 10.0;

    double access_rsrp_dbm = -110.0;
    double reselection_hysteresis_db = 3.0;
    bool positioning_every_snapshot = true;

    void validate() const;
    double resolved_uv_spacing() const;
    int beam_count() const { return 3 * beam_rings * beam_rings + 3 * beam_rings + 1; }

    std::string to_json_string(int indent = 2) const;
    static ScenarioConfig from_json_string(const std::string& text);
    static ScenarioConfig load(const std::string& path);
    void save(const std::string& path) const;

    // FNV-1a over the canonical (key-sorted) JSON form; changes iff a field does.
    std::string config_hash() const;
};

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& s);

}  // namespace ican
