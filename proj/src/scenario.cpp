#include "ican/scenario.hpp"

#include <fstream>

#include <json.hpp>

#include "ican/errors.hpp"

namespace ican {

using nlohmann::json;

std::string scheme_name(Scheme s) { return s == Scheme::BH ? "BH" : "TMCB"; }

Scheme scheme_from_name(const std::string& s) {
    if (s == "BH" || s == "bh") return Scheme::BH;
    if (s == "TMCB" || s == "tmcb") return Scheme::TMCB;
    throw Error("invalid-config", "unknown scheme: " + s);
}

namespace {

std::string selection_name(SelectionRule r) {
    return r == SelectionRule::BestSinr ? "best_sinr" : "highest_elevation";
}

SelectionRule selection_from_name(const std::string& s) {
    if (s == "best_sinr") return SelectionRule::BestSinr;
    if (s == "highest_elevation") return SelectionRule::HighestElevation;
    throw Error("invalid-config", "unknown selection rule: " + s);
}

std::string crlb_mode_name(CrlbMode m) {
    return m == CrlbMode::ThreeD ? "3d" : "2d_fixed_altitude";
}

CrlbMode crlb_mode_from_name(const std::string& s) {
    if (s == "3d") return CrlbMode::ThreeD;
    if (s == "2d_fixed_altitude") return CrlbMode::TwoDFixedAltitude;
    throw Error("invalid-config", "unknown crlb mode: " + s);
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void ScenarioConfig::validate() const {
    shell.validate();
    antenna.validate();
    rf.validate();
    signal.validate();
    schedule.validate();
    if (beam_rings < 0) throw Error("invalid-config", "beam_rings must be >= 0");
    if (reuse_factor != 1 && reuse_factor != 3 && reuse_factor != 4)
        throw Error("invalid-config", "reuse_factor must be 1, 3 or 4");
    if (ue_count < 1) throw Error("invalid-config", "ue_count must be >= 1");
    if (region_lon_min_deg >= region_lon_max_deg ||
        region_lat_min_deg >= region_lat_max_deg)
        throw Error("invalid-config", "UE region bounds must be ordered");
    if (num_snapshots < 1) throw Error("invalid-config", "num_snapshots must be >= 1");
    if (schemes.empty()) throw Error("invalid-config", "at least one scheme required");
    if (num_sats_list.empty())
        throw Error("invalid-config", "at least one satellite count required");
    for (int n : num_sats_list) {
        const int min_n = crlb_mode == CrlbMode::ThreeD ? 4 : 3;
        if (n < min_n) throw Error("invalid-config", "num_sats below mode minimum");
    }
    if (min_elevation_deg < 0.0 || min_elevation_deg >= 90.0)
        throw Error("invalid-config", "min_elevation must be in [0, 90)");
    // The full hex layout must be realizable before any translation.
    (void)hex_layout(beam_rings, resolved_uv_spacing());
}

double ScenarioConfig::resolved_uv_spacing() const {
    return uv_spacing > 0.0 ? uv_spacing : default_uv_spacing(antenna);
}

std::string ScenarioConfig::to_json_string(int indent) const {
    json j;
    j["schema_version"] = schema_version;
    j["shell"] = {{"num_planes", shell.num_planes},
                  {"sats_per_plane", shell.sats_per_plane},
                  {"altitude_m", shell.altitude_m},
                  {"inclination_deg", shell.inclination_deg},
                  {"raan_offset_deg", shell.raan_offset_deg},
                  {"phasing_factor", shell.phasing_factor},
                  {"earth_rotation", shell.earth_rotation}};
    j["antenna"] = {{"aperture_radius_m", antenna.aperture_radius_m},
                    {"carrier_hz", antenna.carrier_hz},
                    {"eirp_density_dbw_mhz", antenna.boresight_eirp_density_dbw_mhz}};
    j["rf"] = {{"antenna_gain_dbi", rf.antenna_gain_dbi},
               {"noise_figure_db", rf.noise_figure_db},
               {"antenna_temperature_k", rf.antenna_temperature_k},
               {"per_color_bandwidth_hz", rf.per_color_bandwidth_hz},
               {"extra_loss_db", rf.extra_loss_db}};
    j["signal"] = {{"occupied_bandwidth_hz", signal.occupied_bandwidth_hz},
                   {"coherent_gain", signal.coherent_gain},
                   {"flat_spectrum", signal.flat_spectrum},
                   {"rms_bandwidth_override_hz", signal.rms_bandwidth_override_hz}};
    j["schedule"] = {{"t_per_s", schedule.t_per_s},
                     {"t_crsb_s", schedule.t_crsb_s},
                     {"t_prsb_s", schedule.t_prsb_s},
                     {"layout", schedule.layout == IsbSchedule::Layout::Separate
                                    ? "separate"
                                    : "uniform"}};
    j["beam_rings"] = beam_rings;
    j["uv_spacing"] = uv_spacing;
    j["reuse_factor"] = reuse_factor;
    j["edge_shutoff"] = edge_shutoff;
    j["ue_count"] = ue_count;
    j["region"] = {{"lon_min_deg", region_lon_min_deg},
                   {"lon_max_deg", region_lon_max_deg},
                   {"lat_min_deg", region_lat_min_deg},
                   {"lat_max_deg", region_lat_max_deg}};
    j["num_snapshots"] = num_snapshots;
    json schemes_j = json::array();
    for (Scheme s : schemes) schemes_j.push_back(scheme_name(s));
    j["schemes"] = schemes_j;
    j["num_sats_list"] = num_sats_list;
    j["selection_rule"] = selection_name(selection_rule);
    j["crlb_mode"] = crlb_mode_name(crlb_mode);
    j["seed"] = seed;
    j["min_elevation_deg"] = min_elevation_deg;
    j["access_rsrp_dbm"] = access_rsrp_dbm;
    j["reselection_hysteresis_db"] = reselection_hysteresis_db;
    j["positioning_every_snapshot"] = positioning_every_snapshot;
    return j.dump(indent);
}

ScenarioConfig ScenarioConfig::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error("invalid-config", std::string("JSON parse failure: ") + e.what());
    }
    ScenarioConfig cfg;
    try {
        get_if_present(j, "schema_version", cfg.schema_version);
        if (cfg.schema_version != 1)
            throw Error("invalid-config", "unsupported schema_version");
        if (j.contains("shell")) {
            const json& s = j["shell"];
            get_if_present(s, "num_planes", cfg.shell.num_planes);
            get_if_present(s, "sats_per_plane", cfg.shell.sats_per_plane);
            get_if_present(s, "altitude_m", cfg.shell.altitude_m);
            get_if_present(s, "inclination_deg", cfg.shell.inclination_deg);
            get_if_present(s, "raan_offset_deg", cfg.shell.raan_offset_deg);
            get_if_present(s, "phasing_factor", cfg.shell.phasing_factor);
            get_if_present(s, "earth_rotation", cfg.shell.earth_rotation);
        }
        if (j.contains("antenna")) {
            const json& a = j["antenna"];
            get_if_present(a, "aperture_radius_m", cfg.antenna.aperture_radius_m);
            get_if_present(a, "carrier_hz", cfg.antenna.carrier_hz);
            get_if_present(a, "eirp_density_dbw_mhz",
                           cfg.antenna.boresight_eirp_density_dbw_mhz);
        }
        if (j.contains("rf")) {
            const json& r = j["rf"];
            get_if_present(r, "antenna_gain_dbi", cfg.rf.antenna_gain_dbi);
            get_if_present(r, "noise_figure_db", cfg.rf.noise_figure_db);
            get_if_present(r, "antenna_temperature_k", cfg.rf.antenna_temperature_k);
            get_if_present(r, "per_color_bandwidth_hz", cfg.rf.per_color_bandwidth_hz);
            get_if_present(r, "extra_loss_db", cfg.rf.extra_loss_db);
        }
        if (j.contains("signal")) {
            const json& s = j["signal"];
            get_if_present(s, "occupied_bandwidth_hz", cfg.signal.occupied_bandwidth_hz);
            get_if_present(s, "coherent_gain", cfg.signal.coherent_gain);
            get_if_present(s, "flat_spectrum", cfg.signal.flat_spectrum);
            get_if_present(s, "rms_bandwidth_override_hz",
                           cfg.signal.rms_bandwidth_override_hz);
        }
        if (j.contains("schedule")) {
            const json& s = j["schedule"];
            get_if_present(s, "t_per_s", cfg.schedule.t_per_s);
            get_if_present(s, "t_crsb_s", cfg.schedule.t_crsb_s);
            get_if_present(s, "t_prsb_s", cfg.schedule.t_prsb_s);
            if (s.contains("layout")) {
                const std::string l = s["layout"].get<std::string>();
                if (l == "separate")
                    cfg.schedule.layout = IsbSchedule::Layout::Separate;
                else if (l == "uniform")
                    cfg.schedule.layout = IsbSchedule::Layout::Uniform;
                else
                    throw Error("invalid-config", "unknown schedule layout: " + l);
            }
        }
        get_if_present(j, "beam_rings", cfg.beam_rings);
        get_if_present(j, "uv_spacing", cfg.uv_spacing);
        get_if_present(j, "reuse_factor", cfg.reuse_factor);
        get_if_present(j, "edge_shutoff", cfg.edge_shutoff);
        get_if_present(j, "ue_count", cfg.ue_count);
        if (j.contains("region")) {
            const json& r = j["region"];
            get_if_present(r, "lon_min_deg", cfg.region_lon_min_deg);
            get_if_present(r, "lon_max_deg", cfg.region_lon_max_deg);
            get_if_present(r, "lat_min_deg", cfg.region_lat_min_deg);
            get_if_present(r, "lat_max_deg", cfg.region_lat_max_deg);
        }
        get_if_present(j, "num_snapshots", cfg.num_snapshots);
        if (j.contains("schemes")) {
            cfg.schemes.clear();
            for (const auto& s : j["schemes"])
                cfg.schemes.push_back(scheme_from_name(s.get<std::string>()));
        }
        if (j.contains("num_sats_list"))
            cfg.num_sats_list = j["num_sats_list"].get<std::vector<int>>();
        if (j.contains("selection_rule"))
            cfg.selection_rule =
                selection_from_name(j["selection_rule"].get<std::string>());
        if (j.contains("crlb_mode"))
            cfg.crlb_mode = crlb_mode_from_name(j["crlb_mode"].get<std::string>());
        get_if_present(j, "seed", cfg.seed);
        get_if_present(j, "min_elevation_deg", cfg.min_elevation_deg);
        get_if_present(j, "access_rsrp_dbm", cfg.access_rsrp_dbm);
        get_if_present(j, "reselection_hysteresis_db", cfg.reselection_hysteresis_db);
        get_if_present(j, "positioning_every_snapshot", cfg.positioning_every_snapshot);
    } catch (const json::exception& e) {
        throw Error("invalid-config", std::string("bad config field: ") + e.what());
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io-error", "cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return from_json_string(text);
}

void ScenarioConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("io-error", "cannot write config file: " + path);
    out << to_json_string() << '\n';
}

std::string ScenarioConfig::config_hash() const {
    // FNV-1a 64 over the canonical (sorted-key, compact) JSON form.
    const std::string text = json::parse(to_json_string()).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x00000100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace ican
