// Command-line front end: scenario runs, result summaries, beam-layout dumps,
// single-UE CRLB deep dives and the Monte-Carlo/CRLB cross-check.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ican/emit.hpp"
#include "ican/engine.hpp"
#include "ican/errors.hpp"
#include "ican/version.hpp"

namespace {

using namespace ican;

ScenarioConfig load_config(const std::string& path) {
    if (path.empty()) return ScenarioConfig{};
    return ScenarioConfig::load(path);
}

void apply_scheme_flag(ScenarioConfig& cfg, const std::string& scheme) {
    if (scheme.empty() || scheme == "both") {
        cfg.schemes = {Scheme::BH, Scheme::TMCB};
    } else {
        cfg.schemes = {scheme_from_name(scheme)};
    }
}

void print_summary(const Summary& summary) {
    std::printf("%-8s %-4s %12s %10s\n", "scheme", "n", "run median[m]", "rows");
    for (const auto& s : summary.series) {
        std::printf("%-8s %-4d %12.2f %10d\n", scheme_name(s.scheme).c_str(),
                    s.num_sats, s.run_median, s.run_count);
    }
    for (const auto& [n, ratios] : summary.ratio_series) {
        if (ratios.empty()) continue;
        double acc = 0.0;
        for (const auto& r : ratios) acc += r.tmcb_over_bh;
        std::printf("TMCB/BH median ratio (n=%d): mean %.2f over %zu snapshots\n", n,
                    acc / ratios.size(), ratios.size());
    }
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out, const std::string& format,
            const std::string& scheme, std::optional<int> snapshots,
            std::optional<int> ues, int threads) {
    ScenarioConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (snapshots) cfg.num_snapshots = *snapshots;
    if (ues) cfg.ue_count = *ues;
    apply_scheme_flag(cfg, scheme);
    cfg.validate();

    const ResultsTable table = run_scenario(cfg, threads);
    emit(table, emit_format_from_name(format), out);
    std::printf("wrote %s (%zu rows, config %s)\n", out.c_str(), table.rows.size(),
                table.config_hash.c_str());
    print_summary(summarize(table));
    return 0;
}

int cmd_summarize(const std::string& in_path, const std::string& out_path) {
    ResultsTable table;
    if (in_path.size() > 4 && in_path.substr(in_path.size() - 4) == ".csv")
        table = load_results_csv(in_path);
    else
        table = load_results_json(in_path);
    const Summary summary = summarize(table);
    print_summary(summary);

    std::printf("\n%-8s %-4s %-9s %12s %12s %12s %8s\n", "scheme", "n", "snapshot",
                "p10[m]", "median[m]", "p90[m]", "count");
    for (const auto& s : summary.series) {
        for (const auto& p : s.per_snapshot) {
            std::printf("%-8s %-4d %-9d %12.2f %12.2f %12.2f %8d\n",
                        scheme_name(s.scheme).c_str(), s.num_sats, p.snapshot, p.p10,
                        p.median, p.p90, p.count);
        }
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw Error("io-error", "cannot write summary: " + out_path);
        out << "scheme,num_sats,snapshot,p10_m,median_m,p90_m,count\n";
        for (const auto& s : summary.series)
            for (const auto& p : s.per_snapshot)
                out << scheme_name(s.scheme) << ',' << s.num_sats << ',' << p.snapshot
                    << ',' << p.p10 << ',' << p.median << ',' << p.p90 << ','
                    << p.count << '\n';
    }
    return 0;
}

// Serving satellite fallback: highest elevation over the region center.
std::size_t default_serving(const ScenarioConfig& cfg,
                            const std::vector<SatelliteState>& states) {
    const Geodetic center{0.5 * (cfg.region_lat_min_deg + cfg.region_lat_max_deg),
                          0.5 * (cfg.region_lon_min_deg + cfg.region_lon_max_deg), 0.0};
    const auto vis = visible_satellites(center, states, 0.0);
    if (vis.empty()) throw Error("invalid-config", "no satellite above the region");
    return vis.front().state_index;
}

int cmd_geometry(const std::string& config_path, int snapshot, const std::string& scheme,
                 const std::string& phase, int serving_linear, int num_sats,
                 const std::string& out_path) {
    ScenarioConfig cfg = load_config(config_path);
    cfg.validate();

    const auto elements = build_constellation(cfg.shell);
    const double period = orbital_period_s(cfg.shell.altitude_m);
    const double epoch = snapshot * period / cfg.num_snapshots;
    const auto states = propagate(elements, epoch, cfg.shell.earth_rotation);

    std::size_t serving = serving_linear >= 0
                              ? static_cast<std::size_t>(serving_linear)
                              : default_serving(cfg, states);
    if (serving >= states.size()) throw Error("invalid-config", "serving id out of range");

    const auto layout = hex_layout(cfg.beam_rings, cfg.resolved_uv_spacing());
    const auto colors = assign_colors(layout, cfg.reuse_factor);

    const Scheme sch = scheme_from_name(scheme);
    const Phase ph = (phase == "crsb") ? Phase::CRSB : Phase::PRSB;

    std::vector<std::size_t> assisting;
    if (sch == Scheme::BH && ph == Phase::PRSB) {
        const Geodetic nadir = states[serving].nadir;
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t i = 0; i < states.size(); ++i) {
            if (i == serving) continue;
            const GeometrySample g = geometry(states[i], nadir);
            if (g.elevation_deg > 0.0) ranked.emplace_back(-g.elevation_deg, i);
        }
        std::sort(ranked.begin(), ranked.end());
        for (int k = 0; k < num_sats - 1 && k < static_cast<int>(ranked.size()); ++k)
            assisting.push_back(ranked[k].second);
    }

    const BeamPlan plan = build_beam_plan(sch, ph, serving, assisting, states, layout,
                                          colors, {cfg.edge_shutoff});

    std::ofstream out(out_path);
    if (!out) throw Error("io-error", "cannot write: " + out_path);
    out << "sat_id,beam_index,lat,lon,color,role,active\n";
    char buf[64];
    for (const auto& set : plan.sats) {
        const bool in_cluster =
            set.sat == plan.serving ||
            std::find(plan.assisting.begin(), plan.assisting.end(), set.sat) !=
                plan.assisting.end();
        if (sch == Scheme::BH && ph == Phase::PRSB && !in_cluster) continue;
        for (std::size_t b = 0; b < set.uv.size(); ++b) {
            std::string lat = "nan", lon = "nan";
            if (set.active[b]) {
                const auto hit =
                    ground_intersection(states[set.state_index].position, set.dir[b]);
                if (hit) {
                    const Geodetic g = ecef_to_geodetic(*hit);
                    std::snprintf(buf, sizeof buf, "%.6f", g.lat_deg);
                    lat = buf;
                    std::snprintf(buf, sizeof buf, "%.6f", g.lon_deg);
                    lon = buf;
                }
            }
            out << sat_linear_id(set.sat, cfg.shell) << ',' << b << ',' << lat << ','
                << lon << ',' << colors[b] << ','
                << (plan.role == BeamRole::Communication ? "communication" : "positioning")
                << ',' << (set.active[b] ? 1 : 0) << '\n';
        }
    }
    std::printf("wrote %s (serving sat %d, %zu satellites)\n", out_path.c_str(),
                sat_linear_id(plan.serving, cfg.shell), plan.sats.size());
    return 0;
}

int cmd_crlb(const std::string& config_path, int snapshot, double ue_lat, double ue_lon,
             const std::string& scheme, int num_sats) {
    ScenarioConfig cfg = load_config(config_path);
    cfg.validate();
    const Scheme sch = scheme_from_name(scheme);

    const auto elements = build_constellation(cfg.shell);
    const double period = orbital_period_s(cfg.shell.altitude_m);
    const auto states =
        propagate(elements, snapshot * period / cfg.num_snapshots, cfg.shell.earth_rotation);
    const Geodetic ue{ue_lat, ue_lon, 0.0};

    // Restrict the plan to satellites above the UE's horizon.
    const auto horizon = visible_satellites(ue, states, 0.0);
    std::vector<SatelliteState> subset;
    subset.reserve(horizon.size());
    for (const auto& v : horizon) subset.push_back(states[v.state_index]);

    const auto layout = hex_layout(cfg.beam_rings, cfg.resolved_uv_spacing());
    const auto colors = assign_colors(layout, cfg.reuse_factor);
    const BeamPlan crsb =
        build_beam_plan(Scheme::TMCB, Phase::CRSB, 0, {}, subset, layout, colors, {});

    const UePlanEval crsb_eval = evaluate_plan(ue, crsb, subset, cfg.antenna, cfg.rf);
    const double noise_w = linear_from_db(noise_power_dbm(cfg.rf) - 30.0);

    // Serving satellite: best CRSB RSRP above the elevation mask.
    std::size_t serving = 0;
    double best_rsrp = -1e9;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (crsb_eval.sats[i].elevation_deg < cfg.min_elevation_deg) continue;
        const auto m = best_measurement(crsb_eval.sats[i], subset[i].id,
                                        crsb_eval.color_total_w, noise_w);
        if (m.rsrp_dbm > best_rsrp) {
            best_rsrp = m.rsrp_dbm;
            serving = i;
        }
    }

    BeamPlan plan = crsb;
    if (sch == Scheme::BH) {
        const Geodetic nadir = subset[serving].nadir;
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t i = 0; i < subset.size(); ++i) {
            if (i == serving) continue;
            const GeometrySample g = geometry(subset[i], nadir);
            if (g.elevation_deg > 0.0) ranked.emplace_back(-g.elevation_deg, i);
        }
        std::sort(ranked.begin(), ranked.end());
        std::vector<std::size_t> assisting;
        for (int k = 0; k < num_sats - 1 && k < static_cast<int>(ranked.size()); ++k)
            assisting.push_back(ranked[k].second);
        plan = build_beam_plan(Scheme::BH, Phase::PRSB, serving, assisting, subset,
                               layout, colors, {cfg.edge_shutoff});
    }
    const UePlanEval eval = evaluate_plan(ue, plan, subset, cfg.antenna, cfg.rf);

    std::printf("UE (%.4f, %.4f), snapshot %d, scheme %s, n=%d\n", ue_lat, ue_lon,
                snapshot, scheme_name(sch).c_str(), num_sats);
    std::printf("serving satellite: %d (RSRP %.2f dBm)\n",
                sat_linear_id(subset[serving].id, cfg.shell), best_rsrp);

    std::vector<PositioningCandidate> cands;
    std::vector<std::pair<SatId, std::size_t>> index_of;
    for (std::size_t i = 0; i < subset.size(); ++i) {
        const auto& se = eval.sats[i];
        if (se.elevation_deg < cfg.min_elevation_deg) continue;
        const auto m = best_measurement(se, subset[i].id, eval.color_total_w, noise_w);
        if (!std::isfinite(m.sinr_db)) continue;
        const double sinr_lin = linear_from_db(m.sinr_db);
        if (sinr_lin <= 0.0) continue;
        const double sigma = std::sqrt(toa_variance_s2(sinr_lin, cfg.signal));
        cands.push_back({subset[i].id, m.sinr_db, se.elevation_deg, sigma});
        index_of.emplace_back(subset[i].id, i);
    }
    std::printf("measurable satellites: %zu\n", cands.size());

    const auto sel = select_positioning_sats(subset[serving].id, cands, num_sats,
                                             cfg.selection_rule);
    std::vector<Eigen::Vector3d> sat_pos;
    std::vector<double> sigma;
    std::printf("%-8s %10s %10s %14s\n", "sat", "elev[deg]", "SINR[dB]", "sigma_rng[m]");
    for (const auto& id : sel) {
        for (std::size_t k = 0; k < cands.size(); ++k) {
            if (cands[k].sat == id) {
                std::printf("%-8d %10.2f %10.2f %14.3f\n",
                            sat_linear_id(id, cfg.shell), cands[k].elevation_deg,
                            cands[k].prsb_sinr_db, cands[k].sigma_tau_s * kSpeedOfLightMS);
                for (const auto& [cid, idx] : index_of)
                    if (cid == id) sat_pos.push_back(subset[idx].position);
                sigma.push_back(cands[k].sigma_tau_s);
                break;
            }
        }
    }

    const Eigen::Vector3d ue_ecef = geodetic_to_ecef(ue);
    for (CrlbMode mode : {CrlbMode::ThreeD, CrlbMode::TwoDFixedAltitude}) {
        const CrlbResult res = tdoa_crlb(ue_ecef, sat_pos, sigma, mode);
        std::printf("\nmode %s: CRLB %.3f m, GDOP %.3f\nFIM [1/m^2]:\n",
                    mode == CrlbMode::ThreeD ? "3d" : "2d_fixed_altitude",
                    res.crlb_rmse_m, res.gdop);
        for (int r = 0; r < res.fim.rows(); ++r) {
            for (int c = 0; c < res.fim.cols(); ++c) std::printf(" %12.5e", res.fim(r, c));
            std::printf("\n");
        }
    }
    return 0;
}

int cmd_oracle(const std::string& config_path, int geometries, int trials,
               std::uint64_t seed) {
    ScenarioConfig cfg = load_config(config_path);
    cfg.validate();
    const auto checks = oracle_check(cfg, geometries, trials, seed);
    bool all_ok = true;
    std::printf("%-4s %12s %12s %8s %10s\n", "geo", "CRLB[m]", "MC RMSE[m]", "ratio",
                "nonconv");
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto& c = checks[i];
        const bool ok = c.ratio >= 0.9 && c.ratio <= 1.3;
        all_ok = all_ok && ok;
        std::printf("%-4zu %12.3f %12.3f %8.3f %9.2f%% %s\n", i, c.crlb_m, c.mc_rmse_m,
                    c.ratio, 100.0 * c.nonconverged, ok ? "ok" : "OUT-OF-BAND");
    }
    std::printf(all_ok ? "oracle check passed\n" : "oracle check FAILED\n");
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(ican::kToolVersion) +
                 " - beam-hopping LEO positioning simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path = "results.csv", format = "csv", scheme = "both";
    std::optional<std::uint64_t> seed;
    std::optional<int> snapshots, ues;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run a scenario and write results");
    run->add_option("--config", config_path, "scenario JSON (defaults if omitted)");
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_path, "output path");
    run->add_option("--format", format, "csv|json|svg")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    run->add_option("--scheme", scheme, "bh|tmcb|both")
        ->check(CLI::IsMember({"bh", "tmcb", "both"}));
    run->add_option("--snapshots", snapshots, "override snapshot count");
    run->add_option("--ues", ues, "override UE count");
    run->add_option("--threads", threads, "worker threads (0 = auto)");

    std::string in_path, summary_out;
    auto* summ = app.add_subcommand("summarize", "statistics from a results file");
    summ->add_option("--in", in_path, "results .json or .csv")->required();
    summ->add_option("--out", summary_out, "optional summary CSV");

    int snapshot = 0, serving_linear = -1, num_sats = 8;
    std::string phase = "prsb", geo_out = "beams.csv";
    auto* geo = app.add_subcommand("geometry", "dump beam ground centers as CSV");
    geo->add_option("--config", config_path, "scenario JSON");
    geo->add_option("--snapshot", snapshot, "snapshot index");
    geo->add_option("--scheme", scheme, "bh|tmcb")->check(CLI::IsMember({"bh", "tmcb"}));
    geo->add_option("--phase", phase, "crsb|prsb")->check(CLI::IsMember({"crsb", "prsb"}));
    geo->add_option("--serving", serving_linear, "serving satellite linear id");
    geo->add_option("--num-sats", num_sats, "cluster size for BH");
    geo->add_option("--out", geo_out, "output CSV path");

    double ue_lat = 0.0, ue_lon = -65.0;
    auto* crlb = app.add_subcommand("crlb", "single UE/snapshot CRLB deep dive");
    crlb->add_option("--config", config_path, "scenario JSON");
    crlb->add_option("--snapshot", snapshot, "snapshot index");
    crlb->add_option("--ue-lat", ue_lat, "UE latitude [deg]");
    crlb->add_option("--ue-lon", ue_lon, "UE longitude [deg]");
    crlb->add_option("--scheme", scheme, "bh|tmcb")->check(CLI::IsMember({"bh", "tmcb"}));
    crlb->add_option("--num-sats", num_sats, "positioning satellites");

    int geometries = 10, trials = 10000;
    std::uint64_t oracle_seed = 7;
    auto* oracle = app.add_subcommand("oracle", "Monte-Carlo vs CRLB cross-check");
    oracle->add_option("--config", config_path, "scenario JSON");
    oracle->add_option("--geometries", geometries, "number of geometries");
    oracle->add_option("--trials", trials, "Monte-Carlo trials per geometry");
    oracle->add_option("--seed", oracle_seed, "oracle seed");

    try {
        app.parse(argc, argv);
        if (run->parsed())
            return cmd_run(config_path, seed, out_path, format, scheme, snapshots, ues,
                           threads);
        if (summ->parsed()) return cmd_summarize(in_path, summary_out);
        if (geo->parsed()) {
            if (scheme == "both") scheme = "bh";
            return cmd_geometry(config_path, snapshot, scheme, phase, serving_linear,
                                num_sats, geo_out);
        }
        if (crlb->parsed()) {
            if (scheme == "both") scheme = "tmcb";
            return cmd_crlb(config_path, snapshot, ue_lat, ue_lon, scheme, num_sats);
        }
        if (oracle->parsed()) return cmd_oracle(config_path, geometries, trials, oracle_seed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const ican::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == "io-error" ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
