#include "ican/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <thread>

#include "ican/constants.hpp"
#include "ican/errors.hpp"
#include "ican/link.hpp"
#include "ican/rng.hpp"
#include "ican/version.hpp"

namespace ican {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string row_status_name(RowStatus s) {
    switch (s) {
        case RowStatus::Ok: return "ok";
        case RowStatus::InsufficientSatellites: return "insufficient-satellites";
        case RowStatus::SingularFim: return "singular-fim";
    }
    return "ok";
}

RowStatus row_status_from_name(const std::string& s) {
    if (s == "ok") return RowStatus::Ok;
    if (s == "insufficient-satellites") return RowStatus::InsufficientSatellites;
    if (s == "singular-fim") return RowStatus::SingularFim;
    throw Error("invalid-config", "unknown row status: " + s);
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ICAN_SIM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

// Chunked parallel loop. Each index is processed exactly once by exactly one
// thread; all outputs go to preallocated per-index slots, so the result is
// identical for any thread count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    threads = std::min<std::size_t>(std::max(threads, 1), count == 0 ? 1 : count);
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

struct UeWork {
    Geodetic pos;
    Eigen::Vector3d ecef;
    UEProcState proc;
};

// Per-UE, per-snapshot intermediate data kept between the two passes.
struct UeSnapshot {
    UePlanEval crsb_eval;
    int serving_subset_idx = -1;  // index into the snapshot's satellite subset
    bool positioning = false;     // measurement request issued this snapshot
    std::vector<ActionLogRow> actions;
    LinkSummaryRow summary;
};

struct SatCandidateInfo {
    SatId sat;
    std::size_t subset_idx = 0;
    double sinr_db = 0.0;
    double sinr_linear = 0.0;
    double elevation_deg = 0.0;
    double sigma_tau_s = 0.0;
    bool measurable = false;
};

// Candidate list under one plan evaluation; measurable = above the elevation
// mask with a finite positive ToA variance.
std::vector<SatCandidateInfo> build_candidates(
    const UePlanEval& eval, const BeamPlan& plan, const PrsbSignal& signal,
    double min_elevation_deg, double noise_w) {
    std::vector<SatCandidateInfo> out;
    out.reserve(eval.sats.size());
    for (std::size_t i = 0; i < eval.sats.size(); ++i) {
        const SatLinkEval& se = eval.sats[i];
        if (se.elevation_deg < min_elevation_deg) continue;
        SatCandidateInfo c;
        c.sat = plan.sats[i].sat;
        c.subset_idx = i;
        c.elevation_deg = se.elevation_deg;

        double best_sinr = -1.0;
        for (int col = 0; col < kMaxColors; ++col) {
            if (se.best_beam[col] < 0) continue;
            const double p = se.best_power_w[col];
            const double interf = std::max(0.0, eval.color_total_w[col] - p);
            const double s = p / (interf + noise_w);
            best_sinr = std::max(best_sinr, s);
        }
        if (best_sinr > 0.0) {
            c.sinr_linear = best_sinr;
            c.sinr_db = db_from_linear(best_sinr);
            c.sigma_tau_s = toa_variance_s2(best_sinr, signal);
            c.sigma_tau_s = std::sqrt(c.sigma_tau_s);
            c.measurable = std::isfinite(c.sigma_tau_s) && c.sigma_tau_s > 0.0;
        }
        if (c.measurable) out.push_back(c);
    }
    return out;
}

}  // namespace

ResultsTable run_scenario(const ScenarioConfig& cfg, int threads) {
    cfg.validate();
    const int nthreads = resolve_thread_count(threads);

    const auto elements = build_constellation(cfg.shell);
    const double period = orbital_period_s(cfg.shell.altitude_m);
    const auto base_layout = hex_layout(cfg.beam_rings, cfg.resolved_uv_spacing());
    const auto colors = assign_colors(base_layout, cfg.reuse_factor);
    const BeamPlanOptions plan_opts{cfg.edge_shutoff};

    // UE population: uniform in lon/lat over the region, from the seed.
    std::vector<UeWork> ues(cfg.ue_count);
    {
        Rng rng(cfg.seed);
        for (auto& ue : ues) {
            ue.pos.lon_deg = rng.uniform(cfg.region_lon_min_deg, cfg.region_lon_max_deg);
            ue.pos.lat_deg = rng.uniform(cfg.region_lat_min_deg, cfg.region_lat_max_deg);
            ue.pos.alt_m = 0.0;
            ue.ecef = geodetic_to_ecef(ue.pos);
        }
    }

    // Region prefilter: any satellite above the horizon of any region point
    // lies within horizon angle + region half-diagonal of the region center.
    const Geodetic region_center{0.5 * (cfg.region_lat_min_deg + cfg.region_lat_max_deg),
                                 0.5 * (cfg.region_lon_min_deg + cfg.region_lon_max_deg),
                                 0.0};
    const Eigen::Vector3d center_dir = geodetic_to_ecef(region_center).normalized();
    double half_diag = 0.0;
    for (double lat : {cfg.region_lat_min_deg, cfg.region_lat_max_deg})
        for (double lon : {cfg.region_lon_min_deg, cfg.region_lon_max_deg}) {
            const Eigen::Vector3d c = geodetic_to_ecef({lat, lon, 0.0}).normalized();
            half_diag = std::max(half_diag, std::acos(std::clamp(center_dir.dot(c), -1.0, 1.0)));
        }
    const double horizon_angle =
        std::acos(kEarthRadiusM / (kEarthRadiusM + cfg.shell.altitude_m));
    const double cos_prefilter = std::cos(std::min(horizon_angle + half_diag + 0.01, kPi));

    const int num_schemes = static_cast<int>(cfg.schemes.size());
    const int num_n = static_cast<int>(cfg.num_sats_list.size());
    const int min_required = *std::min_element(cfg.num_sats_list.begin(), cfg.num_sats_list.end());
    const ProcedureThresholds thresholds{cfg.access_rsrp_dbm,
                                         cfg.reselection_hysteresis_db, min_required};

    ResultsTable table;
    table.config_hash = cfg.config_hash();
    table.tool_version = kToolVersion;
    table.rows.resize(static_cast<std::size_t>(cfg.num_snapshots) * cfg.ue_count *
                      num_schemes * num_n);
    table.link_summaries.resize(static_cast<std::size_t>(cfg.num_snapshots) * cfg.ue_count);

    const double noise_w = linear_from_db(noise_power_dbm(cfg.rf) - 30.0);

    for (int snap = 0; snap < cfg.num_snapshots; ++snap) {
        const double epoch = snap * period / cfg.num_snapshots;
        const auto all_states = propagate(elements, epoch, cfg.shell.earth_rotation);

        std::vector<SatelliteState> subset;
        for (const auto& st : all_states)
            if (st.position.normalized().dot(center_dir) >= cos_prefilter)
                subset.push_back(st);

        const BeamPlan crsb_plan = build_beam_plan(
            Scheme::TMCB, Phase::CRSB, 0, {}, subset, base_layout, colors, plan_opts);

        // Pass A: CRSB evaluation and control-procedure stepping per UE.
        std::vector<UeSnapshot> snap_data(cfg.ue_count);
        parallel_for(cfg.ue_count, nthreads, [&](std::size_t u) {
            UeWork& ue = ues[u];
            UeSnapshot& d = snap_data[u];
            d.crsb_eval = evaluate_plan(ue.pos, crsb_plan, subset, cfg.antenna, cfg.rf);

            RadioSnapshot radio;
            radio.snapshot_index = snap;
            radio.positioning_requested = cfg.positioning_every_snapshot;
            int visible = 0;
            for (std::size_t i = 0; i < subset.size(); ++i) {
                const SatLinkEval& se = d.crsb_eval.sats[i];
                if (se.elevation_deg < cfg.min_elevation_deg) continue;
                ++visible;
                const LinkMeasurement m = best_measurement(
                    se, subset[i].id, d.crsb_eval.color_total_w, noise_w);
                if (std::isfinite(m.rsrp_dbm))
                    radio.sats.push_back({subset[i].id, m.rsrp_dbm, true});
            }
            const auto crsb_cands = build_candidates(d.crsb_eval, crsb_plan, cfg.signal,
                                                     cfg.min_elevation_deg, noise_w);
            radio.measurable_sats = static_cast<int>(crsb_cands.size());

            // Run the machine through its per-snapshot cycle (camp, start
            // positioning, request measurements, report) until it settles.
            for (int guard = 0; guard < 6; ++guard) {
                const UEPhase before = ue.proc.phase;
                StepResult r = step(ue.proc, radio, thresholds);
                ue.proc = r.state;
                if (r.action != UEAction::None) {
                    ActionLogRow a;
                    a.snapshot = snap;
                    a.ue_id = static_cast<int>(u);
                    a.phase_before = before;
                    a.phase_after = ue.proc.phase;
                    a.action = r.action;
                    a.serving_sat = ue.proc.serving_sat
                                        ? sat_linear_id(*ue.proc.serving_sat, cfg.shell)
                                        : -1;
                    d.actions.push_back(a);
                }
                if (r.action == UEAction::MeasurementRequest) d.positioning = true;
                if (r.action == UEAction::None ||
                    r.action == UEAction::InsufficientSatellites ||
                    r.action == UEAction::ReportFix)
                    break;
            }

            d.serving_subset_idx = -1;
            LinkSummaryRow& ls = d.summary;
            ls.snapshot = snap;
            ls.ue_id = static_cast<int>(u);
            ls.visible_sats = visible;
            ls.serving_rsrp_dbm = kNaN;
            ls.serving_sinr_db = kNaN;
            if (ue.proc.serving_sat) {
                ls.serving_sat = sat_linear_id(*ue.proc.serving_sat, cfg.shell);
                for (std::size_t i = 0; i < subset.size(); ++i) {
                    if (subset[i].id == *ue.proc.serving_sat) {
                        d.serving_subset_idx = static_cast<int>(i);
                        const LinkMeasurement m =
                            best_measurement(d.crsb_eval.sats[i], subset[i].id,
                                             d.crsb_eval.color_total_w, noise_w);
                        ls.serving_rsrp_dbm = m.rsrp_dbm;
                        ls.serving_sinr_db = m.sinr_db;
                        break;
                    }
                }
            }
        });

        // Distinct serving satellites that need a BH positioning plan.
        const bool want_bh =
            std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::BH) != cfg.schemes.end();
        std::map<std::pair<int, int>, BeamPlan> bh_plans;  // (serving idx, n)
        if (want_bh) {
            std::vector<int> servings;
            for (const auto& d : snap_data)
                if (d.positioning && d.serving_subset_idx >= 0)
                    servings.push_back(d.serving_subset_idx);
            std::sort(servings.begin(), servings.end());
            servings.erase(std::unique(servings.begin(), servings.end()), servings.end());

            for (int serving_idx : servings) {
                // Assisting candidates ranked by how high the serving nadir
                // sits above their own horizon.
                const Geodetic serving_nadir = subset[serving_idx].nadir;
                std::vector<std::pair<double, std::size_t>> ranked;
                for (std::size_t i = 0; i < subset.size(); ++i) {
                    if (static_cast<int>(i) == serving_idx) continue;
                    const GeometrySample g = geometry(subset[i], serving_nadir);
                    if (g.elevation_deg <= 0.0) continue;
                    ranked.emplace_back(-g.elevation_deg, i);
                }
                std::sort(ranked.begin(), ranked.end(),
                          [&](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first < b.first;
                              return subset[a.second].id < subset[b.second].id;
                          });
                for (int n : cfg.num_sats_list) {
                    std::vector<std::size_t> assisting;
                    for (int k = 0; k < n - 1 && k < static_cast<int>(ranked.size()); ++k)
                        assisting.push_back(ranked[k].second);
                    bh_plans.emplace(
                        std::make_pair(serving_idx, n),
                        build_beam_plan(Scheme::BH, Phase::PRSB,
                                        static_cast<std::size_t>(serving_idx), assisting,
                                        subset, base_layout, colors, plan_opts));
                }
            }
        }

        // Pass B: per-(UE, scheme, n) CRLB rows.
        parallel_for(cfg.ue_count, nthreads, [&](std::size_t u) {
            const UeWork& ue = ues[u];
            const UeSnapshot& d = snap_data[u];
            table.link_summaries[static_cast<std::size_t>(snap) * cfg.ue_count + u] =
                d.summary;

            for (int si = 0; si < num_schemes; ++si) {
                for (int ni = 0; ni < num_n; ++ni) {
                    const Scheme scheme = cfg.schemes[si];
                    const int n = cfg.num_sats_list[ni];
                    const std::size_t row_idx =
                        ((static_cast<std::size_t>(snap) * cfg.ue_count + u) * num_schemes +
                         si) * num_n + ni;
                    ResultRow& row = table.rows[row_idx];
                    row.snapshot = snap;
                    row.ue_id = static_cast<int>(u);
                    row.scheme = scheme;
                    row.num_sats = n;
                    row.crlb_m = kNaN;
                    row.gdop = kNaN;
                    row.serving_sat = d.summary.serving_sat;
                    row.num_measurable = 0;
                    row.status = RowStatus::InsufficientSatellites;
                    if (!d.positioning || d.serving_subset_idx < 0) continue;

                    std::vector<SatCandidateInfo> cands;
                    if (scheme == Scheme::TMCB) {
                        // PRSB plan identical to the CRSB plan.
                        cands = build_candidates(d.crsb_eval, crsb_plan, cfg.signal,
                                                 cfg.min_elevation_deg, noise_w);
                    } else {
                        const auto it = bh_plans.find({d.serving_subset_idx, n});
                        if (it == bh_plans.end()) continue;
                        const BeamPlan& plan = it->second;

                        // Delta update: only redirected satellites differ from
                        // the CRSB evaluation.
                        UePlanEval eval = d.crsb_eval;
                        for (std::size_t i = 0; i < plan.sats.size(); ++i) {
                            if (!plan.sats[i].redirected) continue;
                            SatLinkEval fresh = evaluate_sat(ue.pos, plan.sats[i],
                                                             plan.colors, subset,
                                                             cfg.antenna, cfg.rf);
                            for (int c = 0; c < kMaxColors; ++c) {
                                eval.color_total_w[c] +=
                                    fresh.color_power_w[c] - eval.sats[i].color_power_w[c];
                            }
                            eval.sats[i] = fresh;
                        }
                        cands = build_candidates(eval, plan, cfg.signal,
                                                 cfg.min_elevation_deg, noise_w);
                    }

                    row.num_measurable = static_cast<int>(cands.size());
                    std::vector<PositioningCandidate> pc;
                    pc.reserve(cands.size());
                    for (const auto& c : cands)
                        pc.push_back({c.sat, c.sinr_db, c.elevation_deg, c.sigma_tau_s});

                    try {
                        const SatId serving_id = subset[d.serving_subset_idx].id;
                        const auto sel =
                            select_positioning_sats(serving_id, pc, n, cfg.selection_rule);

                        std::vector<Eigen::Vector3d> sat_pos;
                        std::vector<double> sigma;
                        sat_pos.reserve(sel.size());
                        sigma.reserve(sel.size());
                        for (const SatId& id : sel) {
                            for (const auto& c : cands) {
                                if (c.sat == id) {
                                    sat_pos.push_back(subset[c.subset_idx].position);
                                    sigma.push_back(c.sigma_tau_s);
                                    break;
                                }
                            }
                        }
                        CrlbResult res = tdoa_crlb(ue.ecef, sat_pos, sigma, cfg.crlb_mode);
                        row.crlb_m = res.crlb_rmse_m;
                        row.gdop = res.gdop;
                        row.status = RowStatus::Ok;
                    } catch (const Error& e) {
                        row.status = (e.code() == "singular-fim")
                                         ? RowStatus::SingularFim
                                         : RowStatus::InsufficientSatellites;
                    }
                }
            }
        });

        for (auto& d : snap_data)
            for (auto& a : d.actions) table.actions.push_back(a);
    }
    return table;
}

double nearest_rank(std::vector<double> values, double q) {
    if (values.empty()) throw Error("empty-results", "percentile of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return values[k - 1];
}

Summary summarize(const ResultsTable& results) {
    if (results.rows.empty()) throw Error("empty-results", "no result rows");

    // Stable series discovery in row order, then one bucketing pass.
    std::vector<std::pair<Scheme, int>> keys;
    int max_snapshot = 0;
    for (const auto& r : results.rows) {
        const auto key = std::make_pair(r.scheme, r.num_sats);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        max_snapshot = std::max(max_snapshot, r.snapshot);
    }

    std::map<std::pair<Scheme, int>, std::vector<std::vector<double>>> buckets;
    for (const auto& key : keys)
        buckets[key].resize(static_cast<std::size_t>(max_snapshot) + 1);
    for (const auto& r : results.rows) {
        if (r.status != RowStatus::Ok || !std::isfinite(r.crlb_m)) continue;
        buckets[{r.scheme, r.num_sats}][r.snapshot].push_back(r.crlb_m);
    }

    Summary out;
    for (const auto& [scheme, n] : keys) {
        SeriesSummary s;
        s.scheme = scheme;
        s.num_sats = n;
        std::vector<double> run_values;
        const auto& per_snap = buckets[{scheme, n}];
        for (int snap = 0; snap <= max_snapshot; ++snap) {
            const auto& vals = per_snap[snap];
            if (vals.empty()) continue;
            SnapshotStats st;
            st.snapshot = snap;
            st.count = static_cast<int>(vals.size());
            st.median = nearest_rank(vals, 0.5);
            st.p10 = nearest_rank(vals, 0.1);
            st.p90 = nearest_rank(vals, 0.9);
            s.per_snapshot.push_back(st);
            run_values.insert(run_values.end(), vals.begin(), vals.end());
        }
        s.run_count = static_cast<int>(run_values.size());
        s.run_median = run_values.empty() ? kNaN : nearest_rank(run_values, 0.5);
        out.series.push_back(std::move(s));
    }

    // TMCB/BH median ratio per satellite count.
    std::vector<int> n_values;
    for (const auto& s : out.series)
        if (std::find(n_values.begin(), n_values.end(), s.num_sats) == n_values.end())
            n_values.push_back(s.num_sats);
    for (int n : n_values) {
        const SeriesSummary* bh = nullptr;
        const SeriesSummary* tmcb = nullptr;
        for (const auto& s : out.series) {
            if (s.num_sats != n) continue;
            (s.scheme == Scheme::BH ? bh : tmcb) = &s;
        }
        if (!bh || !tmcb) continue;
        std::vector<RatioPoint> ratios;
        for (const auto& b : bh->per_snapshot) {
            for (const auto& t : tmcb->per_snapshot) {
                if (t.snapshot == b.snapshot && b.median > 0.0) {
                    ratios.push_back({b.snapshot, t.median / b.median});
                    break;
                }
            }
        }
        out.ratio_series.emplace_back(n, std::move(ratios));
    }
    return out;
}

std::vector<OracleCheckResult> oracle_check(const ScenarioConfig& cfg,
                                            int num_geometries, int trials,
                                            std::uint64_t seed) {
    cfg.validate();
    const auto elements = build_constellation(cfg.shell);
    const auto states = propagate(elements, 0.0, cfg.shell.earth_rotation);
    const double sigma_range_m = 5.0;
    const double sigma_tau = sigma_range_m / kSpeedOfLightMS;

    std::vector<OracleCheckResult> out;
    for (int g = 0; g < num_geometries; ++g) {
        Rng rng(substream_seed(seed, 1000 + static_cast<std::uint64_t>(g)));
        for (int attempt = 0; attempt < 50; ++attempt) {
            const Geodetic ue{rng.uniform(cfg.region_lat_min_deg, cfg.region_lat_max_deg),
                              rng.uniform(cfg.region_lon_min_deg, cfg.region_lon_max_deg),
                              0.0};
            const auto vis = visible_satellites(ue, states, cfg.min_elevation_deg);
            if (vis.size() < 6) continue;

            // Six distinct random picks from the visible set.
            std::vector<std::size_t> picks;
            while (picks.size() < 6) {
                const std::size_t k =
                    static_cast<std::size_t>(rng.uniform01() * vis.size());
                const std::size_t idx = std::min(k, vis.size() - 1);
                if (std::find(picks.begin(), picks.end(), idx) == picks.end())
                    picks.push_back(idx);
            }
            std::vector<Eigen::Vector3d> sat_pos;
            for (std::size_t idx : picks)
                sat_pos.push_back(states[vis[idx].state_index].position);
            const std::vector<double> sigma(6, sigma_tau);

            try {
                const Eigen::Vector3d ue_ecef = geodetic_to_ecef(ue);
                const CrlbResult res =
                    tdoa_crlb(ue_ecef, sat_pos, sigma, CrlbMode::ThreeD);
                const McRmseResult mc = monte_carlo_rmse(
                    ue_ecef, sat_pos, sigma, trials,
                    substream_seed(seed, 2000 + static_cast<std::uint64_t>(g)));
                OracleCheckResult r;
                r.crlb_m = res.crlb_rmse_m;
                r.mc_rmse_m = mc.rmse_m;
                r.ratio = mc.rmse_m / res.crlb_rmse_m;
                r.nonconverged = mc.nonconverged_fraction;
                out.push_back(r);
                break;
            } catch (const Error&) {
                continue;  // degenerate draw; retry
            }
        }
    }
    return out;
}

}  // namespace ican
