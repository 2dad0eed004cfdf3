#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ican/positioning.hpp"
#include "ican/procedure.hpp"
#include "ican/scenario.hpp"

namespace ican {

enum class RowStatus : std::uint8_t { Ok, InsufficientSatellites, SingularFim };

std::string row_status_name(RowStatus s);
RowStatus row_status_from_name(const std::string& s);

// One CRLB evaluation: (snapshot, UE, scheme, satellite count).
struct ResultRow {
    int snapshot = 0;
    int ue_id = 0;
    Scheme scheme = Scheme::TMCB;
    int num_sats = 0;
    double crlb_m = 0.0;  // NaN unless status == Ok
    double gdop = 0.0;    // NaN unless status == Ok
    int serving_sat = -1;  // linear satellite id, -1 if the UE never camped
    int num_measurable = 0;
    RowStatus status = RowStatus::Ok;
};

struct LinkSummaryRow {
    int snapshot = 0;
    int ue_id = 0;
    int serving_sat = -1;
    double serving_rsrp_dbm = 0.0;
    double serving_sinr_db = 0.0;
    int visible_sats = 0;
};

struct ActionLogRow {
    int snapshot = 0;
    int ue_id = 0;
    UEPhase phase_before = UEPhase::Searching;
    UEPhase phase_after = UEPhase::Searching;
    UEAction action = UEAction::None;
    int serving_sat = -1;
};

struct ResultsTable {
    std::vector<ResultRow> rows;  // sorted by (snapshot, ue, scheme, num_sats)
    std::vector<LinkSummaryRow> link_summaries;
    std::vector<ActionLogRow> actions;
    std::string config_hash;
    std::string tool_version;
};

// Snapshot loop over the whole scenario. Deterministic for a fixed seed
// independent of `threads` (0 = ICAN_SIM_THREADS env or hardware count).
ResultsTable run_scenario(const ScenarioConfig& cfg, int threads = 0);

// Nearest-rank percentile statistics of crlb_m over Ok rows.
struct SnapshotStats {
    int snapshot = 0;
    double median = 0.0;
    double p10 = 0.0;
    double p90 = 0.0;
    int count = 0;
};

struct SeriesSummary {
    Scheme scheme = Scheme::TMCB;
    int num_sats = 0;
    std::vector<SnapshotStats> per_snapshot;
    double run_median = 0.0;  // over all Ok rows of the series
    int run_count = 0;
};

struct RatioPoint {
    int snapshot = 0;
    double tmcb_over_bh = 0.0;
};

struct Summary {
    std::vector<SeriesSummary> series;
    // Per num_sats value: per-snapshot TMCB/BH median ratio (where both exist).
    std::vector<std::pair<int, std::vector<RatioPoint>>> ratio_series;
};

// Throws "empty-results" when no rows are present.
Summary summarize(const ResultsTable& results);

// Nearest-rank percentile (q in (0,1]) of an unsorted sample.
double nearest_rank(std::vector<double> values, double q);

int resolve_thread_count(int requested);

// Monte-Carlo Gauss-Newton vs CRLB on randomized 6-satellite geometries drawn
// from the constellation at snapshot 0 (equal 5 m range sigmas). Degenerate
// draws are rejected and redrawn.
struct OracleCheckResult {
    double crlb_m = 0.0;
    double mc_rmse_m = 0.0;
    double ratio = 0.0;
    double nonconverged = 0.0;
};

std::vector<OracleCheckResult> oracle_check(const ScenarioConfig& cfg,
                                            int num_geometries, int trials,
                                            std::uint64_t seed);

}  // namespace ican
