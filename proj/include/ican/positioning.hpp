#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ican/beams.hpp"
#include "ican/constellation.hpp"

namespace ican {

// Ranging-signal description driving the ToA error bound.
struct PrsbSignal {
    double occupied_bandwidth_hz = 3.6e6;
    double coherent_gain = 1.0;
    bool flat_spectrum = true;            // rms bandwidth = occupied/sqrt(12)
    double rms_bandwidth_override_hz = 0.0;

    double rms_bandwidth_hz() const;
    void validate() const;
};

// ToA error variance (s^2): 1 / (8*pi^2 * beta_rms^2 * SINR * coherent gain).
// Throws "nonpositive-sinr".
double toa_variance_s2(double sinr_linear, const PrsbSignal& signal);

enum class CrlbMode : std::uint8_t { ThreeD, TwoDFixedAltitude };
enum class SelectionRule : std::uint8_t { BestSinr, HighestElevation };

struct PositioningCandidate {
    SatId sat;
    double prsb_sinr_db = 0.0;
    double elevation_deg = 0.0;
    double sigma_tau_s = 0.0;  // must be finite and positive to count
};

// Serving satellite plus the n-1 best others under the rule; deterministic
// tie-break by ascending sat id. Throws "insufficient-satellites".
std::vector<SatId> select_positioning_sats(const SatId& serving,
                                           const std::vector<PositioningCandidate>& candidates,
                                           int n, SelectionRule rule);

struct CrlbResult {
    int ue_id = -1;
    int snapshot_index = -1;
    Scheme scheme = Scheme::TMCB;
    int num_sats = 0;
    std::vector<SatId> sat_set;
    Eigen::MatrixXd fim;                      // 1/m^2; 3x3 (or 2x2 in 2D mode)
    double crlb_rmse_m = 0.0;
    double gdop = 0.0;
    std::vector<double> per_sat_sigma_range_m;
};

// TDOA Fisher information and CRLB. Satellite list is ordered with the
// reference (serving) satellite first; sigma_tau parallels it. Range
// differences are measured against the reference, with covariance
// R = c^2 (diag(sigma_i^2) + sigma_ref^2 * 1 1^T). Throws "singular-fim" on
// degenerate geometry.
CrlbResult tdoa_crlb(const Eigen::Vector3d& ue_true_ecef,
                     const std::vector<Eigen::Vector3d>& sat_positions,
                     const std::vector<double>& sigma_tau_s, CrlbMode mode);

// Geometry-only dilution of precision from the same TDOA Jacobian with
// identity covariance. Throws "singular-geometry".
double gdop(const Eigen::Vector3d& ue_true_ecef,
            const std::vector<Eigen::Vector3d>& sat_positions, CrlbMode mode);

// Monte-Carlo Gauss-Newton estimator, the independent oracle for the CRLB.
struct McRmseResult {
    double rmse_m = 0.0;
    double nonconverged_fraction = 0.0;
    int trials = 0;
};

// Draws Gaussian ToA noise, forms TDOAs, solves weighted nonlinear least
// squares from a perturbed start (<= 50 Gauss-Newton iterations, step
// tolerance 1e-4 m). Deterministic per-trial substreams from the seed.
// Throws "excessive-nonconvergence" above 5% failed trials.
McRmseResult monte_carlo_rmse(const Eigen::Vector3d& ue_true_ecef,
                              const std::vector<Eigen::Vector3d>& sat_positions,
                              const std::vector<double>& sigma_tau_s, int trials,
                              std::uint64_t seed);

}  // namespace ican
