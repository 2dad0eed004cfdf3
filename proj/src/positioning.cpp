#include "ican/positioning.hpp"

#include <algorithm>
#include <cmath>

#include "ican/constants.hpp"
#include "ican/errors.hpp"
#include "ican/geo.hpp"
#include "ican/rng.hpp"

namespace ican {

double PrsbSignal::rms_bandwidth_hz() const {
    return flat_spectrum ? occupied_bandwidth_hz / std::sqrt(12.0)
                         : rms_bandwidth_override_hz;
}

void PrsbSignal::validate() const {
    if (occupied_bandwidth_hz <= 0.0)
        throw Error("invalid-config", "PRSB bandwidth must be positive");
    if (coherent_gain < 1.0)
        throw Error("invalid-config", "coherent gain must be >= 1");
    if (!flat_spectrum && rms_bandwidth_override_hz <= 0.0)
        throw Error("invalid-config", "explicit rms bandwidth must be positive");
}

double toa_variance_s2(double sinr_linear, const PrsbSignal& signal) {
    if (!(sinr_linear > 0.0)) throw Error("nonpositive-sinr", "SINR must be > 0");
    signal.validate();
    const double beta = signal.rms_bandwidth_hz();
    return 1.0 / (8.0 * kPi * kPi * beta * beta * sinr_linear * signal.coherent_gain);
}

std::vector<SatId> select_positioning_sats(const SatId& serving,
                                           const std::vector<PositioningCandidate>& candidates,
                                           int n, SelectionRule rule) {
    if (n < 1) throw Error("invalid-config", "n must be >= 1");
    std::vector<PositioningCandidate> usable;
    bool serving_found = false;
    for (const auto& c : candidates) {
        if (!std::isfinite(c.sigma_tau_s) || c.sigma_tau_s <= 0.0) continue;
        if (c.sat == serving) {
            serving_found = true;
            continue;
        }
        usable.push_back(c);
    }
    if (!serving_found)
        throw Error("insufficient-satellites", "serving satellite not measurable");
    if (static_cast<int>(usable.size()) < n - 1)
        throw Error("insufficient-satellites", "fewer than n measurable satellites");

    const auto metric = [rule](const PositioningCandidate& c) {
        return rule == SelectionRule::BestSinr ? c.prsb_sinr_db : c.elevation_deg;
    };
    std::sort(usable.begin(), usable.end(),
              [&](const PositioningCandidate& a, const PositioningCandidate& b) {
                  if (metric(a) != metric(b)) return metric(a) > metric(b);
                  return a.sat < b.sat;
              });

    std::vector<SatId> out{serving};
    for (int i = 0; i < n - 1; ++i) out.push_back(usable[i].sat);
    return out;
}

namespace {

// TDOA Jacobian: row i-1 = (u_ref - u_i)^T, i = 1..n-1, with u_k the unit
// vector from the UE to satellite k.
Eigen::MatrixXd tdoa_jacobian(const Eigen::Vector3d& ue,
                              const std::vector<Eigen::Vector3d>& sats) {
    const Eigen::Vector3d u_ref = (sats[0] - ue).normalized();
    Eigen::MatrixXd j(static_cast<int>(sats.size()) - 1, 3);
    for (std::size_t i = 1; i < sats.size(); ++i)
        j.row(static_cast<int>(i) - 1) = (u_ref - (sats[i] - ue).normalized()).transpose();
    return j;
}

// Columns spanning the estimation space: identity for 3D, local east/north
// for the fixed-altitude mode.
Eigen::MatrixXd mode_projection(const Eigen::Vector3d& ue, CrlbMode mode) {
    if (mode == CrlbMode::ThreeD) return Eigen::MatrixXd::Identity(3, 3);
    const EnuBasis b = enu_basis(ue);
    Eigen::MatrixXd t(3, 2);
    t.col(0) = b.east;
    t.col(1) = b.north;
    return t;
}

Eigen::MatrixXd tdoa_covariance_m2(const std::vector<double>& sigma_tau_s) {
    const int m = static_cast<int>(sigma_tau_s.size()) - 1;
    const double c2 = kSpeedOfLightMS * kSpeedOfLightMS;
    const double ref_var = sigma_tau_s[0] * sigma_tau_s[0];
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(m, m, c2 * ref_var);
    for (int i = 0; i < m; ++i)
        r(i, i) += c2 * sigma_tau_s[i + 1] * sigma_tau_s[i + 1];
    return r;
}

void check_inputs(const std::vector<Eigen::Vector3d>& sats,
                  const std::vector<double>& sigma, CrlbMode mode) {
    const std::size_t min_sats = (mode == CrlbMode::ThreeD) ? 4 : 3;
    if (sats.size() < min_sats)
        throw Error("insufficient-satellites", "too few satellites for the mode");
    if (sigma.size() != sats.size())
        throw Error("invalid-config", "sigma list size mismatch");
    for (double s : sigma)
        if (!(s > 0.0) || !std::isfinite(s))
            throw Error("invalid-config", "sigma_tau must be finite and positive");
}

// trace of the inverse via eigendecomposition; throws `code` when the matrix
// is numerically rank deficient.
double trace_inverse_spd(const Eigen::MatrixXd& m, const char* code) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto& ev = es.eigenvalues();
    const double floor = std::max(ev.maxCoeff(), 0.0) * 1e-12;
    double tr = 0.0;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev[i] <= floor)
            throw Error(code, "degenerate geometry: rank-deficient information matrix");
        tr += 1.0 / ev[i];
    }
    return tr;
}

}  // namespace

CrlbResult tdoa_crlb(const Eigen::Vector3d& ue_true_ecef,
                     const std::vector<Eigen::Vector3d>& sat_positions,
                     const std::vector<double>& sigma_tau_s, CrlbMode mode) {
    check_inputs(sat_positions, sigma_tau_s, mode);

    const Eigen::MatrixXd t = mode_projection(ue_true_ecef, mode);
    const Eigen::MatrixXd j = tdoa_jacobian(ue_true_ecef, sat_positions) * t;
    const Eigen::MatrixXd r = tdoa_covariance_m2(sigma_tau_s);

    const Eigen::LLT<Eigen::MatrixXd> llt(r);
    if (llt.info() != Eigen::Success)
        throw Error("singular-fim", "TDOA covariance not positive definite");
    const Eigen::MatrixXd fim = j.transpose() * llt.solve(j);

    CrlbResult res;
    res.num_sats = static_cast<int>(sat_positions.size());
    res.fim = 0.5 * (fim + fim.transpose());  // enforce exact symmetry
    res.crlb_rmse_m = std::sqrt(trace_inverse_spd(res.fim, "singular-fim"));
    res.gdop = std::sqrt(trace_inverse_spd(j.transpose() * j, "singular-fim"));
    res.per_sat_sigma_range_m.reserve(sigma_tau_s.size());
    for (double s : sigma_tau_s)
        res.per_sat_sigma_range_m.push_back(kSpeedOfLightMS * s);
    return res;
}

double gdop(const Eigen::Vector3d& ue_true_ecef,
            const std::vector<Eigen::Vector3d>& sat_positions, CrlbMode mode) {
    const std::size_t min_sats = (mode == CrlbMode::ThreeD) ? 4 : 3;
    if (sat_positions.size() < min_sats)
        throw Error("insufficient-satellites", "too few satellites for the mode");
    const Eigen::MatrixXd t = mode_projection(ue_true_ecef, mode);
    const Eigen::MatrixXd j = tdoa_jacobian(ue_true_ecef, sat_positions) * t;
    return std::sqrt(trace_inverse_spd(j.transpose() * j, "singular-geometry"));
}

McRmseResult monte_carlo_rmse(const Eigen::Vector3d& ue_true_ecef,
                              const std::vector<Eigen::Vector3d>& sat_positions,
                              const std::vector<double>& sigma_tau_s, int trials,
                              std::uint64_t seed) {
    if (trials < 100) throw Error("invalid-config", "trials must be >= 100");
    check_inputs(sat_positions, sigma_tau_s, CrlbMode::ThreeD);
    const int n = static_cast<int>(sat_positions.size());
    const int m = n - 1;

    const Eigen::MatrixXd r = tdoa_covariance_m2(sigma_tau_s);
    const Eigen::LLT<Eigen::MatrixXd> r_llt(r);
    if (r_llt.info() != Eigen::Success)
        throw Error("singular-fim", "TDOA covariance not positive definite");

    const auto model = [&](const Eigen::Vector3d& x, Eigen::VectorXd& h,
                           Eigen::MatrixXd& j) {
        const double r_ref = (x - sat_positions[0]).norm();
        const Eigen::Vector3d g_ref = (x - sat_positions[0]) / r_ref;
        for (int i = 1; i < n; ++i) {
            const double ri = (x - sat_positions[i]).norm();
            h(i - 1) = ri - r_ref;
            j.row(i - 1) = ((x - sat_positions[i]) / ri - g_ref).transpose();
        }
    };

    double sum_sq = 0.0;
    int converged = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(substream_seed(seed, static_cast<std::uint64_t>(t)));
        Eigen::VectorXd range_noise(n);
        for (int i = 0; i < n; ++i)
            range_noise(i) = kSpeedOfLightMS * sigma_tau_s[i] * rng.normal();

        Eigen::VectorXd d(m);
        for (int i = 1; i < n; ++i) {
            const double ri = (ue_true_ecef - sat_positions[i]).norm() + range_noise(i);
            const double r0 = (ue_true_ecef - sat_positions[0]).norm() + range_noise(0);
            d(i - 1) = ri - r0;
        }

        Eigen::Vector3d x = ue_true_ecef;
        for (int k = 0; k < 3; ++k) x(k) += 1000.0 * rng.normal();

        Eigen::VectorXd h(m);
        Eigen::MatrixXd j(m, 3);
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            model(x, h, j);
            const Eigen::MatrixXd jw = r_llt.solve(j);
            const Eigen::Matrix3d a = j.transpose() * jw;
            const Eigen::Vector3d b = jw.transpose() * (d - h);
            const Eigen::Vector3d step = a.ldlt().solve(b);
            if (!step.allFinite()) break;
            x += step;
            if (step.norm() < 1e-4) {
                ok = true;
                break;
            }
        }
        if (ok) {
            ++converged;
            sum_sq += (x - ue_true_ecef).squaredNorm();
        }
    }

    McRmseResult out;
    out.trials = trials;
    out.nonconverged_fraction = 1.0 - static_cast<double>(converged) / trials;
    if (out.nonconverged_fraction > 0.05)
        throw Error("excessive-nonconvergence",
                    "more than 5% of Monte-Carlo trials failed to converge");
    out.rmse_m = converged > 0 ? std::sqrt(sum_sq / converged) : 0.0;
    return out;
}

}  // namespace ican
