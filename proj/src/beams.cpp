#include "ican/beams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ican/bessel.hpp"
#include "ican/constants.hpp"
#include "ican/errors.hpp"
#include "ican/geo.hpp"

namespace ican {
namespace {

// Axial hex coordinates; uv = spacing * (q + r/2, r*sqrt(3)/2).
struct Axial {
    int q = 0;
    int r = 0;
};

UVPoint axial_to_uv(const Axial& a, double spacing) {
    return {spacing * (a.q + 0.5 * a.r), spacing * (std::sqrt(3.0) / 2.0) * a.r};
}

std::vector<Axial> hex_axials(int rings) {
    std::vector<Axial> out;
    out.push_back({0, 0});
    static constexpr int kDirs[6][2] = {{-1, 1}, {-1, 0}, {0, -1}, {1, -1}, {1, 0}, {0, 1}};
    for (int ring = 1; ring <= rings; ++ring) {
        Axial p{ring, 0};
        for (const auto& d : kDirs) {
            for (int step = 0; step < ring; ++step) {
                out.push_back(p);
                p.q += d[0];
                p.r += d[1];
            }
        }
    }
    return out;
}

int color3(const Axial& a) {
    return ((a.q - a.r) % 3 + 3) % 3;
}

int color4(const Axial& a) {
    return ((a.q % 2 + 2) % 2) + 2 * ((a.r % 2 + 2) % 2);
}

}  // namespace

double AntennaModel::wavenumber() const {
    return 2.0 * kPi * carrier_hz / kSpeedOfLightMS;
}

void AntennaModel::validate() const {
    if (aperture_radius_m <= 0.0 || carrier_hz <= 0.0)
        throw Error("invalid-config", "antenna aperture and frequency must be positive");
}

double pattern_gain(double off_boresight_rad, const AntennaModel& model) {
    if (off_boresight_rad < 0.0)
        throw Error("invalid-config", "negative off-boresight angle");
    if (off_boresight_rad == 0.0) return 1.0;
    if (off_boresight_rad > kPi / 2.0) return 0.0;
    const double x = model.wavenumber() * model.aperture_radius_m * std::sin(off_boresight_rad);
    if (x == 0.0) return 1.0;
    const double t = 2.0 * bessel_j1(x) / x;
    return t * t;
}

double half_power_x() {
    // gain(x) = (2*J1(x)/x)^2 is monotone on [0, first root]; bisect once.
    static const double cached = [] {
        double lo = 1e-9, hi = kBesselJ1FirstRoot;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double t = 2.0 * bessel_j1(mid) / mid;
            (t * t > 0.5 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return cached;
}

double half_power_beamwidth_rad(const AntennaModel& model) {
    model.validate();
    const double s = half_power_x() / (model.wavenumber() * model.aperture_radius_m);
    if (s >= 1.0)
        throw Error("invalid-config", "aperture too small for a defined half-power beamwidth");
    return 2.0 * std::asin(s);
}

double default_uv_spacing(const AntennaModel& model) {
    return std::sqrt(3.0) * std::sin(0.5 * half_power_beamwidth_rad(model));
}

std::vector<UVPoint> hex_layout(int rings, double uv_spacing) {
    if (rings < 0) throw Error("invalid-config", "rings must be >= 0");
    if (uv_spacing <= 0.0) throw Error("invalid-config", "uv_spacing must be positive");
    std::vector<UVPoint> out;
    for (const Axial& a : hex_axials(rings)) {
        UVPoint p = axial_to_uv(a, uv_spacing);
        if (p.u * p.u + p.v * p.v > 1.0)
            throw Error("layout-exceeds-unit-disk", "hex layout leaves the unit disk");
        out.push_back(p);
    }
    return out;
}

std::vector<UVPoint> translate_layout(const std::vector<UVPoint>& layout, UVPoint center) {
    std::vector<UVPoint> out;
    out.reserve(layout.size());
    for (const UVPoint& p : layout) {
        UVPoint t{p.u + center.u, p.v + center.v};
        if (t.u * t.u + t.v * t.v > 1.0)
            throw Error("layout-exceeds-unit-disk", "translated layout leaves the unit disk");
        out.push_back(t);
    }
    return out;
}

std::vector<int> assign_colors(const std::vector<UVPoint>& layout, int reuse_factor) {
    if (reuse_factor != 1 && reuse_factor != 3 && reuse_factor != 4)
        throw Error("unsupported-reuse-factor", "reuse factor must be 1, 3 or 4");
    if (layout.empty()) return {};
    if (reuse_factor == 1 || layout.size() == 1)
        return std::vector<int>(layout.size(), 0);

    // Recover the lattice pitch (nearest-neighbor distance), then axial
    // indices relative to the first point.
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < layout.size(); ++i) {
        for (std::size_t j = i + 1; j < layout.size(); ++j) {
            const double du = layout[i].u - layout[j].u;
            const double dv = layout[i].v - layout[j].v;
            spacing = std::min(spacing, std::hypot(du, dv));
        }
    }

    std::vector<int> colors(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const double x = (layout[i].u - layout[0].u) / spacing;
        const double y = (layout[i].v - layout[0].v) / spacing;
        const double rf = y / (std::sqrt(3.0) / 2.0);
        const double qf = x - 0.5 * rf;
        Axial a{static_cast<int>(std::lround(qf)), static_cast<int>(std::lround(rf))};
        if (std::abs(qf - a.q) > 1e-6 || std::abs(rf - a.r) > 1e-6)
            throw Error("invalid-config", "layout is not a hexagonal lattice");
        colors[i] = (reuse_factor == 3) ? color3(a) : color4(a);
    }
    return colors;
}

UvBasis uv_basis(const SatelliteState& sat) {
    UvBasis b;
    b.nadir_dir = -sat.position.normalized();
    const Eigen::Vector3d vproj =
        sat.velocity - sat.velocity.dot(b.nadir_dir) * b.nadir_dir;
    const double n = vproj.norm();
    if (n < 1e-9)
        throw Error("invalid-config", "velocity parallel to nadir; UV basis undefined");
    b.e1 = vproj / n;
    b.e2 = b.nadir_dir.cross(b.e1);
    return b;
}

Eigen::Vector3d beam_direction(const UvBasis& basis, UVPoint uv) {
    const double w2 = 1.0 - uv.u * uv.u - uv.v * uv.v;
    if (w2 < 0.0)
        throw Error("layout-exceeds-unit-disk", "beam direction outside the unit disk");
    return uv.u * basis.e1 + uv.v * basis.e2 + std::sqrt(w2) * basis.nadir_dir;
}

UVPoint steer_to_target(const SatelliteState& sat, const Eigen::Vector3d& target_ecef) {
    const UvBasis basis = uv_basis(sat);
    const Eigen::Vector3d d = (target_ecef - sat.position).normalized();
    if (d.dot(basis.nadir_dir) <= 0.0)
        throw Error("target-behind-satellite", "target is >= 90 deg off nadir");
    return {d.dot(basis.e1), d.dot(basis.e2)};
}

std::optional<Eigen::Vector3d> ground_intersection(const Eigen::Vector3d& sat_pos,
                                                   const Eigen::Vector3d& dir) {
    const Eigen::Vector3d d = dir.normalized();
    const double pd = sat_pos.dot(d);
    const double disc = pd * pd - (sat_pos.squaredNorm() - kEarthRadiusM * kEarthRadiusM);
    if (disc < 0.0) return std::nullopt;
    const double t = -pd - std::sqrt(disc);
    if (t <= 0.0) return std::nullopt;
    return sat_pos + t * d;
}

int SatBeamSet::active_count() const {
    int n = 0;
    for (auto a : active) n += (a != 0);
    return n;
}

std::vector<BeamSpec> BeamPlan::all_beams() const {
    std::vector<BeamSpec> out;
    for (const SatBeamSet& s : sats) {
        for (std::size_t b = 0; b < s.uv.size(); ++b) {
            BeamSpec spec;
            spec.owner = s.sat;
            spec.beam_index = static_cast<int>(b);
            spec.uv = s.uv[b];
            spec.color = colors[b];
            spec.role = role;
            spec.active = s.active[b] != 0;
            out.push_back(spec);
        }
    }
    return out;
}

BeamPlan build_beam_plan(Scheme scheme, Phase phase, std::size_t serving_index,
                         const std::vector<std::size_t>& assisting_indices,
                         const std::vector<SatelliteState>& states,
                         const std::vector<UVPoint>& base_layout,
                         const std::vector<int>& colors,
                         const BeamPlanOptions& opts) {
    if (serving_index >= states.size())
        throw Error("invalid-config", "serving index out of range");
    if (colors.size() != base_layout.size())
        throw Error("invalid-config", "color map size mismatch");

    BeamPlan plan;
    plan.scheme = scheme;
    plan.phase = phase;
    plan.role = (phase == Phase::CRSB) ? BeamRole::Communication : BeamRole::Positioning;
    plan.serving = states[serving_index].id;
    plan.colors = colors;

    const bool redirect = (scheme == Scheme::BH && phase == Phase::PRSB);
    const SatelliteState& serving = states[serving_index];
    const Eigen::Vector3d serving_nadir = geodetic_to_ecef(serving.nadir);

    // Serving communication footprint: ground reach of the own-nadir layout.
    const UvBasis serving_basis = uv_basis(serving);
    double footprint = 0.0;
    for (const UVPoint& p : base_layout) {
        const auto hit = ground_intersection(serving.position, beam_direction(serving_basis, p));
        if (hit) footprint = std::max(footprint, ground_arc_m(serving_nadir, *hit));
    }
    plan.footprint_radius_m = footprint;

    std::vector<std::uint8_t> is_assisting(states.size(), 0);
    if (redirect) {
        for (std::size_t idx : assisting_indices) {
            if (idx >= states.size() || idx == serving_index)
                throw Error("invalid-config", "bad assisting index");
            is_assisting[idx] = 1;
            plan.assisting.push_back(states[idx].id);
        }
    }

    for (std::size_t i = 0; i < states.size(); ++i) {
        const SatelliteState& st = states[i];
        SatBeamSet set;
        set.sat = st.id;
        set.state_index = i;
        set.redirected = redirect && is_assisting[i] != 0;
        const UvBasis basis = uv_basis(st);
        set.uv.reserve(base_layout.size());
        set.dir.reserve(base_layout.size());
        set.active.reserve(base_layout.size());

        UVPoint center{0.0, 0.0};
        if (set.redirected) center = steer_to_target(st, serving_nadir);

        for (const UVPoint& p : base_layout) {
            UVPoint uv{p.u + center.u, p.v + center.v};
            bool active = true;
            Eigen::Vector3d dir = Eigen::Vector3d::Zero();
            if (uv.u * uv.u + uv.v * uv.v > 1.0) {
                // Unsteerable direction; the transmitter cannot form it.
                active = false;
            } else {
                dir = beam_direction(basis, uv);
                if (set.redirected && opts.edge_shutoff) {
                    const auto hit = ground_intersection(st.position, dir);
                    if (!hit || ground_arc_m(serving_nadir, *hit) > footprint + 1e-6)
                        active = false;
                }
            }
            set.uv.push_back(uv);
            set.dir.push_back(dir);
            set.active.push_back(active ? 1 : 0);
        }
        plan.sats.push_back(std::move(set));
    }
    return plan;
}

}  // namespace ican
