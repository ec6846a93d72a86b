// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace foilfem {

inline constexpr double pi = 3.14159265358979323846;

// Planar problems live in (x, y) with current along the out-of-plane axis.
// Axisymmetric problems live in the (r, z) half plane, r >= 0, with
// azimuthal current. In both cases the first stored coordinate is the
// foil stacking direction (alpha).
enum class CoordinateSystem { planar, axisymmetric };

enum class RegionRole { air, core, turn, gap };

class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool valid() const { return x1 > x0 && y1 > y0; }
    bool contains(double x, double y, double tol = 0.0) const {
        return x >= x0 - tol && x <= x1 + tol && y >= y0 - tol && y <= y1 + tol;
    }
    bool contains(const Rect& r) const {
        return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
    }
    // interior overlap beyond floating-point noise on shared faces
    bool overlaps(const Rect& r, double tol = 0.0) const {
        return r.x0 < x1 - tol && r.x1 > x0 + tol && r.y0 < y1 - tol && r.y1 > y0 + tol;
    }
};

// One tagged rectangle of the geometry. turn_index is the 0-based foil
// index for turn/gap regions, -1 otherwise. in_bulk marks regions that the
// homogenized model treats as part of the foil-winding bulk. Target cell
// sizes are per direction so thin foils do not force a matching axial
// resolution.
struct Region {
    RegionRole role = RegionRole::air;
    int turn_index = -1;
    bool in_bulk = false;
    Rect box;
    double mesh_size_x = 0.0;  // meters, 0 = inherit the air size
    double mesh_size_y = 0.0;
};

// Affine map from a point inside the bulk to the normalized stacking
// coordinate alpha in [0, 1]. Alpha runs along the first coordinate:
// radial in axisymmetric mode, x in planar mode.
struct AlphaMap {
    Rect bulk;
    double thickness = 0.0;  // L_alpha, meters

    double operator()(double x, double y) const {
        const double tol = 1e-12 * thickness;
        if (!bulk.contains(x, y, tol))
            throw std::domain_error("alpha_of: point outside homogenized bulk");
        const double a = (x - bulk.x0) / thickness;
        return std::clamp(a, 0.0, 1.0);
    }
};

struct GeometrySpec {
    CoordinateSystem coord = CoordinateSystem::axisymmetric;
    Rect domain;                 // outer boundary box
    std::optional<Rect> core;    // non-conducting magnetic core
    Rect bulk;                   // bounding box of the turn stack
    int n_turns = 0;
    double fill_factor = 1.0;
    double mesh_size_air = 0.0;
    double mesh_size_core = 0.0;
    double mesh_size_foil = 0.0;   // across the foil (stacking direction)
    double mesh_size_gap = 0.0;    // across the insulation gap
    double mesh_size_axial = 0.0;  // along the foils

    double turn_pitch() const { return bulk.width() / n_turns; }
    double foil_thickness() const { return fill_factor * turn_pitch(); }
    double bulk_thickness() const { return bulk.width(); }
    // insulation gap between adjacent foils; the foils span the whole bulk,
    // so their bounding box equals the bulk rectangle at any fill factor
    double gap_width() const {
        return n_turns > 1 ? bulk.width() * (1.0 - fill_factor) / (n_turns - 1) : 0.0;
    }

    Rect turn_rect(int i) const {
        const double t = foil_thickness();
        if (n_turns == 1) {
            const double xc = 0.5 * (bulk.x0 + bulk.x1);
            return Rect{xc - 0.5 * t, bulk.y0, xc + 0.5 * t, bulk.y1};
        }
        const double x0 = bulk.x0 + i * (t + gap_width());
        return Rect{x0, bulk.y0, x0 + t, bulk.y1};
    }

    AlphaMap alpha_map() const { return AlphaMap{bulk, bulk.width()}; }

    // Leaf regions tiling the domain: core, foils and inter-foil gaps.
    // Whatever is not covered is air. Gaps exist only for fill factor < 1.
    std::vector<Region> regions() const;

    void validate() const;
};

inline std::vector<Region> GeometrySpec::regions() const {
    std::vector<Region> out;
    if (core)
        out.push_back({RegionRole::core, -1, false, *core, mesh_size_core, mesh_size_core});
    const double g = gap_width();
    for (int i = 0; i < n_turns; ++i) {
        const Rect foil = turn_rect(i);
        out.push_back({RegionRole::turn, i, true, foil, mesh_size_foil, mesh_size_axial});
        if (g > 0.0 && i + 1 < n_turns)
            out.push_back({RegionRole::gap, i, true,
                           Rect{foil.x1, bulk.y0, foil.x1 + g, bulk.y1}, mesh_size_gap,
                           mesh_size_axial});
    }
    if (n_turns == 1 && fill_factor < 1.0) {
        const Rect foil = turn_rect(0);
        if (foil.x0 > bulk.x0)
            out.push_back({RegionRole::gap, 0, true, Rect{bulk.x0, bulk.y0, foil.x0, bulk.y1},
                           mesh_size_gap, mesh_size_axial});
        if (foil.x1 < bulk.x1)
            out.push_back({RegionRole::gap, 0, true, Rect{foil.x1, bulk.y0, bulk.x1, bulk.y1},
                           mesh_size_gap, mesh_size_axial});
    }
    return out;
}

inline void GeometrySpec::validate() const {
    if (!domain.valid())
        throw validation_error("geometry: outer box has non-positive extent");
    if (n_turns < 1)
        throw validation_error("geometry: need at least one turn");
    if (!(fill_factor > 0.0 && fill_factor <= 1.0))
        throw validation_error("geometry: fill factor must be in (0, 1]");
    if (!bulk.valid())
        throw validation_error("geometry: bulk rectangle has non-positive extent");
    if (!domain.contains(bulk))
        throw validation_error("geometry: bulk not inside outer box");
    if (core) {
        if (!core->valid())
            throw validation_error("geometry: core has non-positive extent");
        if (!domain.contains(*core))
            throw validation_error("geometry: core not inside outer box");
        if (core->overlaps(bulk))
            throw validation_error("geometry: core overlaps winding bulk");
    }
    if (coord == CoordinateSystem::axisymmetric) {
        if (domain.x0 < 0.0)
            throw validation_error("geometry: axisymmetric regions must have r >= 0");
    }
    const auto regs = regions();
    const double tol = 1e-9 * std::max(domain.width(), domain.height());
    for (std::size_t i = 0; i < regs.size(); ++i)
        for (std::size_t j = i + 1; j < regs.size(); ++j)
            if (regs[i].box.overlaps(regs[j].box, tol))
                throw validation_error("geometry: overlapping regions");
}

// Dimension record for the benchmark presets; every value can be overridden.
struct BenchmarkParams {
    CoordinateSystem coord = CoordinateSystem::axisymmetric;
    int n_turns = 20;
    double fill_factor = 0.0;  // 0 selects the preset default
    double bulk_inner = 20e-3;    // inner radius (axisymmetric) / left x (planar)
    double bulk_thickness = 10e-3;  // L_alpha
    double bulk_height = 30e-3;     // axial / y extent of the winding
    double core_radius = 15e-3;     // 0 disables the core
    double core_height = 60e-3;
    double air_radius = 120e-3;
    double air_height = 120e-3;
    double mesh_size_air = 8e-3;
    double mesh_size_core = 5e-3;
    double mesh_size_foil = 0.0;   // 0: one cell across each foil
    double mesh_size_gap = 0.0;    // 0: one cell across each gap
    double mesh_size_axial = 0.0;  // 0: twenty cells along the winding
};

enum class GeometryPreset { axi20, hts20, custom };

inline GeometrySpec build_benchmark_geometry(GeometryPreset preset,
                                             BenchmarkParams params = {}) {
    if (params.fill_factor == 0.0) {
        // axi20 keeps a thin insulation film between foils so the resolved
        // h-phi model has one cut per turn; hts20 mirrors a tape-wound coil
        switch (preset) {
            case GeometryPreset::axi20: params.fill_factor = 0.9; break;
            case GeometryPreset::hts20: params.fill_factor = 0.1; break;
            case GeometryPreset::custom: params.fill_factor = 1.0; break;
        }
    }

    if (params.n_turns < 1)
        throw validation_error("geometry: need at least one turn");
    if (params.bulk_inner < 0.0 || params.bulk_thickness <= 0.0 ||
        params.bulk_height <= 0.0 || params.air_radius <= 0.0 ||
        params.air_height <= 0.0)
        throw validation_error("geometry: dimensions must be positive");

    GeometrySpec g;
    g.coord = params.coord;
    g.n_turns = params.n_turns;
    g.fill_factor = params.fill_factor;
    const double x_origin = g.coord == CoordinateSystem::axisymmetric
                                ? 0.0
                                : -0.5 * params.air_radius;
    g.domain = Rect{x_origin, -0.5 * params.air_height,
                    x_origin + params.air_radius, 0.5 * params.air_height};
    g.bulk = Rect{params.bulk_inner, -0.5 * params.bulk_height,
                  params.bulk_inner + params.bulk_thickness, 0.5 * params.bulk_height};
    if (params.core_radius > 0.0) {
        const double cx0 = g.coord == CoordinateSystem::axisymmetric
                               ? 0.0
                               : -0.5 * params.core_radius;
        g.core = Rect{cx0, -0.5 * params.core_height,
                      cx0 + params.core_radius, 0.5 * params.core_height};
    }
    g.mesh_size_air = params.mesh_size_air;
    g.mesh_size_core = params.mesh_size_core;
    g.mesh_size_foil =
        params.mesh_size_foil > 0.0 ? params.mesh_size_foil : g.foil_thickness();
    const double gap = g.gap_width();
    g.mesh_size_gap =
        params.mesh_size_gap > 0.0 ? params.mesh_size_gap
                                   : (gap > 0.0 ? gap : g.turn_pitch());
    g.mesh_size_axial =
        params.mesh_size_axial > 0.0 ? params.mesh_size_axial : g.bulk.height() / 20.0;
    g.validate();
    return g;
}

}  // namespace foilfem
