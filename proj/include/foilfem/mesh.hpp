// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "foilfem/geometry.hpp"

namespace foilfem {

using Vec2 = std::array<double, 2>;

enum class BoundaryTag : std::uint8_t { interior, outer, axis };

struct RegionInfo {
    RegionRole role = RegionRole::air;
    int turn_index = -1;
    bool in_bulk = false;
};

// Conforming triangle mesh. Edges are oriented from the lower to the higher
// node index; triangles are counter-clockwise. Immutable after construction.
struct Mesh {
    CoordinateSystem coord = CoordinateSystem::planar;
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<int, 2>> edges;       // (lo, hi) node pair
    std::vector<std::array<int, 3>> tris;        // node triples, CCW
    std::vector<std::array<int, 3>> tri_edges;   // edge ids, local edges (0,1),(1,2),(2,0)
    std::vector<std::array<int, 3>> tri_edge_sign;  // +1 when local dir is lo->hi
    std::vector<int> tri_region;                 // index into regions
    std::vector<RegionInfo> regions;
    std::vector<BoundaryTag> edge_boundary;
    std::vector<BoundaryTag> node_boundary;

    // adjacency (derived, built by finalize())
    std::vector<std::array<int, 2>> edge_tris;   // incident triangles, -1 if none
    std::vector<int> node_tri_ptr;               // CSR node -> incident triangles
    std::vector<int> node_tri;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }
    int n_tris() const { return static_cast<int>(tris.size()); }

    const RegionInfo& region_of(int tri) const { return regions[tri_region[tri]]; }
    bool is_conductor_resolved(int tri) const { return region_of(tri).role == RegionRole::turn; }
    bool is_bulk(int tri) const { return region_of(tri).in_bulk; }

    double signed_area(int t) const {
        const auto& tr = tris[t];
        const auto& a = nodes[tr[0]];
        const auto& b = nodes[tr[1]];
        const auto& c = nodes[tr[2]];
        return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    }

    std::array<double, 2> centroid(int t) const {
        const auto& tr = tris[t];
        return {(nodes[tr[0]][0] + nodes[tr[1]][0] + nodes[tr[2]][0]) / 3.0,
                (nodes[tr[0]][1] + nodes[tr[1]][1] + nodes[tr[2]][1]) / 3.0};
    }

    // Builds edges, adjacency and boundary tags from nodes/tris/regions.
    void finalize();
};

inline void Mesh::finalize() {
    edges.clear();
    tri_edges.assign(tris.size(), {});
    tri_edge_sign.assign(tris.size(), {});
    std::map<std::pair<int, int>, int> edge_ids;
    for (std::size_t t = 0; t < tris.size(); ++t) {
        for (int k = 0; k < 3; ++k) {
            const int a = tris[t][k];
            const int b = tris[t][(k + 1) % 3];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = edge_ids.try_emplace(key, static_cast<int>(edges.size()));
            if (inserted) edges.push_back({key.first, key.second});
            tri_edges[t][k] = it->second;
            tri_edge_sign[t][k] = (a < b) ? 1 : -1;
        }
    }

    edge_tris.assign(edges.size(), {-1, -1});
    for (std::size_t t = 0; t < tris.size(); ++t) {
        for (int k = 0; k < 3; ++k) {
            auto& inc = edge_tris[tri_edges[t][k]];
            if (inc[0] < 0) inc[0] = static_cast<int>(t);
            else if (inc[1] < 0) inc[1] = static_cast<int>(t);
            else throw std::runtime_error("mesh: edge shared by more than two triangles");
        }
    }

    // node -> triangle CSR
    node_tri_ptr.assign(nodes.size() + 1, 0);
    for (const auto& tr : tris)
        for (int n : tr) ++node_tri_ptr[n + 1];
    for (std::size_t i = 1; i < node_tri_ptr.size(); ++i) node_tri_ptr[i] += node_tri_ptr[i - 1];
    node_tri.assign(node_tri_ptr.back(), -1);
    std::vector<int> fill(nodes.size(), 0);
    for (std::size_t t = 0; t < tris.size(); ++t)
        for (int n : tris[t]) node_tri[node_tri_ptr[n] + fill[n]++] = static_cast<int>(t);

    // Boundary edges have a single incident triangle. The axis tag applies
    // to x = 0 edges of axisymmetric meshes; everything else is "outer".
    edge_boundary.assign(edges.size(), BoundaryTag::interior);
    node_boundary.assign(nodes.size(), BoundaryTag::interior);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edge_tris[e][1] >= 0) continue;
        const auto& a = nodes[edges[e][0]];
        const auto& b = nodes[edges[e][1]];
        const bool on_axis = coord == CoordinateSystem::axisymmetric &&
                             std::abs(a[0]) < 1e-14 && std::abs(b[0]) < 1e-14;
        edge_boundary[e] = on_axis ? BoundaryTag::axis : BoundaryTag::outer;
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edge_boundary[e] == BoundaryTag::interior) continue;
        for (int n : edges[e]) {
            // outer wins over axis at the corner nodes
            if (node_boundary[n] != BoundaryTag::outer)
                node_boundary[n] = edge_boundary[e];
        }
    }
}

namespace detail {

inline std::vector<double> merge_breaks(std::vector<double> v, double tol) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    return out;
}

// Subdivision counts per interval: the target size is the smallest mesh
// size among regions whose span overlaps the interval.
inline std::vector<int> interval_counts(const std::vector<double>& breaks,
                                        const std::vector<std::pair<double, double>>& spans,
                                        const std::vector<double>& sizes,
                                        double fallback, int refinement) {
    std::vector<int> counts;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = breaks[i], hi = breaks[i + 1];
        const double mid = 0.5 * (lo + hi);
        double h = fallback;
        for (std::size_t r = 0; r < spans.size(); ++r)
            if (mid > spans[r].first && mid < spans[r].second && sizes[r] > 0.0)
                h = std::min(h, sizes[r]);
        const int n = std::max(1, static_cast<int>(std::lround((hi - lo) / h)));
        counts.push_back(n * refinement);
    }
    return counts;
}

inline std::vector<double> expand_breaks(const std::vector<double>& breaks,
                                         const std::vector<int>& counts) {
    std::vector<double> x;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        for (int k = 0; k < counts[i]; ++k)
            x.push_back(breaks[i] + (breaks[i + 1] - breaks[i]) * k / counts[i]);
    }
    x.push_back(breaks.back());
    return x;
}

}  // namespace detail

// Structured tensor-product triangulation of the geometry: every region
// rectangle is resolved by grid lines, each cell is split into two CCW
// triangles. Identical inputs give bit-identical connectivity.
inline Mesh generate_structured_mesh(const GeometrySpec& geom, int refinement) {
    geom.validate();
    if (refinement < 1) throw validation_error("mesh: refinement must be >= 1");

    const auto leafs = geom.regions();
    const double tol = 1e-12 * std::max(geom.domain.width(), geom.domain.height());

    std::vector<double> xb{geom.domain.x0, geom.domain.x1};
    std::vector<double> yb{geom.domain.y0, geom.domain.y1};
    std::vector<std::pair<double, double>> xspan, yspan;
    std::vector<double> sizes_x, sizes_y;
    for (const auto& r : leafs) {
        xb.push_back(r.box.x0);
        xb.push_back(r.box.x1);
        yb.push_back(r.box.y0);
        yb.push_back(r.box.y1);
        xspan.emplace_back(r.box.x0, r.box.x1);
        yspan.emplace_back(r.box.y0, r.box.y1);
        sizes_x.push_back(r.mesh_size_x);
        sizes_y.push_back(r.mesh_size_y);
    }
    const auto xbreaks = detail::merge_breaks(std::move(xb), tol);
    const auto ybreaks = detail::merge_breaks(std::move(yb), tol);
    const auto xcounts =
        detail::interval_counts(xbreaks, xspan, sizes_x, geom.mesh_size_air, refinement);
    const auto ycounts =
        detail::interval_counts(ybreaks, yspan, sizes_y, geom.mesh_size_air, refinement);
    const auto xs = detail::expand_breaks(xbreaks, xcounts);
    const auto ys = detail::expand_breaks(ybreaks, ycounts);

    Mesh m;
    m.coord = geom.coord;
    const int nx = static_cast<int>(xs.size());
    const int ny = static_cast<int>(ys.size());
    m.nodes.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) m.nodes.push_back({xs[i], ys[j]});

    // region table: air, core (if any), then the leaf turn/gap regions
    m.regions.push_back({RegionRole::air, -1, false});
    std::vector<int> leaf_region_id;
    for (const auto& r : leafs) {
        leaf_region_id.push_back(static_cast<int>(m.regions.size()));
        m.regions.push_back({r.role, r.turn_index, r.in_bulk});
    }

    auto region_at = [&](double x, double y) {
        for (std::size_t r = 0; r < leafs.size(); ++r)
            if (leafs[r].box.contains(x, y)) return leaf_region_id[r];
        return 0;
    };

    auto node_id = [&](int i, int j) { return j * nx + i; };
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const int n00 = node_id(i, j), n10 = node_id(i + 1, j);
            const int n01 = node_id(i, j + 1), n11 = node_id(i + 1, j + 1);
            const int reg = region_at(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
            m.tris.push_back({n00, n10, n11});
            m.tri_region.push_back(reg);
            m.tris.push_back({n00, n11, n01});
            m.tri_region.push_back(reg);
        }
    }
    m.finalize();
    return m;
}

// Mesh sanity checks used by tests and by read_msh.
inline void check_mesh(const Mesh& m) {
    for (int t = 0; t < m.n_tris(); ++t)
        if (!(m.signed_area(t) > 0.0))
            throw std::runtime_error("mesh: non-positive triangle area");
    const long long euler = static_cast<long long>(m.n_nodes()) - m.n_edges() + m.n_tris();
    if (euler != 1)
        throw std::runtime_error("mesh: Euler relation V - E + F = 1 violated");
}

}  // namespace foilfem
