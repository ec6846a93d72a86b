// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "foilfem/mesh.hpp"
#include "foilfem/quadrature.hpp"

namespace foilfem {

// Cohomology cut: an edge cochain, curl-free outside the enclosed region,
// whose circulation along any loop equals the loop's winding number around
// that region. Built from a seam (node path from the region boundary to the
// outer boundary) with +/-1 coefficients on edges leaving the seam's left
// bank.
struct CutCochain {
    std::vector<double> coeff;        // per edge, for the stored lo->hi direction
    std::vector<int> support;         // edges with nonzero coefficient
    std::vector<int> seam;            // node path, region boundary -> outer boundary
    std::vector<char> enclosed_tri;   // the region this cut links

    double circulation(const Mesh& m, const std::vector<int>& node_loop) const {
        double c = 0.0;
        for (std::size_t k = 0; k + 1 < node_loop.size(); ++k) {
            const int a = node_loop[k], b = node_loop[k + 1];
            // stored orientation is lo -> hi
            c += (a < b ? 1.0 : -1.0) * coeff_between(m, a, b);
        }
        return c;
    }

    double curl_sum(const Mesh& m, int tri) const {
        double s = 0.0;
        for (int k = 0; k < 3; ++k)
            s += m.tri_edge_sign[tri][k] * coeff[m.tri_edges[tri][k]];
        return s;
    }

private:
    double coeff_between(const Mesh& m, int a, int b) const {
        const auto key = std::minmax(a, b);
        // linear scan over the support is fine: loops are short
        for (int e : support)
            if (m.edges[e][0] == key.first && m.edges[e][1] == key.second) return coeff[e];
        return 0.0;
    }
};

namespace detail {

// triangle left of the directed edge a->b (CCW triangles keep their
// interior on the left), -1 if none
inline int tri_left_of(const Mesh& m, int a, int b) {
    for (int t = m.node_tri_ptr[a]; t < m.node_tri_ptr[a + 1]; ++t) {
        const int tri = m.node_tri[t];
        for (int k = 0; k < 3; ++k)
            if (m.tris[tri][k] == a && m.tris[tri][(k + 1) % 3] == b) return tri;
    }
    return -1;
}

inline int edge_between(const Mesh& m, int a, int b) {
    const auto key = std::minmax(a, b);
    const int tl = tri_left_of(m, a, b);
    const int tr = tl >= 0 ? tl : tri_left_of(m, b, a);
    if (tr < 0) return -1;
    for (int k = 0; k < 3; ++k) {
        const int e = m.tri_edges[tr][k];
        if (m.edges[e][0] == key.first && m.edges[e][1] == key.second) return e;
    }
    return -1;
}

}  // namespace detail

// Builds the cut linking `enclosed` (per-triangle flags). The seam avoids
// triangles marked `forbidden` (e.g. the other conductors of a resolved
// model). Seam: shortest node path by BFS, ties resolved by lowest node
// index, from the enclosed-region boundary to the domain boundary. In
// axisymmetric meshes the seam terminates on the symmetry axis when
// reachable: there the tangential field is unconstrained, so the seam
// crossing carries the return circulation without fighting the phi = 0
// far-field condition, and relocating the seam leaves the solution
// unchanged to solver precision.
inline CutCochain build_cut(const Mesh& m, const std::vector<char>& enclosed,
                            const std::vector<char>& forbidden = {}) {
    const int nn = m.n_nodes();
    std::vector<char> touch_enc(nn, 0), touch_forb(nn, 0), touch_free(nn, 0);
    for (int t = 0; t < m.n_tris(); ++t) {
        const bool enc = enclosed[t];
        const bool forb = !forbidden.empty() && forbidden[t];
        for (int n : m.tris[t]) {
            if (enc) touch_enc[n] = 1;
            else if (forb) touch_forb[n] = 1;
            else touch_free[n] = 1;
        }
    }

    // node adjacency, neighbors ascending
    std::vector<std::vector<int>> adj(nn);
    for (const auto& e : m.edges) {
        adj[e[0]].push_back(e[1]);
        adj[e[1]].push_back(e[0]);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    // BFS from the enclosed boundary over nodes clear of all conductors
    std::vector<int> dist(nn, -1), parent(nn, -1);
    std::deque<int> queue;
    for (int n = 0; n < nn; ++n) {
        if (touch_enc[n] && touch_free[n]) {
            if (m.node_boundary[n] == BoundaryTag::outer)
                throw std::runtime_error("build_cut: enclosed region touches the outer boundary");
            dist[n] = 0;
            queue.push_back(n);
        }
    }
    if (queue.empty()) throw std::runtime_error("build_cut: enclosed region not found");
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adj[u]) {
            if (dist[v] >= 0 || touch_enc[v] || touch_forb[v]) continue;
            dist[v] = dist[u] + 1;
            parent[v] = u;
            queue.push_back(v);
        }
    }
    int goal = -1;
    for (auto target : {BoundaryTag::axis, BoundaryTag::outer}) {
        for (int n = 0; n < nn; ++n) {
            if (m.node_boundary[n] != target || dist[n] < 0) continue;
            if (goal < 0 || dist[n] < dist[goal]) goal = n;  // ascending n breaks ties
        }
        if (goal >= 0) break;
    }
    if (goal < 0) throw std::runtime_error("build_cut: no path to the outer boundary");

    std::vector<int> seam;
    for (int n = goal; n >= 0; n = parent[n]) seam.push_back(n);
    std::reverse(seam.begin(), seam.end());  // seam[0] on region boundary

    std::vector<int> seam_pos(nn, -1);
    for (std::size_t k = 0; k < seam.size(); ++k) seam_pos[seam[k]] = static_cast<int>(k);

    // left bank per seam node: flood the triangle fan around the node,
    // blocked by the slit edges, the enclosed region and the mesh boundary
    std::vector<std::unordered_set<int>> left(seam.size());
    const int last = static_cast<int>(seam.size()) - 1;
    for (int k = 0; k <= last; ++k) {
        const int u = seam[k];
        std::vector<int> blocked;
        if (k > 0) blocked.push_back(detail::edge_between(m, u, seam[k - 1]));
        if (k < last) blocked.push_back(detail::edge_between(m, u, seam[k + 1]));
        const int seed = k < last ? detail::tri_left_of(m, u, seam[k + 1])
                                  : detail::tri_left_of(m, seam[k - 1], u);
        if (seed < 0 || enclosed[seed])
            throw std::runtime_error("build_cut: degenerate seam fan");
        std::vector<int> stack{seed};
        std::unordered_set<int> fan{seed};
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            for (int e = 0; e < 3; ++e) {
                const int eid = m.tri_edges[t][e];
                if (m.edges[eid][0] != u && m.edges[eid][1] != u) continue;
                if (std::find(blocked.begin(), blocked.end(), eid) != blocked.end()) continue;
                const auto& inc = m.edge_tris[eid];
                const int other = inc[0] == t ? inc[1] : inc[0];
                if (other < 0 || enclosed[other] || fan.count(other)) continue;
                fan.insert(other);
                stack.push_back(other);
            }
        }
        for (int t : fan)
            for (int n : m.tris[t])
                if (n != u && seam_pos[n] < 0) left[k].insert(n);
    }

    CutCochain cut;
    cut.coeff.assign(m.n_edges(), 0.0);
    cut.seam = seam;
    cut.enclosed_tri.assign(enclosed.begin(), enclosed.end());
    for (int e = 0; e < m.n_edges(); ++e) {
        const int lo = m.edges[e][0], hi = m.edges[e][1];
        const int plo = seam_pos[lo], phi = seam_pos[hi];
        if ((plo >= 0) == (phi >= 0)) continue;  // both or neither on seam
        double c = 0.0;
        if (plo >= 0) c = left[plo].count(hi) ? -1.0 : 0.0;   // leaving the left bank
        else c = left[phi].count(lo) ? 1.0 : 0.0;             // entering it
        if (c != 0.0) cut.coeff[e] = c;
    }

    // normalize so the circulation around the enclosed region (CCW) is +1
    double circ = 0.0;
    for (int t = 0; t < m.n_tris(); ++t) {
        if (!enclosed[t]) continue;
        for (int k = 0; k < 3; ++k) {
            const int eid = m.tri_edges[t][k];
            const auto& inc = m.edge_tris[eid];
            const int other = inc[0] == t ? inc[1] : inc[0];
            if (other >= 0 && enclosed[other]) continue;
            circ += m.tri_edge_sign[t][k] * cut.coeff[eid];
        }
    }
    if (std::abs(std::abs(circ) - 1.0) > 1e-12)
        throw std::runtime_error("build_cut: seam construction failed (circulation != 1)");
    if (circ < 0.0)
        for (auto& c : cut.coeff) c = -c;
    for (int e = 0; e < m.n_edges(); ++e)
        if (cut.coeff[e] != 0.0) cut.support.push_back(e);
    return cut;
}

// Per-turn source field grad(v_s): the unit out-of-plane direction in
// planar mode, phi_hat/(2 pi r) in axisymmetric mode, zero outside the
// turn. Its line integral along one full current path equals 1.
struct WindingFunction {
    CoordinateSystem coord = CoordinateSystem::planar;
    std::vector<char> tri_in_turn;

    // out-of-plane magnitude at a point of a triangle inside the turn
    double scalar(const Vec2& p) const {
        if (coord == CoordinateSystem::planar) return 1.0;
        return 1.0 / (2.0 * pi * p[0]);
    }
    double scalar_or_zero(int tri, const Vec2& p) const {
        return tri_in_turn[tri] ? scalar(p) : 0.0;
    }
};

inline WindingFunction build_winding_function(const Mesh& m, int turn_index) {
    WindingFunction w;
    w.coord = m.coord;
    w.tri_in_turn.assign(m.n_tris(), 0);
    bool found = false;
    for (int t = 0; t < m.n_tris(); ++t) {
        const auto& r = m.region_of(t);
        if (r.role == RegionRole::turn && r.turn_index == turn_index) {
            w.tri_in_turn[t] = 1;
            found = true;
        }
    }
    if (!found)
        throw std::invalid_argument("build_winding_function: unknown turn region " +
                                    std::to_string(turn_index));
    return w;
}

enum class VoltageBasisKind { polynomial, piecewise_linear };

// Basis for the voltage continuum Phi(alpha) on the normalized interval
// [0, 1]: shifted Legendre polynomials (orthogonal, span the same space as
// monomials) or hat functions on a uniform partition (partition of unity).
struct VoltageBasis {
    VoltageBasisKind kind = VoltageBasisKind::polynomial;
    int n = 1;  // N_b

    int degree() const { return kind == VoltageBasisKind::polynomial ? n - 1 : 1; }

    double eval(int k, double a) const {
        if (k < 0 || k >= n) throw std::out_of_range("voltage basis index");
        if (kind == VoltageBasisKind::polynomial) {
            // shifted Legendre via the recurrence on x = 2a - 1
            const double x = 2.0 * a - 1.0;
            double pm = 1.0, p = x;
            if (k == 0) return 1.0;
            for (int i = 1; i < k; ++i) {
                const double pn = ((2 * i + 1) * x * p - i * pm) / (i + 1);
                pm = p;
                p = pn;
            }
            return p;
        }
        if (n == 1) return 1.0;
        const double h = 1.0 / (n - 1);
        const double t = (a - k * h) / h;
        return std::max(0.0, 1.0 - std::abs(t));
    }

    // exact integral of p_k over [a0, a1] in [0, 1]
    double integral(int k, double a0, double a1) const {
        std::vector<double> breaks{a0, a1};
        if (kind == VoltageBasisKind::piecewise_linear && n > 1) {
            const double h = 1.0 / (n - 1);
            for (int i = 0; i < n; ++i) {
                const double x = i * h;
                if (x > a0 && x < a1) breaks.push_back(x);
            }
            std::sort(breaks.begin(), breaks.end());
        }
        const int npts = std::min(5, std::max(1, (degree() + 2) / 2 + 1));
        const auto gauss = gauss_legendre_01(npts);
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
            const double len = breaks[i + 1] - breaks[i];
            for (const auto& [x, w] : gauss) s += w * len * eval(k, breaks[i] + x * len);
        }
        return s;
    }
};

inline VoltageBasis build_voltage_basis(VoltageBasisKind kind, int n_b) {
    if (n_b < 1) throw std::invalid_argument("voltage basis: N_b must be >= 1");
    return VoltageBasis{kind, n_b};
}

}  // namespace foilfem
