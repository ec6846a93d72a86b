// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "foilfem/assembly.hpp"
#include "foilfem/materials.hpp"
#include "foilfem/topology.hpp"

namespace foilfem {

enum class FormulationFamily { av, fullh, hphi };
enum class WindingModel { resolved, fw };

class capability_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Homogenized winding description: geometry of the bulk, fill factor and
// the basis for the voltage continuum Phi(alpha).
struct FoilWindingSpec {
    int n_turns = 0;
    double fill_factor = 1.0;
    AlphaMap alpha;
    VoltageBasis basis;

    void validate() const {
        if (n_turns < 1) throw validation_error("foil winding: N_c must be >= 1");
        if (!(fill_factor > 0.0 && fill_factor <= 1.0))
            throw validation_error("foil winding: fill factor must be in (0, 1]");
        if (!(alpha.thickness > 0.0)) throw validation_error("foil winding: L_alpha must be > 0");
    }
};

inline FoilWindingSpec make_fw_spec(const GeometrySpec& geom, VoltageBasis basis) {
    return FoilWindingSpec{geom.n_turns, geom.fill_factor, geom.alpha_map(), basis};
}

// The standard far field is flux parallel (b.n = 0) on the outer box for
// every family: essential a = 0 for the b-conforming side, and the natural
// condition (tangential h unconstrained, e_t = 0) for the h-conforming
// side, where the scalar potential is only gauged by pinning one node per
// non-conducting component. Both families then discretize the same
// continuum problem and their global quantities converge toward each other
// in the complementary way expected of dual formulations.
enum class FarFieldBC {
    standard,
    none  // leave the boundary unconstrained (no gauge either)
};

struct BoundarySettings {
    FarFieldBC far_field = FarFieldBC::standard;
    // Uniform background field h0 along +y (planar only): imposes
    // a = -mu0 h0 x, phi traces of h0 y, edge circulations of h0 y_hat.
    double background_h = 0.0;
};

// Entity-to-unknown mapping for one formulation. Index conventions:
// >= 0 free unknown, kFixed strongly constrained, kAbsent not a dof.
struct DofSpace {
    static constexpr int kAbsent = -1;
    static constexpr int kFixed = -2;

    FormulationFamily family = FormulationFamily::av;
    WindingModel model = WindingModel::resolved;
    int n_free = 0;

    std::vector<int> node_index;     // a (av) or phi (hphi)
    std::vector<double> node_fixed;
    std::vector<int> edge_index;     // h_e
    std::vector<double> edge_fixed;
    std::vector<CutCochain> cuts;    // hphi only
    std::vector<int> cut_index;      // free index or kFixed (value I_t)
    int voltage_first = -1;          // V_i (resolved) or u_k (fw)
    int n_voltage = 0;

    int n_edge_free = 0, n_node_free = 0, n_cut_free = 0;
    int n_cuts() const { return static_cast<int>(cuts.size()); }

    // Local edge expansions of the h-family: the circulation along a global
    // edge collects the edge unknown (conductor interior), the nodal
    // scalar-potential difference and every cut crossing the edge.
    ElementDofs edge_expansion(const Mesh& m, int tri) const {
        ElementDofs out;
        for (int k = 0; k < 3; ++k) {
            LocalDof& d = out.d[k];
            const int e = m.tri_edges[tri][k];
            if (edge_index[e] >= 0) d.add(edge_index[e], 1.0);
            else if (edge_index[e] == kFixed) d.fixed += edge_fixed[e];
            if (!node_index.empty()) {
                const int lo = m.edges[e][0], hi = m.edges[e][1];
                if (node_index[hi] >= 0) d.add(node_index[hi], 1.0);
                else if (node_index[hi] == kFixed) d.fixed += node_fixed[hi];
                if (node_index[lo] >= 0) d.add(node_index[lo], -1.0);
                else if (node_index[lo] == kFixed) d.fixed -= node_fixed[lo];
            }
            for (std::size_t c = 0; c < cuts.size(); ++c) {
                const double w = cuts[c].coeff[e];
                if (w == 0.0) continue;
                if (cut_index[c] >= 0) d.add(cut_index[c], w);
                else d.fixed_I += w;  // strongly fixed to the transport current
            }
        }
        return out;
    }

    ElementDofs nodal_expansion(const Mesh& m, int tri) const {
        ElementDofs out;
        for (int k = 0; k < 3; ++k) {
            LocalDof& d = out.d[k];
            const int n = m.tris[tri][k];
            if (node_index[n] >= 0) d.add(node_index[n], 1.0);
            else if (node_index[n] == kFixed) d.fixed += node_fixed[n];
        }
        return out;
    }

    FieldExpansion field_expansion(const Mesh& m) const {
        if (family == FormulationFamily::av)
            return [this, &m](int t) { return nodal_expansion(m, t); };
        return [this, &m](int t) { return edge_expansion(m, t); };
    }
};

namespace detail {

inline std::vector<char> conductor_flags(const Mesh& m, WindingModel model) {
    std::vector<char> f(m.n_tris(), 0);
    for (int t = 0; t < m.n_tris(); ++t)
        f[t] = model == WindingModel::resolved ? m.is_conductor_resolved(t) : m.is_bulk(t);
    return f;
}

inline std::vector<int> flagged_tris(const std::vector<char>& f, bool want) {
    std::vector<int> out;
    for (std::size_t t = 0; t < f.size(); ++t)
        if (static_cast<bool>(f[t]) == want) out.push_back(static_cast<int>(t));
    return out;
}

inline int count_turns(const Mesh& m) {
    int n = 0;
    for (const auto& r : m.regions)
        if (r.role == RegionRole::turn) n = std::max(n, r.turn_index + 1);
    return n;
}

}  // namespace detail

inline DofSpace build_dofspace(FormulationFamily family, WindingModel model, const Mesh& m,
                               const std::optional<FoilWindingSpec>& fw = {},
                               const BoundarySettings& bc = {}) {
    DofSpace d;
    d.family = family;
    d.model = model;

    const auto conductor = detail::conductor_flags(m, model);
    const int n_turns = detail::count_turns(m);
    if (model == WindingModel::resolved && n_turns == 0)
        throw validation_error("dofspace: resolved model needs turn regions");
    if (model == WindingModel::fw) {
        if (!fw) throw validation_error("dofspace: foil-winding kinds need a FoilWindingSpec");
        fw->validate();
        if (std::find(conductor.begin(), conductor.end(), 1) == conductor.end())
            throw validation_error("dofspace: mesh has no homogenized bulk region");
    }
    if (bc.background_h != 0.0 && m.coord != CoordinateSystem::planar)
        throw validation_error("dofspace: background field requires a planar mesh");

    const bool constrain = bc.far_field == FarFieldBC::standard;
    const double h0 = bc.background_h;

    auto next = [&d]() { return d.n_free++; };

    if (family == FormulationFamily::av) {
        d.node_index.assign(m.n_nodes(), DofSpace::kAbsent);
        d.node_fixed.assign(m.n_nodes(), 0.0);
        for (int n = 0; n < m.n_nodes(); ++n) {
            const bool on_outer = m.node_boundary[n] == BoundaryTag::outer;
            const bool on_axis = m.node_boundary[n] == BoundaryTag::axis;
            // the axisymmetric unknown r*a_phi must vanish on the axis
            if ((constrain && on_outer) || (m.coord == CoordinateSystem::axisymmetric && on_axis)) {
                d.node_index[n] = DofSpace::kFixed;
                d.node_fixed[n] = on_outer ? -mu0 * h0 * m.nodes[n][0] : 0.0;
            } else {
                d.node_index[n] = next();
                ++d.n_node_free;
            }
        }
    } else {
        d.edge_index.assign(m.n_edges(), DofSpace::kAbsent);
        d.edge_fixed.assign(m.n_edges(), 0.0);
        const bool full = family == FormulationFamily::fullh;
        const bool background = h0 != 0.0;
        for (int e = 0; e < m.n_edges(); ++e) {
            const auto& inc = m.edge_tris[e];
            const bool interior_conductor =
                inc[0] >= 0 && inc[1] >= 0 && conductor[inc[0]] && conductor[inc[1]];
            if (!full && !interior_conductor) continue;
            if (full && constrain && background && m.edge_boundary[e] == BoundaryTag::outer) {
                d.edge_index[e] = DofSpace::kFixed;
                d.edge_fixed[e] = h0 * (m.nodes[m.edges[e][1]][1] - m.nodes[m.edges[e][0]][1]);
            } else {
                d.edge_index[e] = next();
                ++d.n_edge_free;
            }
        }
        if (family == FormulationFamily::hphi) {
            // phi on every node seen by at least one non-conducting triangle
            d.node_index.assign(m.n_nodes(), DofSpace::kAbsent);
            d.node_fixed.assign(m.n_nodes(), 0.0);
            std::vector<char> touches_air(m.n_nodes(), 0);
            for (int t = 0; t < m.n_tris(); ++t)
                if (!conductor[t])
                    for (int n : m.tris[t]) touches_air[n] = 1;
            // gauge: pin the lowest node of every connected non-conducting
            // component (a background field pins the whole boundary trace)
            std::vector<char> pinned(m.n_nodes(), 0);
            if (constrain && background) {
                for (int n = 0; n < m.n_nodes(); ++n)
                    if (m.node_boundary[n] == BoundaryTag::outer) pinned[n] = 1;
            } else if (constrain) {
                std::vector<int> comp(m.n_tris(), -1);
                int n_comp = 0;
                for (int seed = 0; seed < m.n_tris(); ++seed) {
                    if (conductor[seed] || comp[seed] >= 0) continue;
                    std::vector<int> stack{seed};
                    comp[seed] = n_comp;
                    while (!stack.empty()) {
                        const int t = stack.back();
                        stack.pop_back();
                        for (int k = 0; k < 3; ++k) {
                            const auto& inc = m.edge_tris[m.tri_edges[t][k]];
                            const int other = inc[0] == t ? inc[1] : inc[0];
                            if (other < 0 || conductor[other] || comp[other] >= 0) continue;
                            comp[other] = n_comp;
                            stack.push_back(other);
                        }
                    }
                    ++n_comp;
                }
                std::vector<int> lowest(n_comp, m.n_nodes());
                for (int t = 0; t < m.n_tris(); ++t)
                    if (comp[t] >= 0)
                        for (int n : m.tris[t]) lowest[comp[t]] = std::min(lowest[comp[t]], n);
                for (int c = 0; c < n_comp; ++c) pinned[lowest[c]] = 1;
            }
            for (int n = 0; n < m.n_nodes(); ++n) {
                if (!touches_air[n]) continue;
                if (pinned[n]) {
                    d.node_index[n] = DofSpace::kFixed;
                    // h carries + grad of the nodal coefficients, so a
                    // background h0 y_hat needs the trace +h0 y
                    d.node_fixed[n] = background ? h0 * m.nodes[n][1] : 0.0;
                } else {
                    d.node_index[n] = next();
                    ++d.n_node_free;
                }
            }
            // cuts: one per turn (resolved, strongly fixed) or a single free
            // cut for the homogenized bulk
            if (model == WindingModel::resolved) {
                // touching turns would leave free interface edges on the turn
                // boundaries and the strong per-turn current would not hold
                for (int e = 0; e < m.n_edges(); ++e) {
                    const auto& inc = m.edge_tris[e];
                    if (inc[0] < 0 || inc[1] < 0) continue;
                    const auto& ra = m.region_of(inc[0]);
                    const auto& rb = m.region_of(inc[1]);
                    if (ra.role == RegionRole::turn && rb.role == RegionRole::turn &&
                        ra.turn_index != rb.turn_index)
                        throw capability_error(
                            "dofspace: resolved h-phi needs insulation between turns "
                            "(fill factor < 1)");
                }
                for (int i = 0; i < n_turns; ++i) {
                    std::vector<char> enc(m.n_tris(), 0), forb(m.n_tris(), 0);
                    for (int t = 0; t < m.n_tris(); ++t) {
                        const auto& r = m.region_of(t);
                        if (r.role != RegionRole::turn) continue;
                        (r.turn_index == i ? enc : forb)[t] = 1;
                    }
                    // a conductor touching the domain boundary is not
                    // encircled by any air loop: no cut exists and its net
                    // current follows from the boundary conditions
                    bool on_boundary = false;
                    for (int t = 0; t < m.n_tris() && !on_boundary; ++t)
                        if (enc[t])
                            for (int n : m.tris[t])
                                if (m.node_boundary[n] == BoundaryTag::outer) on_boundary = true;
                    if (on_boundary) continue;
                    d.cuts.push_back(build_cut(m, enc, forb));
                    d.cut_index.push_back(DofSpace::kFixed);
                }
            } else {
                d.cuts.push_back(build_cut(m, conductor));
                d.cut_index.push_back(next());
                ++d.n_cut_free;
            }
        }
    }

    // per-turn voltages (a-v and full-h resolved) or voltage coefficients u_k
    if (model == WindingModel::fw) {
        d.n_voltage = fw->basis.n;
    } else if (family != FormulationFamily::hphi) {
        d.n_voltage = n_turns;  // h-phi resolved recovers voltages from reactions
    }
    if (d.n_voltage > 0) {
        d.voltage_first = d.n_free;
        d.n_free += d.n_voltage;
    }
    return d;
}

}  // namespace foilfem
