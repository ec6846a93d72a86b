// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "foilfem/solvers.hpp"

namespace foilfem {

// Voltage distribution along the stacking direction: the continuum
// Phi(alpha) of a homogenized solve, or the per-turn staircase of a
// resolved solve. Values carry the physical sign (positive resistive drop
// for positive transport current).
struct VoltageDistribution {
    bool continuum = false;
    int n_turns = 0;
    VoltageBasis basis;
    Eigen::VectorXcd coeff;     // continuum coefficients u_k
    Eigen::VectorXcd per_turn;  // resolved values

    cplx eval(double a) const {
        if (continuum) {
            cplx v = 0.0;
            for (int k = 0; k < coeff.size(); ++k) v += coeff[k] * basis.eval(k, a);
            return v;
        }
        const int i = std::clamp(static_cast<int>(a * n_turns), 0, n_turns - 1);
        return per_turn[i];
    }

    // full-turn voltage of (virtual) turn i as a strip average:
    // N_c * integral of Phi over the strip
    cplx strip_average(int i) const {
        if (!continuum) return per_turn[i];
        const double a0 = static_cast<double>(i) / n_turns;
        const double a1 = static_cast<double>(i + 1) / n_turns;
        cplx v = 0.0;
        for (int k = 0; k < coeff.size(); ++k)
            v += coeff[k] * basis.integral(k, a0, a1) * static_cast<double>(n_turns);
        return v;
    }

    cplx center_sample(int i) const { return eval((i + 0.5) / n_turns); }

    // V_tot: the strip averages partition this sum exactly
    cplx total() const {
        cplx v = 0.0;
        for (int i = 0; i < n_turns; ++i) v += strip_average(i);
        return v;
    }

    std::vector<double> breakpoints() const {
        std::vector<double> b{0.0, 1.0};
        if (!continuum)
            for (int i = 1; i < n_turns; ++i) b.push_back(static_cast<double>(i) / n_turns);
        else if (basis.kind == VoltageBasisKind::piecewise_linear)
            for (int i = 1; i + 1 < basis.n; ++i)
                b.push_back(static_cast<double>(i) / (basis.n - 1));
        std::sort(b.begin(), b.end());
        return b;
    }

    int degree() const { return continuum ? basis.degree() : 0; }
};

// Physical voltages from a harmonic solution. Internal unknowns of the
// weak current imposition carry the opposite sign; the reaction of a
// strongly fixed cut is the turn voltage directly.
inline VoltageDistribution turn_voltages(const Solution& sol) {
    if (!sol.is_harmonic())
        throw std::invalid_argument("turn_voltages: harmonic solutions only");
    VoltageDistribution d;
    if (sol.model == WindingModel::fw) {
        d.continuum = true;
        d.n_turns = sol.fw->n_turns;
        d.basis = sol.fw->basis;
        d.coeff.resize(sol.dofs.n_voltage);
        for (int k = 0; k < sol.dofs.n_voltage; ++k)
            d.coeff[k] = -sol.x[sol.dofs.voltage_first + k];
    } else if (sol.family == FormulationFamily::hphi) {
        d.n_turns = sol.dofs.n_cuts();
        if (sol.reactions.size() != d.n_turns)
            throw std::invalid_argument("turn_voltages: missing cut reactions");
        d.per_turn = sol.reactions;
    } else {
        d.n_turns = sol.dofs.n_voltage;
        d.per_turn.resize(d.n_turns);
        for (int i = 0; i < d.n_turns; ++i)
            d.per_turn[i] = -sol.x[sol.dofs.voltage_first + i];
    }
    return d;
}

struct LumpedParams {
    cplx v_tot;
    double r_tot = 0.0;
    double l_tot = 0.0;
    double frequency = 0.0;
    int dof_count = 0;
};

inline LumpedParams lumped_params(const Solution& sol) {
    if (!(sol.excitation.frequency > 0.0))
        throw std::invalid_argument("lumped_params: need f > 0");
    const auto dist = turn_voltages(sol);
    LumpedParams p;
    p.v_tot = dist.total();
    p.frequency = sol.excitation.frequency;
    p.dof_count = sol.dofs.n_free;
    const cplx z = p.v_tot / sol.excitation.current;
    p.r_tot = z.real();
    p.l_tot = z.imag() / (2.0 * pi * p.frequency);
    return p;
}

// Coefficient of determination between two voltage distributions on [0,1],
// with the first argument as the reference. Gauss quadrature exact for the
// basis degrees involved.
inline double r_squared(const VoltageDistribution& ref, const VoltageDistribution& other) {
    std::vector<double> brk = ref.breakpoints();
    for (double b : other.breakpoints()) brk.push_back(b);
    std::sort(brk.begin(), brk.end());
    brk.erase(std::unique(brk.begin(), brk.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-14; }),
              brk.end());
    const int deg = std::max(ref.degree(), other.degree());
    const auto gauss = gauss_legendre_01(std::min(5, deg + 1));

    cplx mean = 0.0;
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
        const double len = brk[i + 1] - brk[i];
        for (const auto& [x, w] : gauss) mean += w * len * ref.eval(brk[i] + x * len);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
        const double len = brk[i + 1] - brk[i];
        for (const auto& [x, w] : gauss) {
            const double a = brk[i] + x * len;
            num += w * len * std::norm(ref.eval(a) - other.eval(a));
            den += w * len * std::norm(ref.eval(a) - mean);
        }
    }
    const double scale = std::max(std::norm(mean), num);
    if (den <= 1e-28 * std::max(scale, 1e-300))
        throw std::invalid_argument("r_squared: reference distribution is constant");
    return 1.0 - num / den;
}

namespace detail {

inline double measure_volume(const Mesh& m, int t) {
    if (m.coord != CoordinateSystem::axisymmetric) return m.signed_area(t);
    const auto c = m.centroid(t);
    return 2.0 * pi * c[0] * m.signed_area(t);
}

// local edge circulation coefficients of an h-family solution on one element
template <class Vector>
inline std::array<typename Vector::Scalar, 3> edge_coeffs(const Mesh& m, const DofSpace& dofs,
                                                          const Vector& x, double It, int t) {
    using S = typename Vector::Scalar;
    const ElementDofs d = dofs.edge_expansion(m, t);
    std::array<S, 3> c;
    for (int k = 0; k < 3; ++k) {
        S v = S(d.d[k].fixed) + S(d.d[k].fixed_I * It);
        for (int i = 0; i < d.d[k].n; ++i) v += S(d.d[k].w[i]) * x[d.d[k].idx[i]];
        c[k] = v;
    }
    return c;
}

// out-of-plane current density, constant per element, h-family
template <class Vector>
inline typename Vector::Scalar element_j(const Mesh& m, const DofSpace& dofs, const Vector& x,
                                         double It, int t) {
    const auto c = edge_coeffs(m, dofs, x, It, t);
    const ElementGeometry geo(m, t);
    const auto s = geo.eval(1.0 / 3.0, 1.0 / 3.0);
    typename Vector::Scalar j{};
    for (int k = 0; k < 3; ++k) j += c[k] * (s.curl[k] * m.tri_edge_sign[t][k]);
    return j;
}

inline double conductor_sigma(const Solution& sol, const MaterialField& mats) {
    return sol.model == WindingModel::fw
               ? effective_material(mats.foil, sol.fw->fill_factor).sigma
               : mats.foil.sigma;
}

}  // namespace detail

// Helpers shared by the sampling and loss routines. The a-v current density
// needs the material field (sigma); h-family values come from curl h alone.
struct CurrentEvaluator {
    const Mesh& mesh;
    const Solution& sol;
    const MaterialField& mats;
    std::vector<char> conductor;

    CurrentEvaluator(const Mesh& m, const Solution& s, const MaterialField& mt)
        : mesh(m), sol(s), mats(mt), conductor(detail::conductor_flags(m, s.model)) {}

    bool is_conducting(int t) const { return conductor[t]; }

    // harmonic phasor amplitude of j at a point of triangle t
    cplx harmonic(int t, const Vec2& p) const {
        if (!conductor[t]) return 0.0;
        if (sol.family != FormulationFamily::av)
            return detail::element_j(mesh, sol.dofs, sol.x, sol.excitation.current, t);
        const cplx jw(0.0, sol.excitation.omega());
        auto a_at = [&](int tri, const Vec2& q) -> cplx {
            const ElementGeometry geo(mesh, tri);
            const auto l = geo.barycentric(q);
            cplx v = 0.0;
            for (int k = 0; k < 3; ++k) {
                const int node = mesh.tris[tri][k];
                if (sol.dofs.node_index[node] >= 0)
                    v += l[k] * sol.x[sol.dofs.node_index[node]];
                else if (sol.dofs.node_index[node] == DofSpace::kFixed)
                    v += l[k] * sol.dofs.node_fixed[node];
            }
            return v;
        };
        const cplx v_int = voltage_internal(t, p);
        const bool axi = mesh.coord == CoordinateSystem::axisymmetric;
        const double s = axi ? 1.0 / (2.0 * pi * p[0]) : 1.0;
        const double rinv = axi ? 1.0 / p[0] : 1.0;
        const cplx e = -(jw * a_at(t, p) * rinv + v_int * s);
        return detail::conductor_sigma(sol, mats) * e;
    }

    // transient j at step k (backward difference for the a-v eddy term)
    double transient(int t, const Vec2& p, int step) const {
        if (!conductor[t]) return 0.0;
        if (sol.family != FormulationFamily::av)
            return detail::element_j(mesh, sol.dofs, sol.states[step],
                                     sol.excitation.I(sol.times[step]), t);
        if (step == 0) return 0.0;
        const double dt = sol.times[step] - sol.times[step - 1];
        auto a_at = [&](const Eigen::VectorXd& x, const Vec2& q) {
            const ElementGeometry geo(mesh, t);
            const auto l = geo.barycentric(q);
            double v = 0.0;
            for (int k = 0; k < 3; ++k) {
                const int node = mesh.tris[t][k];
                if (sol.dofs.node_index[node] >= 0) v += l[k] * x[sol.dofs.node_index[node]];
                else if (sol.dofs.node_index[node] == DofSpace::kFixed)
                    v += l[k] * sol.dofs.node_fixed[node];
            }
            return v;
        };
        const double dadt = (a_at(sol.states[step], p) - a_at(sol.states[step - 1], p)) / dt;
        double v_int = 0.0;
        {
            const auto& x = sol.states[step];
            if (sol.model == WindingModel::fw) {
                const double a = sol.fw->alpha(p[0], p[1]);
                for (int k = 0; k < sol.dofs.n_voltage; ++k)
                    v_int += x[sol.dofs.voltage_first + k] * sol.fw->basis.eval(k, a);
            } else {
                v_int = x[sol.dofs.voltage_first + mesh.region_of(t).turn_index];
            }
        }
        const bool axi = mesh.coord == CoordinateSystem::axisymmetric;
        const double s = axi ? 1.0 / (2.0 * pi * p[0]) : 1.0;
        const double rinv = axi ? 1.0 / p[0] : 1.0;
        const double e = -(dadt * rinv + v_int * s);
        return detail::conductor_sigma(sol, mats) * e;
    }

    // resistivity seen by the loss integral at current density magnitude
    double rho_at(int t, double jmag) const {
        if (!conductor[t]) return 0.0;
        const Material m = sol.model == WindingModel::fw
                               ? effective_material(mats.foil, sol.fw->fill_factor)
                               : mats.foil;
        if (m.hts) return hts_resistivity(jmag, *m.hts).rho;
        return m.rho();
    }

private:
    cplx voltage_internal(int t, const Vec2& p) const {
        if (sol.dofs.n_voltage > 0) {
            if (sol.model == WindingModel::fw) {
                const double a = sol.fw->alpha(p[0], p[1]);
                cplx v = 0.0;
                for (int k = 0; k < sol.dofs.n_voltage; ++k)
                    v += sol.x[sol.dofs.voltage_first + k] * sol.fw->basis.eval(k, a);
                return v;
            }
            return sol.x[sol.dofs.voltage_first + mesh.region_of(t).turn_index];
        }
        throw std::invalid_argument("current density: formulation without voltage unknowns");
    }
};

// Ohmic power: average over one cycle for harmonic phasors, or the full
// series P(t) plus the average over the final period for transients.
struct LossResult {
    std::vector<double> time;
    std::vector<double> power;      // W (axisymmetric) or W/m (planar)
    double cycle_average = 0.0;
};

inline LossResult ac_losses(const Mesh& mesh, const Solution& sol, const MaterialField& mats) {
    CurrentEvaluator ev(mesh, sol, mats);
    LossResult out;
    if (sol.is_harmonic()) {
        double p = 0.0;
        for (int t = 0; t < mesh.n_tris(); ++t) {
            if (!ev.is_conducting(t)) continue;
            const auto c = mesh.centroid(t);
            const cplx j = ev.harmonic(t, {c[0], c[1]});
            p += 0.5 * ev.rho_at(t, std::abs(j)) * std::norm(j) * detail::measure_volume(mesh, t);
        }
        out.cycle_average = p;
        return out;
    }
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
        double p = 0.0;
        for (int t = 0; t < mesh.n_tris(); ++t) {
            if (!ev.is_conducting(t)) continue;
            const auto c = mesh.centroid(t);
            const double j = ev.transient(t, {c[0], c[1]}, static_cast<int>(k));
            p += ev.rho_at(t, std::abs(j)) * j * j * detail::measure_volume(mesh, t);
        }
        out.time.push_back(sol.times[k]);
        out.power.push_back(p);
    }
    // average over the last full period of the drive
    const double T = 1.0 / sol.excitation.frequency;
    const double t_end = sol.times.back();
    double sum = 0.0, span = 0.0;
    for (std::size_t k = 1; k < sol.times.size(); ++k) {
        if (sol.times[k] <= t_end - T) continue;
        const double dt = sol.times[k] - sol.times[k - 1];
        sum += 0.5 * (out.power[k] + out.power[k - 1]) * dt;
        span += dt;
    }
    out.cycle_average = span > 0.0 ? sum / span : 0.0;
    return out;
}

struct LineSample {
    Vec2 point;
    int tri = -1;
    double j_abs = 0.0;
    double j_phase = 0.0;
};

inline int locate_triangle(const Mesh& mesh, const Vec2& p) {
    for (int t = 0; t < mesh.n_tris(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto l = geo.barycentric(p);
        const double tol = 1e-12;
        if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) return t;
    }
    return -1;
}

// |j| (and phase in harmonic mode) along a polyline, sampled at n_samples
// points per segment. h-conforming solutions give per-element constants.
inline std::vector<LineSample> sample_current_density(const Mesh& mesh, const Solution& sol,
                                                      const MaterialField& mats,
                                                      const std::vector<Vec2>& polyline,
                                                      int n_samples_per_segment = 16) {
    if (polyline.size() < 2)
        throw std::invalid_argument("sample_current_density: need a polyline");
    CurrentEvaluator ev(mesh, sol, mats);
    std::vector<LineSample> out;
    for (std::size_t s = 0; s + 1 < polyline.size(); ++s) {
        for (int k = 0; k <= n_samples_per_segment; ++k) {
            if (s > 0 && k == 0) continue;  // avoid duplicating interior knots
            const double u = static_cast<double>(k) / n_samples_per_segment;
            const Vec2 p{polyline[s][0] + u * (polyline[s + 1][0] - polyline[s][0]),
                         polyline[s][1] + u * (polyline[s + 1][1] - polyline[s][1])};
            const int t = locate_triangle(mesh, p);
            if (t < 0)
                throw std::invalid_argument("sample_current_density: point outside mesh");
            LineSample ls;
            ls.point = p;
            ls.tri = t;
            if (sol.is_harmonic()) {
                const cplx j = ev.harmonic(t, p);
                ls.j_abs = std::abs(j);
                ls.j_phase = std::arg(j);
            } else {
                const double j = ev.transient(t, p, static_cast<int>(sol.times.size()) - 1);
                ls.j_abs = std::abs(j);
                ls.j_phase = j < 0.0 ? pi : 0.0;
            }
            out.push_back(ls);
        }
    }
    return out;
}

// Whitney interpolation of the magnetic field at a point (h-family).
inline std::array<cplx, 2> sample_field_h(const Mesh& mesh, const Solution& sol, const Vec2& p) {
    if (sol.family == FormulationFamily::av || !sol.is_harmonic())
        throw std::invalid_argument("sample_field_h: harmonic h-conforming solutions only");
    const int t = locate_triangle(mesh, p);
    if (t < 0) throw std::invalid_argument("sample_field_h: point outside mesh");
    const auto c = detail::edge_coeffs(mesh, sol.dofs, sol.x, sol.excitation.current, t);
    const ElementGeometry geo(mesh, t);
    const auto l = geo.barycentric(p);
    const auto s = geo.eval(l[1], l[2]);
    std::array<cplx, 2> h{0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        const double sign = mesh.tri_edge_sign[t][k];
        h[0] += c[k] * sign * s.edge[k][0];
        h[1] += c[k] * sign * s.edge[k][1];
    }
    return h;
}

namespace detail {

// area of a triangle clipped to the vertical band x in [x0, x1]
inline double clipped_area(const std::array<Vec2, 3>& tri, double x0, double x1) {
    std::vector<Vec2> poly(tri.begin(), tri.end());
    auto clip = [&](double x, bool keep_right) {
        std::vector<Vec2> out;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = poly[i];
            const Vec2& b = poly[(i + 1) % n];
            const bool ia = keep_right ? a[0] >= x : a[0] <= x;
            const bool ib = keep_right ? b[0] >= x : b[0] <= x;
            if (ia) out.push_back(a);
            if (ia != ib) {
                const double t = (x - a[0]) / (b[0] - a[0]);
                out.push_back({x, a[1] + t * (b[1] - a[1])});
            }
        }
        poly = std::move(out);
    };
    clip(x0, true);
    if (poly.empty()) return 0.0;
    clip(x1, false);
    if (poly.size() < 3) return 0.0;
    double area = 0.0;
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
        area += 0.5 * std::abs(cross({poly[i][0] - poly[0][0], poly[i][1] - poly[0][1]},
                                     {poly[i + 1][0] - poly[0][0], poly[i + 1][1] - poly[0][1]}));
    return area;
}

}  // namespace detail

// engineering current through each of the N_c equal-alpha strips of the
// bulk (meridian-plane current, so the target value is I_t per strip).
// Elements straddling a strip boundary are split exactly: j is constant per
// element for h-conforming solutions.
inline std::vector<cplx> strip_currents(const Mesh& mesh, const Solution& sol,
                                        const MaterialField& mats) {
    if (!sol.fw) throw std::invalid_argument("strip_currents: homogenized solutions only");
    CurrentEvaluator ev(mesh, sol, mats);
    const int n = sol.fw->n_turns;
    const Rect& bulk = sol.fw->alpha.bulk;
    const double pitch = bulk.width() / n;
    std::vector<cplx> strip(n, 0.0);
    for (int t = 0; t < mesh.n_tris(); ++t) {
        if (!mesh.is_bulk(t)) continue;
        const auto c = mesh.centroid(t);
        const cplx j = sol.is_harmonic()
                           ? ev.harmonic(t, {c[0], c[1]})
                           : cplx(ev.transient(t, {c[0], c[1]},
                                               static_cast<int>(sol.times.size()) - 1));
        if (j == cplx(0.0)) continue;
        const std::array<Vec2, 3> tri{mesh.nodes[mesh.tris[t][0]], mesh.nodes[mesh.tris[t][1]],
                                      mesh.nodes[mesh.tris[t][2]]};
        double xmin = tri[0][0], xmax = tri[0][0];
        for (const auto& p : tri) {
            xmin = std::min(xmin, p[0]);
            xmax = std::max(xmax, p[0]);
        }
        const int i0 = std::clamp(static_cast<int>((xmin - bulk.x0) / pitch), 0, n - 1);
        const int i1 = std::clamp(static_cast<int>((xmax - bulk.x0) / pitch), 0, n - 1);
        for (int i = i0; i <= i1; ++i)
            strip[i] += j * detail::clipped_area(tri, bulk.x0 + i * pitch,
                                                 bulk.x0 + (i + 1) * pitch);
    }
    return strip;
}

// magnetic energy of an h-family state: 1/2 integral of mu |h|^2
inline double magnetic_energy(const Mesh& mesh, const Solution& sol, const MaterialField& mats,
                              int step) {
    if (sol.family == FormulationFamily::av)
        throw std::invalid_argument("magnetic_energy: h-conforming solutions only");
    const auto quad = quadrature(2);
    const bool axi = mesh.coord == CoordinateSystem::axisymmetric;
    double w = 0.0;
    for (int t = 0; t < mesh.n_tris(); ++t) {
        const auto c = detail::edge_coeffs(mesh, sol.dofs, sol.states[step],
                                           sol.excitation.I(sol.times[step]), t);
        const ElementGeometry geo(mesh, t);
        const double mu = mats.of(mesh.region_of(t).role).mu;
        for (const auto& q : quad.points) {
            const auto s = geo.eval(q.xi, q.eta);
            const Vec2 x = geo.map(q.xi, q.eta);
            double hx = 0.0, hy = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double sign = mesh.tri_edge_sign[t][k];
                hx += c[k] * sign * s.edge[k][0];
                hy += c[k] * sign * s.edge[k][1];
            }
            const double meas = 2.0 * geo.area * q.w * (axi ? 2.0 * pi * x[0] : 1.0);
            w += 0.5 * mu * (hx * hx + hy * hy) * meas;
        }
    }
    return w;
}

// V_tot(t) of a transient homogenized solution (physical sign)
inline double total_voltage_transient(const Solution& sol, int step) {
    if (sol.model != WindingModel::fw)
        throw std::invalid_argument("total_voltage_transient: homogenized solutions only");
    const auto& x = sol.states[step];
    double v = 0.0;
    for (int k = 0; k < sol.dofs.n_voltage; ++k)
        v += -x[sol.dofs.voltage_first + k] * sol.fw->n_turns *
             sol.fw->basis.integral(k, 0.0, 1.0);
    return v;
}

}  // namespace foilfem
