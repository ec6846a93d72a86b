// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>

#include "foilfem/dof.hpp"

namespace foilfem {

using cplx = std::complex<double>;

enum class ExcitationMode { harmonic, transient };

// Transport-current excitation. Harmonic mode interprets `current` as the
// amplitude of the complex phasor; transient mode drives a sinusoid of the
// same amplitude and frequency unless a custom waveform is supplied.
struct ExcitationSpec {
    ExcitationMode mode = ExcitationMode::harmonic;
    double current = 1.0;    // I_t, A
    double frequency = 50.0;  // Hz
    double background_h = 0.0;  // uniform far field along +y, planar only
    double t_end = 0.0;
    int n_steps = 0;
    std::function<double(double)> waveform;  // optional custom I_t(t)

    double omega() const { return 2.0 * pi * frequency; }
    double I(double t) const {
        if (waveform) return waveform(t);
        return current * std::sin(omega() * t);
    }
    double dIdt(double t) const {
        if (waveform) {
            const double h = (t_end > 0.0 ? t_end : 1.0) * 1e-8;
            return (waveform(t + h) - waveform(t - h)) / (2.0 * h);
        }
        return current * omega() * std::cos(omega() * t);
    }
    void validate() const {
        if (mode == ExcitationMode::harmonic && !(frequency > 0.0))
            throw validation_error("excitation: harmonic mode needs f > 0");
        if (mode == ExcitationMode::transient && (!(t_end > 0.0) || n_steps < 1))
            throw validation_error("excitation: transient mode needs a time grid");
    }
};

// One conducting triangle whose resistivity follows the E-J power law; the
// current density is constant per element, so the Newton residual and
// tangent reduce to a single scalar j per element.
struct NonlinearElement {
    LocalDof dofs[3];
    double curl[3];
    double volume = 0.0;  // integral of the measure (2 pi r weighted if axisymmetric)
    int law = 0;
};

// Assembled operator for one formulation/excitation: a complex symmetric
// matrix in harmonic mode, or the M/K pair with right-hand-side patterns in
// transient mode. Immutable after assembly.
struct AssembledSystem {
    FormulationFamily family = FormulationFamily::av;
    WindingModel model = WindingModel::resolved;
    CoordinateSystem coord = CoordinateSystem::planar;
    ExcitationSpec excitation;
    DofSpace dofs;
    std::optional<FoilWindingSpec> fw;

    // harmonic: A x = b
    Eigen::SparseMatrix<cplx> A;
    Eigen::VectorXcd b;
    // reaction rows of the strongly fixed cut dofs (resolved h-phi):
    // reaction = R x + r_fixed
    Eigen::SparseMatrix<cplx> R;
    Eigen::VectorXcd r_fixed;

    // transient: M dx/dt + K x + N(x, t) = rhs(t)
    Eigen::SparseMatrix<double> M, K;
    Eigen::VectorXd src_I;      // weak current-imposition rows, times I_t(t)
    Eigen::VectorXd rhs_static;  // fixed boundary values
    Eigen::VectorXd rhs_I;       // fixed contributions proportional to I_t(t)
    Eigen::VectorXd rhs_dIdt;    // and to dI_t/dt (mass rows of fixed cuts)
    std::vector<NonlinearElement> nonlinear;
    std::vector<HtsLaw> laws;

    Eigen::VectorXd rhs(double t) const {
        Eigen::VectorXd r = rhs_static;
        r += (src_I + rhs_I) * excitation.I(t);
        r += rhs_dIdt * excitation.dIdt(t);
        return r;
    }
};

namespace detail {

constexpr int kQuadOrder = 2;

struct BuildInputs {
    const Mesh& mesh;
    const MaterialField& mats;
    ExcitationSpec exc;
    WindingModel model;
    std::optional<FoilWindingSpec> fw;
    BoundarySettings bc;

    std::vector<char> conductor;
    std::vector<int> cond_tris, all_tris;
    Material cond_material;

    BuildInputs(const Mesh& m, const MaterialField& mats_, const ExcitationSpec& e,
                WindingModel mod, std::optional<FoilWindingSpec> fws, BoundarySettings bcs)
        : mesh(m), mats(mats_), exc(e), model(mod), fw(std::move(fws)), bc(bcs) {
        exc.validate();
        bc.background_h = exc.background_h != 0.0 ? exc.background_h : bc.background_h;
        conductor = conductor_flags(m, model);
        cond_tris = flagged_tris(conductor, true);
        all_tris.resize(m.n_tris());
        for (int t = 0; t < m.n_tris(); ++t) all_tris[t] = t;
        cond_material = model == WindingModel::fw && fw
                            ? effective_material(mats.foil, fw->fill_factor)
                            : mats.foil;
    }

    bool axi() const { return mesh.coord == CoordinateSystem::axisymmetric; }
    bool nonlinear_foil() const { return cond_material.hts.has_value(); }

    // 1/r^2 weight of the axisymmetric a-v unknown a' = r a_phi
    CoefficientFn av_weight(std::function<double(int)> base) const {
        const bool ax = axi();
        return [base = std::move(base), ax](int t, const Vec2& x) {
            return base(t) / (ax ? x[0] * x[0] : 1.0);
        };
    }

    VoltageColumns voltage_columns(const DofSpace& dofs) const {
        VoltageColumns vc;
        vc.first_index = dofs.voltage_first;
        vc.count = dofs.n_voltage;
        if (model == WindingModel::resolved) {
            const Mesh& m = mesh;
            vc.weight = [&m](int t, const Vec2&, int k) {
                return m.region_of(t).turn_index == k ? 1.0 : 0.0;
            };
        } else {
            const FoilWindingSpec& f = *fw;
            vc.weight = [&f](int, const Vec2& x, int k) {
                return f.basis.eval(k, f.alpha(x[0], x[1]));
            };
        }
        return vc;
    }

    // weak source row coefficients: I_t (resolved) or N_c I_t integral(p_k)
    std::vector<double> source_rows(const DofSpace& dofs) const {
        std::vector<double> s(dofs.n_voltage, 0.0);
        for (int k = 0; k < dofs.n_voltage; ++k)
            s[k] = model == WindingModel::resolved
                       ? 1.0
                       : fw->n_turns * fw->basis.integral(k, 0.0, 1.0);
        return s;
    }
};

inline void collect_nonlinear(const BuildInputs& in, const DofSpace& dofs,
                              AssembledSystem& sys) {
    sys.laws.push_back(*in.cond_material.hts);
    const auto quad = quadrature(kQuadOrder);
    for (int t : in.cond_tris) {
        NonlinearElement el;
        const ElementGeometry geo(in.mesh, t);
        const auto s = geo.eval(1.0 / 3.0, 1.0 / 3.0);
        const ElementDofs d = dofs.edge_expansion(in.mesh, t);
        for (int k = 0; k < 3; ++k) {
            el.dofs[k] = d.d[k];
            el.curl[k] = s.curl[k] * in.mesh.tri_edge_sign[t][k];
        }
        el.volume = 0.0;
        for (const auto& q : quad.points) {
            const Vec2 x = geo.map(q.xi, q.eta);
            el.volume += 2.0 * geo.area * q.w * (in.axi() ? 2.0 * pi * x[0] : 1.0);
        }
        el.law = 0;
        sys.nonlinear.push_back(el);
    }
}

}  // namespace foilfem::detail

inline AssembledSystem assemble_av(const Mesh& mesh, const MaterialField& mats,
                                   const ExcitationSpec& exc, WindingModel model,
                                   const std::optional<FoilWindingSpec>& fw = {},
                                   const BoundarySettings& bc = {},
                                   const DofSpace* predefined_dofs = nullptr) {
    detail::BuildInputs in(mesh, mats, exc, model, fw, bc);
    if (in.nonlinear_foil())
        throw capability_error("assemble_av: nonlinear materials are not supported in a-v");

    AssembledSystem sys;
    sys.family = FormulationFamily::av;
    sys.model = model;
    sys.coord = mesh.coord;
    sys.excitation = in.exc;
    sys.fw = in.fw;
    sys.dofs = predefined_dofs ? *predefined_dofs
                               : build_dofspace(FormulationFamily::av, model, mesh, in.fw, in.bc);
    const DofSpace& dofs = sys.dofs;
    const int n = dofs.n_free;

    const auto rows = dofs.field_expansion(mesh);
    const auto vc = in.voltage_columns(dofs);
    const auto src = in.source_rows(dofs);

    const MaterialField& m = in.mats;
    auto nu = in.av_weight([&](int t) { return m.of(mesh.region_of(t).role).nu(); });
    auto sigma = in.av_weight([&](int t) {
        (void)t;
        return in.cond_material.sigma;
    });
    const bool ax = in.axi();
    const double sig = in.cond_material.sigma;
    // coupling (sigma grad v, a'); plain measure, so the axisymmetric factor
    // is 1/r (one r from the winding function and one from a' = r a_phi,
    // against the 2 pi r measure folded into the plain integral)
    CoefficientFn couple = [sig, ax](int, const Vec2& x) { return sig / (ax ? x[0] : 1.0); };
    CoefficientFn vmass = [sig, ax](int, const Vec2& x) {
        return sig / (ax ? 2.0 * pi * x[0] : 1.0);
    };

    if (in.exc.mode == ExcitationMode::harmonic) {
        const cplx jw(0.0, in.exc.omega());
        SparseSystem<cplx> S(n, n);
        assemble_term(mesh, in.all_tris, BilinearTerm::gradgrad, nu, detail::kQuadOrder, rows,
                      rows, S);
        assemble_term(mesh, in.cond_tris, BilinearTerm::mass_scalar, sigma, detail::kQuadOrder,
                      rows, rows, S, jw);
        assemble_voltage_coupling(mesh, in.cond_tris, false, couple, detail::kQuadOrder, rows,
                                  vc, true, true, S);
        assemble_voltage_mass(mesh, in.cond_tris, vmass, detail::kQuadOrder, vc, 1.0 / jw, S);
        sys.b = Eigen::VectorXcd::Zero(n);
        for (int k = 0; k < dofs.n_voltage; ++k)
            sys.b[vc.first_index + k] = -in.exc.current * src[k] / jw;
        sys.b += S.rhs_static + S.rhs_current * in.exc.current;
        sys.A = S.matrix();
    } else {
        SparseSystem<double> Ks(n, n), Ms(n, n);
        assemble_term(mesh, in.all_tris, BilinearTerm::gradgrad, nu, detail::kQuadOrder, rows,
                      rows, Ks);
        assemble_term(mesh, in.cond_tris, BilinearTerm::mass_scalar, sigma, detail::kQuadOrder,
                      rows, rows, Ms);
        assemble_voltage_coupling(mesh, in.cond_tris, false, couple, detail::kQuadOrder, rows,
                                  vc, true, false, Ks);   // C block
        assemble_voltage_coupling(mesh, in.cond_tris, false, couple, detail::kQuadOrder, rows,
                                  vc, false, true, Ms);  // C^T rows under d/dt
        assemble_voltage_mass(mesh, in.cond_tris, vmass, detail::kQuadOrder, vc, 1.0, Ks);
        sys.src_I = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < dofs.n_voltage; ++k) sys.src_I[vc.first_index + k] = -src[k];
        sys.rhs_static = Ks.rhs_static;
        sys.rhs_I = Ks.rhs_current;
        sys.rhs_dIdt = Ms.rhs_current;
        sys.K = Ks.matrix();
        sys.M = Ms.matrix();
    }
    return sys;
}

namespace detail {

// shared h-conforming builder: full-h integrates the resistive term over
// the whole domain with a spurious resistivity outside the conductors,
// h-phi restricts it to the conductors and brings cuts into the dof space
inline AssembledSystem assemble_h_family(FormulationFamily family, const BuildInputs& in,
                                         const DofSpace* predefined_dofs = nullptr) {
    AssembledSystem sys;
    sys.family = family;
    sys.model = in.model;
    sys.coord = in.mesh.coord;
    sys.excitation = in.exc;
    sys.fw = in.fw;
    sys.dofs = predefined_dofs ? *predefined_dofs
                               : build_dofspace(family, in.model, in.mesh, in.fw, in.bc);
    const DofSpace& dofs = sys.dofs;
    const Mesh& mesh = in.mesh;
    const int n = dofs.n_free;

    const bool full = family == FormulationFamily::fullh;
    if (full && !(in.mats.spurious_rho > 0.0))
        throw validation_error("assemble_fullh: missing spurious resistivity");
    const bool nonlinear = in.nonlinear_foil();
    if (nonlinear && in.exc.mode == ExcitationMode::harmonic)
        throw capability_error("harmonic solves need linear materials");

    const auto rows = dofs.field_expansion(mesh);
    const auto vc = in.voltage_columns(dofs);
    const auto src = in.source_rows(dofs);

    const double rho_c = nonlinear ? 0.0 : in.cond_material.rho();
    const MaterialField& mats = in.mats;
    const auto& conductor = in.conductor;
    CoefficientFn rho = [&, rho_c, full](int t, const Vec2&) -> double {
        if (conductor[t]) return rho_c;  // nonlinear foils assemble separately
        if (full) return mats.spurious_rho;
        return 0.0;
    };
    CoefficientFn mu = [&](int t, const Vec2&) { return mats.of(mesh.region_of(t).role).mu; };
    CoefficientFn one = [](int, const Vec2&) { return 1.0; };

    const auto& rho_tris = full ? in.all_tris : in.cond_tris;
    const auto& lin_rho_tris = nonlinear ? (full ? flagged_tris(conductor, false) : std::vector<int>{})
                                         : rho_tris;

    if (in.exc.mode == ExcitationMode::harmonic) {
        const cplx jw(0.0, in.exc.omega());
        SparseSystem<cplx> S(n, n);
        assemble_term(mesh, lin_rho_tris, BilinearTerm::curlcurl, rho, kQuadOrder, rows, rows, S);
        assemble_term(mesh, in.all_tris, BilinearTerm::mass_vector, mu, kQuadOrder, rows, rows,
                      S, jw);
        if (dofs.n_voltage > 0)
            assemble_voltage_coupling(mesh, in.cond_tris, true, one, kQuadOrder, rows, vc, true,
                                      true, S);
        sys.b = Eigen::VectorXcd::Zero(n);
        for (int k = 0; k < dofs.n_voltage; ++k)
            sys.b[vc.first_index + k] = in.exc.current * src[k];
        sys.b += S.rhs_static + S.rhs_current * in.exc.current;
        sys.A = S.matrix();

        // reaction rows of strongly fixed cuts (resolved h-phi): the weak
        // residual tested with the cut function is the turn voltage
        if (!dofs.cuts.empty() && in.model == WindingModel::resolved) {
            const int nc = dofs.n_cuts();
            SparseSystem<cplx> RS(nc, n);
            FieldExpansion cut_rows = [&dofs, &mesh](int t) {
                ElementDofs out;
                for (int k = 0; k < 3; ++k) {
                    const int e = mesh.tri_edges[t][k];
                    for (int c = 0; c < dofs.n_cuts(); ++c)
                        if (dofs.cuts[c].coeff[e] != 0.0)
                            out.d[k].add(c, dofs.cuts[c].coeff[e]);
                }
                return out;
            };
            assemble_term(mesh, in.cond_tris, BilinearTerm::curlcurl, rho, kQuadOrder, cut_rows,
                          rows, RS);
            assemble_term(mesh, in.all_tris, BilinearTerm::mass_vector, mu, kQuadOrder, cut_rows,
                          rows, RS, jw);
            sys.R = RS.matrix();
            sys.r_fixed = -(RS.rhs_static + RS.rhs_current * in.exc.current);
        }
    } else {
        SparseSystem<double> Ks(n, n), Ms(n, n);
        assemble_term(mesh, lin_rho_tris, BilinearTerm::curlcurl, rho, kQuadOrder, rows, rows, Ks);
        assemble_term(mesh, in.all_tris, BilinearTerm::mass_vector, mu, kQuadOrder, rows, rows, Ms);
        if (dofs.n_voltage > 0)
            assemble_voltage_coupling(mesh, in.cond_tris, true, one, kQuadOrder, rows, vc, true,
                                      true, Ks);
        sys.src_I = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < dofs.n_voltage; ++k) sys.src_I[vc.first_index + k] = src[k];
        sys.rhs_static = Ks.rhs_static;
        sys.rhs_I = Ks.rhs_current;
        sys.rhs_dIdt = Ms.rhs_current;
        sys.K = Ks.matrix();
        sys.M = Ms.matrix();
        if (nonlinear) collect_nonlinear(in, dofs, sys);
    }
    return sys;
}

}  // namespace detail

inline AssembledSystem assemble_fullh(const Mesh& mesh, const MaterialField& mats,
                                      const ExcitationSpec& exc, WindingModel model,
                                      const std::optional<FoilWindingSpec>& fw = {},
                                      const BoundarySettings& bc = {},
                                      const DofSpace* predefined_dofs = nullptr) {
    detail::BuildInputs in(mesh, mats, exc, model, fw, bc);
    return detail::assemble_h_family(FormulationFamily::fullh, in, predefined_dofs);
}

inline AssembledSystem assemble_hphi(const Mesh& mesh, const MaterialField& mats,
                                     const ExcitationSpec& exc, WindingModel model,
                                     const std::optional<FoilWindingSpec>& fw = {},
                                     const BoundarySettings& bc = {},
                                     const DofSpace* predefined_dofs = nullptr) {
    detail::BuildInputs in(mesh, mats, exc, model, fw, bc);
    return detail::assemble_h_family(FormulationFamily::hphi, in, predefined_dofs);
}

inline AssembledSystem assemble(FormulationFamily family, const Mesh& mesh,
                                const MaterialField& mats, const ExcitationSpec& exc,
                                WindingModel model,
                                const std::optional<FoilWindingSpec>& fw = {},
                                const BoundarySettings& bc = {}) {
    switch (family) {
        case FormulationFamily::av: return assemble_av(mesh, mats, exc, model, fw, bc);
        case FormulationFamily::fullh: return assemble_fullh(mesh, mats, exc, model, fw, bc);
        case FormulationFamily::hphi: return assemble_hphi(mesh, mats, exc, model, fw, bc);
    }
    throw std::logic_error("assemble: unknown formulation");
}

}  // namespace foilfem
