// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "foilfem/formulations.hpp"
#include "foilfem/postproc.hpp"
#include "foilfem/solvers.hpp"

using namespace foilfem;

namespace {

// analytic full-turn DC resistance of an annular turn: concentric
// filaments of conductance sigma w dr / (2 pi r) in parallel
double annular_resistance(double r_in, double r_out, double width, double sigma) {
    return 2.0 * pi / (sigma * width * std::log(r_out / r_in));
}

GeometrySpec small_coil(int n_turns, double fill = 0.9) {
    BenchmarkParams p;
    p.n_turns = n_turns;
    p.fill_factor = fill;
    return build_benchmark_geometry(GeometryPreset::axi20, p);
}

ExcitationSpec dc_like() {
    ExcitationSpec e;
    e.mode = ExcitationMode::harmonic;
    e.current = 1.0;
    e.frequency = 1e-3;
    return e;
}

MaterialField default_materials() { return MaterialField{}; }

}  // namespace

TEST(DofSpace, HphiFwHasFewestUnknowns) {
    const auto g = small_coil(20);
    const auto m = generate_structured_mesh(g, 1);
    const auto fw = make_fw_spec(g, build_voltage_basis(VoltageBasisKind::polynomial, 4));
    const auto d_hphi = build_dofspace(FormulationFamily::hphi, WindingModel::fw, m, fw);
    const auto d_full = build_dofspace(FormulationFamily::fullh, WindingModel::fw, m, fw);
    const auto d_av = build_dofspace(FormulationFamily::av, WindingModel::fw, m, fw);
    EXPECT_LT(d_hphi.n_free, d_full.n_free);
    EXPECT_GT(d_hphi.n_free, 0);
    EXPECT_GT(d_av.n_free, 0);
}

TEST(DofSpace, CutCounts) {
    const auto g = small_coil(20);
    const auto m = generate_structured_mesh(g, 1);
    const auto fw = make_fw_spec(g, build_voltage_basis(VoltageBasisKind::polynomial, 4));
    const auto resolved = build_dofspace(FormulationFamily::hphi, WindingModel::resolved, m);
    EXPECT_EQ(resolved.n_cuts(), 20);
    EXPECT_EQ(resolved.n_cut_free, 0);  // strongly fixed to I_t
    EXPECT_EQ(resolved.n_voltage, 0);   // voltages come from reactions
    const auto homog = build_dofspace(FormulationFamily::hphi, WindingModel::fw, m, fw);
    EXPECT_EQ(homog.n_cuts(), 1);
    EXPECT_EQ(homog.n_cut_free, 1);
    EXPECT_EQ(homog.n_voltage, 4);
}

TEST(DofSpace, SingleTriangleFullH) {
    Mesh m;
    m.coord = CoordinateSystem::planar;
    m.nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    m.tris = {{0, 1, 2}};
    m.tri_region = {0};
    m.regions = {{RegionRole::turn, 0, true}};
    m.finalize();
    BoundarySettings bc;
    bc.far_field = FarFieldBC::none;
    const auto d = build_dofspace(FormulationFamily::fullh, WindingModel::resolved, m, {}, bc);
    EXPECT_EQ(d.n_edge_free, 3);
    EXPECT_EQ(d.n_voltage, 1);
    EXPECT_EQ(d.n_free, 4);
}

TEST(DofSpace, ResolvedHphiRequiresInsulation) {
    const auto g = small_coil(20, 1.0);  // touching turns
    const auto m = generate_structured_mesh(g, 1);
    EXPECT_THROW(build_dofspace(FormulationFamily::hphi, WindingModel::resolved, m),
                 capability_error);
}

TEST(DofSpace, FwSpecRequired) {
    const auto g = small_coil(4);
    const auto m = generate_structured_mesh(g, 1);
    EXPECT_THROW(build_dofspace(FormulationFamily::hphi, WindingModel::fw, m),
                 validation_error);
}

TEST(Materials, EffectiveMaterial) {
    Material foil;
    foil.sigma = 5.9e7;
    const auto bulk1 = effective_material(foil, 1.0);
    EXPECT_DOUBLE_EQ(bulk1.rho(), foil.rho());
    const auto bulk2 = effective_material(foil, 0.01);
    EXPECT_NEAR(bulk2.rho(), 100.0 * foil.rho(), 1e-9 * bulk2.rho());
    EXPECT_DOUBLE_EQ(bulk2.sigma * bulk2.rho(), 1.0);
    EXPECT_THROW(effective_material(foil, 0.0), std::invalid_argument);
    EXPECT_THROW(effective_material(foil, 1.5), std::invalid_argument);
}

TEST(Materials, ReciprocalInvariants) {
    MaterialField mats;
    EXPECT_DOUBLE_EQ(mats.core.mu * mats.core.nu(), 1.0);
    EXPECT_DOUBLE_EQ(mats.foil.sigma * mats.foil.rho(), 1.0);
    EXPECT_DOUBLE_EQ(mats.spurious_rho, 1.0);  // default 1 Ohm m
}

TEST(Formulations, PiecewiseLinearBasisReproducesResolved) {
    // with N_b = N_c hat functions the homogenized per-turn voltages track
    // the resolved ones closely (R^2 >= 0.99)
    const auto g = small_coil(6);
    const auto m = generate_structured_mesh(g, 2);
    const auto fw = make_fw_spec(g, build_voltage_basis(VoltageBasisKind::piecewise_linear, 6));
    const auto mats = default_materials();
    ExcitationSpec exc;
    exc.frequency = 50.0;
    const auto resolved =
        turn_voltages(solve_harmonic(assemble_hphi(m, mats, exc, WindingModel::resolved)));
    const auto homog =
        turn_voltages(solve_harmonic(assemble_hphi(m, mats, exc, WindingModel::fw, fw)));
    VoltageDistribution stairs;
    stairs.continuum = false;
    stairs.n_turns = 6;
    stairs.per_turn.resize(6);
    for (int i = 0; i < 6; ++i) stairs.per_turn[i] = homog.strip_average(i);
    EXPECT_GE(r_squared(resolved, stairs), 0.99);
}

TEST(Formulations, HarmonicSystemsComplexSymmetric) {
    const auto g = small_coil(4);
    const auto m = generate_structured_mesh(g, 1);
    const auto fw = make_fw_spec(g, build_voltage_basis(VoltageBasisKind::polynomial, 3));
    const auto mats = default_materials();
    ExcitationSpec exc;
    exc.frequency = 50.0;
    for (auto family :
         {FormulationFamily::av, FormulationFamily::fullh, FormulationFamily::hphi}) {
        for (auto model : {WindingModel::resolved, WindingModel::fw}) {
            const auto sys = assemble(family, m, mats, exc, model,
                                      model == WindingModel::fw
                                          ? std::optional<FoilWindingSpec>(fw)
                                          : std::nullopt);
            EXPECT_LT(max_asymmetry(sys.A), 1e-14 * sys.A.coeffs().abs().maxCoeff())
                << "family " << static_cast<int>(family) << " model "
                << static_cast<int>(model);
        }
    }
}

TEST(Formulations, ZeroExcitationGivesZeroSolution) {
    const auto g = small_coil(4);
    const auto m = generate_structured_mesh(g, 1);
    const auto mats = default_materials();
    ExcitationSpec exc;
    exc.current = 0.0;
    exc.frequency = 50.0;
    const auto sys = assemble_av(m, mats, exc, WindingModel::resolved);
    const auto sol = solve_harmonic(sys);
    EXPECT_EQ(sol.x.norm(), 0.0);
}

TEST(Formulations, NonlinearAvRejected) {
    const auto g = small_coil(4);
    const auto m = generate_structured_mesh(g, 1);
    MaterialField mats;
    mats.foil.hts = HtsLaw{1e-4, 1e8, 20.0, 1e-6};
    EXPECT_THROW(assemble_av(m, mats, dc_like(), WindingModel::resolved), capability_error);
}

TEST(Formulations, FullHRequiresSpuriousResistivity) {
    const auto g = small_coil(4);
    const auto m = generate_structured_mesh(g, 1);
    MaterialField mats;
    mats.spurious_rho = 0.0;
    EXPECT_THROW(assemble_fullh(m, mats, dc_like(), WindingModel::resolved),
                 validation_error);
}

// The DC annulus oracle pins both the physics and the sign conventions:
// every formulation must report positive per-turn voltages R_i * I_t.
TEST(Formulations, DcAnnulusResolvedAllFamilies) {
    const auto g = small_coil(20);
    const auto m = generate_structured_mesh(g, 2);
    const auto mats = default_materials();
    const auto exc = dc_like();

    for (auto family :
         {FormulationFamily::av, FormulationFamily::fullh, FormulationFamily::hphi}) {
        const auto sys = assemble(family, m, mats, exc, WindingModel::resolved);
        const auto sol = solve_harmonic(sys);
        const auto dist = turn_voltages(sol);
        ASSERT_EQ(dist.n_turns, 20);
        for (int i = 0; i < 20; ++i) {
            const Rect turn = g.turn_rect(i);
            const double r_expected =
                annular_resistance(turn.x0, turn.x1, turn.height(), mats.foil.sigma);
            const cplx v = dist.per_turn[i];
            EXPECT_GT(v.real(), 0.0) << "sign, family " << static_cast<int>(family);
            EXPECT_NEAR(std::abs(v), r_expected * exc.current, 0.01 * r_expected)
                << "family " << static_cast<int>(family) << " turn " << i;
        }
    }
}

TEST(Formulations, DcFwMatchesAnalyticTotal) {
    const auto g = small_coil(20);
    const auto m = generate_structured_mesh(g, 2);
    const auto fw = make_fw_spec(g, build_voltage_basis(VoltageBasisKind::polynomial, 4));
    const auto mats = default_materials();
    const auto exc = dc_like();

    double r_tot_expected = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Rect turn = g.turn_rect(i);
        r_tot_expected += annular_resistance(turn.x0, turn.x1, turn.height(), mats.foil.sigma);
    }
    for (auto family :
         {FormulationFamily::av, FormulationFamily::fullh, FormulationFamily::hphi}) {
        const auto sys = assemble(family, m, mats, exc, WindingModel::fw, fw);
        const auto sol = solve_harmonic(sys);
        const auto lp = lumped_params(sol);
        EXPECT_NEAR(lp.r_tot, r_tot_expected, 0.02 * r_tot_expected)
            << "family " << static_cast<int>(family);
        EXPECT_GT(lp.l_tot, 0.0);
    }
}

TEST(Formulations, HphiFwCutCarriesTotalCurrent) {
    const auto g = small_coil(20);
    const auto m = generate_structured_mesh(g, 1);
    const auto fw = make_fw_spec(g, build_voltage_basis(VoltageBasisKind::polynomial, 4));
    const auto mats = default_materials();
    ExcitationSpec exc;
    exc.frequency = 50.0;
    const auto sys = assemble_hphi(m, mats, exc, WindingModel::fw, fw);
    const auto sol = solve_harmonic(sys);
    ASSERT_EQ(sol.dofs.n_cut_free, 1);
    int cut_dof = -1;
    for (int c = 0; c < sol.dofs.n_cuts(); ++c)
        if (sol.dofs.cut_index[c] >= 0) cut_dof = sol.dofs.cut_index[c];
    ASSERT_GE(cut_dof, 0);
    const cplx i_f = sol.x[cut_dof];
    EXPECT_NEAR(std::abs(i_f - cplx(20.0 * exc.current)), 0.0, 1e-10 * 20.0 * exc.current);
}

TEST(Formulations, SeamRelocationLeavesPhysicsUnchanged) {
    const auto g = small_coil(6);
    const auto m = generate_structured_mesh(g, 1);
    const auto fw = make_fw_spec(g, build_voltage_basis(VoltageBasisKind::polynomial, 3));
    const auto mats = default_materials();
    ExcitationSpec exc;
    exc.frequency = 50.0;

    auto dofs_a = build_dofspace(FormulationFamily::hphi, WindingModel::fw, m, fw);
    // rebuild the cut with the direct corridor to the axis blocked, forcing
    // the seam onto a different path that still terminates on the axis
    std::vector<char> bulk(m.n_tris(), 0), blocked(m.n_tris(), 0);
    for (int t = 0; t < m.n_tris(); ++t) {
        bulk[t] = m.is_bulk(t);
        const auto c = m.centroid(t);
        if (!bulk[t] && c[0] < g.bulk.x0 && std::abs(c[1]) < 0.04) blocked[t] = 1;
    }
    auto dofs_b = dofs_a;
    dofs_b.cuts[0] = build_cut(m, bulk, blocked);
    ASSERT_FALSE(dofs_a.cuts[0].seam == dofs_b.cuts[0].seam);

    const auto sys_a = assemble_hphi(m, mats, exc, WindingModel::fw, fw, {}, &dofs_a);
    const auto sys_b = assemble_hphi(m, mats, exc, WindingModel::fw, fw, {}, &dofs_b);
    const auto sol_a = solve_harmonic(sys_a);
    const auto sol_b = solve_harmonic(sys_b);
    const auto lp_a = lumped_params(sol_a);
    const auto lp_b = lumped_params(sol_b);
    EXPECT_NEAR(std::abs(lp_a.v_tot - lp_b.v_tot), 0.0, 1e-10 * std::abs(lp_a.v_tot));
    const auto va = turn_voltages(sol_a);
    const auto vb = turn_voltages(sol_b);
    for (int i = 0; i < 6; ++i)
        EXPECT_NEAR(std::abs(va.strip_average(i) - vb.strip_average(i)), 0.0,
                    1e-10 * std::abs(va.strip_average(i)));
}

TEST(Formulations, UniformCurrentWithConstantBasisPlanarDc) {
    // planar single foil, N_b = 1: the bulk current density is uniform at DC
    GeometrySpec g;
    g.coord = CoordinateSystem::planar;
    g.domain = {-0.1, -0.1, 0.1, 0.1};
    g.bulk = {-0.02, -0.03, 0.02, 0.03};
    g.n_turns = 1;
    g.fill_factor = 1.0;
    g.mesh_size_air = 0.02;
    g.mesh_size_foil = 0.01;
    g.mesh_size_gap = 0.01;
    g.mesh_size_axial = 0.01;
    const auto m = generate_structured_mesh(g, 1);
    FoilWindingSpec fw{1, 1.0, g.alpha_map(), build_voltage_basis(VoltageBasisKind::polynomial, 1)};
    const auto mats = default_materials();
    const auto sys = assemble_hphi(m, mats, dc_like(), WindingModel::fw, fw);
    const auto sol = solve_harmonic(sys);
    const MaterialField mf = mats;
    CurrentEvaluator ev(m, sol, mf);
    const double j_expected = 1.0 / g.bulk.area();
    for (int t = 0; t < m.n_tris(); ++t) {
        if (!m.is_bulk(t)) continue;
        const auto c = m.centroid(t);
        const cplx j = ev.harmonic(t, {c[0], c[1]});
        EXPECT_NEAR(j.real(), j_expected, 0.01 * j_expected);
        EXPECT_NEAR(j.imag(), 0.0, 0.01 * j_expected);
    }
}
