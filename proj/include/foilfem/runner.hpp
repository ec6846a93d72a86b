// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "foilfem/config.hpp"
#include "foilfem/export.hpp"
#include "foilfem/msh_io.hpp"
#include "foilfem/postproc.hpp"

namespace foilfem {

namespace fs = std::filesystem;
using nlohmann::json;

// One finished run: the solution plus everything the summary reports.
struct RunResult {
    RunConfig config;
    GeometrySpec geometry;
    Mesh mesh;
    Solution solution;
    json summary;
    fs::path out_dir;

    VoltageDistribution voltages() const { return turn_voltages(solution); }
};

namespace detail {

inline json run_summary(const RunConfig& cfg, const GeometrySpec& geom, const Mesh& mesh,
                        const Solution& sol, const MaterialField& mats) {
    json s;
    s["formulation"] = cfg.formulation;
    s["preset"] = cfg.preset == GeometryPreset::axi20
                      ? "axi20"
                      : (cfg.preset == GeometryPreset::hts20 ? "hts20" : "custom");
    s["coordinate_system"] =
        geom.coord == CoordinateSystem::axisymmetric ? "axisymmetric" : "planar";
    s["n_turns"] = geom.n_turns;
    s["fill_factor"] = geom.fill_factor;
    s["refinement"] = cfg.refinement;
    s["mesh_nodes"] = mesh.n_nodes();
    s["mesh_triangles"] = mesh.n_tris();
    s["dof_count"] = sol.dofs.n_free;
    s["dof_edges"] = sol.dofs.n_edge_free;
    s["dof_nodes"] = sol.dofs.n_node_free;
    s["cut_count"] = sol.dofs.n_cuts();
    s["current"] = cfg.excitation.current;
    s["frequency"] = cfg.excitation.frequency;
    if (cfg.model() == WindingModel::fw) {
        s["basis"] = cfg.basis;
        s["n_voltage_dofs"] = sol.dofs.n_voltage;
    }
    if (sol.is_harmonic()) {
        s["mode"] = "harmonic";
        const auto lp = lumped_params(sol);
        s["v_tot_re"] = lp.v_tot.real();
        s["v_tot_im"] = lp.v_tot.imag();
        s["v_tot_abs"] = std::abs(lp.v_tot);
        s["r_tot"] = lp.r_tot;
        s["l_tot"] = lp.l_tot;
        if (cfg.model() == WindingModel::fw) {
            // engineering current in every virtual foil, worst deviation
            const auto strips = strip_currents(mesh, sol, mats);
            double worst = 0.0;
            for (const auto& is : strips)
                worst = std::max(worst, std::abs(is - cplx(cfg.excitation.current)));
            s["strip_current_max_dev"] = worst / cfg.excitation.current;
            for (std::size_t c = 0; c < sol.dofs.cuts.size(); ++c)
                if (sol.dofs.cut_index[c] >= 0)
                    s["i_f"] = std::abs(sol.x[sol.dofs.cut_index[c]]);
        }
    } else {
        s["mode"] = "transient";
        s["steps"] = static_cast<int>(sol.times.size()) - 1;
        s["t_end"] = sol.times.back();
        const auto loss = ac_losses(mesh, sol, mats);
        s["loss_cycle_avg"] = loss.cycle_average;
        int worst_newton = 0;
        for (int it : sol.newton_iterations) worst_newton = std::max(worst_newton, it);
        s["newton_max_iterations"] = worst_newton;
        if (cfg.model() == WindingModel::fw) {
            double sum_sq = 0.0;
            int count = 0;
            const int spp = cfg.transient.steps_per_period;
            for (int k = std::max(1, (int)sol.times.size() - 1 - spp + 1);
                 k < (int)sol.times.size(); ++k) {
                const double v = total_voltage_transient(sol, k);
                sum_sq += v * v;
                ++count;
            }
            s["v_tot_steady_amplitude"] = std::sqrt(2.0 * sum_sq / std::max(1, count));
        }
    }
    return s;
}

inline void write_json(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace detail

// Executes one configured run and writes summary.json, turn_voltages.csv
// (harmonic), losses.csv (transient) and optional field/sample exports into
// the output directory. Wall time goes to timing.log so repeated identical
// runs produce byte-identical results.
inline RunResult run(const RunConfig& cfg) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();

    RunResult res;
    res.config = cfg;
    res.geometry = build_benchmark_geometry(cfg.preset, cfg.geometry);
    res.mesh = generate_structured_mesh(res.geometry, cfg.refinement);

    std::optional<FoilWindingSpec> fw;
    if (cfg.model() == WindingModel::fw)
        fw = make_fw_spec(res.geometry, parse_basis_spec(cfg.basis));

    const auto sys = assemble(cfg.family(), res.mesh, cfg.materials, cfg.excitation,
                              cfg.model(), fw);
    res.solution = cfg.excitation.mode == ExcitationMode::harmonic
                       ? solve_harmonic(sys)
                       : solve_transient(sys, cfg.transient);

    res.out_dir = fs::path(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(res.out_dir, ec);
    if (ec) throw io_error("cannot create output directory " + res.out_dir.string());

    res.summary = detail::run_summary(cfg, res.geometry, res.mesh, res.solution, cfg.materials);
    detail::write_json(res.summary, res.out_dir / "summary.json");

    if (res.solution.is_harmonic()) {
        export_turn_voltages_csv(turn_voltages(res.solution), (res.out_dir / "turn_voltages.csv").string());
    } else {
        export_losses_csv(ac_losses(res.mesh, res.solution, cfg.materials),
                          (res.out_dir / "losses.csv").string());
    }
    if (cfg.export_fields)
        export_vtk(res.mesh, res.solution, cfg.materials, (res.out_dir / "fields.vtk").string());
    if (cfg.sample_line && res.solution.is_harmonic()) {
        const Rect b = res.geometry.bulk;
        const double y = 0.5 * (b.y0 + b.y1) + 1e-6 * b.height();
        const auto samples = sample_current_density(
            res.mesh, res.solution, cfg.materials,
            {{Vec2{b.x0 + 1e-6 * b.width(), y}, Vec2{b.x1 - 1e-6 * b.width(), y}}}, 200);
        export_samples_csv(samples, (res.out_dir / "samples.csv").string());
    }

    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - t_start)
                               .count();
    std::ofstream timing(res.out_dir / "timing.log");
    timing << "wall_time_ms " << wall_ms << "\n";
    return res;
}

struct SweepRow {
    std::string formulation;
    std::string value;
    int dof_count = 0;
    double r_tot = 0.0;
    double l_tot = 0.0;
    double one_minus_r2 = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    fs::path csv_path;
};

// Refinement, basis or frequency sweep over a set of formulations, with
// 1 - R^2 of every run computed against the designated reference run.
inline SweepResult sweep(const RunConfig& base) {
    if (base.excitation.mode != ExcitationMode::harmonic)
        throw config_error("sweep: harmonic runs only");
    const auto& axis = base.sweep_axis;
    std::vector<std::string> values;
    if (axis == "basis") {
        values = base.sweep_basis_values;
        if (values.empty())
            for (double v : base.sweep_values)
                values.push_back("poly:" + std::to_string((int)std::llround(v)));
    } else if (axis == "refinement" || axis == "frequency") {
        for (double v : base.sweep_values) {
            std::ostringstream os;
            os << v;
            values.push_back(os.str());
        }
    } else {
        throw config_error("sweep: unknown axis '" + axis + "'");
    }
    if (values.empty()) throw config_error("sweep: no axis values");
    auto formulations = base.sweep_formulations;
    if (formulations.empty()) formulations = {base.formulation};

    auto configured = [&](const std::string& formulation, const std::string& value) {
        RunConfig c = base;
        c.formulation = formulation;
        if (axis == "refinement") c.refinement = (int)std::llround(std::stod(value));
        else if (axis == "frequency") c.excitation.frequency = std::stod(value);
        else c.basis = value;
        std::string tag = formulation + "_" + value;
        for (auto& ch : tag)
            if (ch == ':' || ch == '.') ch = '_';
        c.output_dir = (fs::path(base.output_dir) / ("sweep_" + axis) / tag).string();
        return c;
    };

    SweepResult out;
    std::map<std::string, RunResult> reference_cache;
    for (const auto& value : values) {
        // the reference run only depends on the axis value for refinement
        // and frequency sweeps
        const std::string ref_key = axis == "basis" ? "fixed" : value;
        if (!reference_cache.count(ref_key))
            reference_cache.emplace(ref_key, run(configured(base.sweep_reference, value)));
        const auto& ref = reference_cache.at(ref_key);
        const auto ref_dist = ref.voltages();
        for (const auto& formulation : formulations) {
            const auto r = run(configured(formulation, value));
            SweepRow row;
            row.formulation = formulation;
            row.value = value;
            row.dof_count = r.summary["dof_count"];
            row.r_tot = r.summary["r_tot"];
            row.l_tot = r.summary["l_tot"];
            row.one_minus_r2 = 1.0 - r_squared(ref_dist, r.voltages());
            out.rows.push_back(row);
        }
    }

    out.csv_path = fs::path(base.output_dir) / ("sweep_" + axis + ".csv");
    fs::create_directories(out.csv_path.parent_path());
    CsvWriter csv(out.csv_path.string(),
                  {"formulation", axis, "dof_count", "r_tot", "l_tot", "one_minus_r2"});
    for (const auto& row : out.rows)
        csv.row_mixed({row.formulation, row.value, std::to_string(row.dof_count),
                       detail::fmt(row.r_tot), detail::fmt(row.l_tot),
                       detail::fmt(row.one_minus_r2)});
    return out;
}

struct CompareReport {
    double max_turn_deviation = 0.0;  // relative, on voltage magnitudes
    double r2 = 1.0;
    double max_loss_deviation = 0.0;  // relative, on overlapping samples
    json as_json() const {
        json j;
        j["max_turn_deviation"] = max_turn_deviation;
        j["r2"] = r2;
        j["max_loss_deviation"] = max_loss_deviation;
        return j;
    }
};

namespace detail {

inline VoltageDistribution turns_from_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("compare: cannot open " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<cplx> turns;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
        if (cells.size() < 5) throw io_error("compare: malformed row in " + path.string());
        turns.emplace_back(cells[3], cells[4]);
    }
    VoltageDistribution d;
    d.continuum = false;
    d.n_turns = static_cast<int>(turns.size());
    d.per_turn = Eigen::Map<Eigen::VectorXcd>(turns.data(), turns.size());
    return d;
}

inline std::vector<double> loss_series_from_csv(const fs::path& path) {
    std::ifstream in(path);
    std::vector<double> p;
    if (!in) return p;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        p.push_back(std::stod(line.substr(comma + 1)));
    }
    return p;
}

}  // namespace detail

// Compares two finished run directories: per-turn voltage deviation, the
// coefficient of determination of the distributions, and the loss series.
inline CompareReport compare(const fs::path& dir_a, const fs::path& dir_b) {
    json sa, sb;
    {
        std::ifstream a(dir_a / "summary.json"), b(dir_b / "summary.json");
        if (!a || !b) throw io_error("compare: missing summary.json");
        a >> sa;
        b >> sb;
    }
    if (sa["n_turns"] != sb["n_turns"])
        throw config_error("compare: runs have different turn counts");
    if (sa["mode"] != sb["mode"] || sa["frequency"] != sb["frequency"] ||
        sa["current"] != sb["current"])
        throw config_error("compare: runs have incompatible excitations");

    CompareReport rep;
    if (sa["mode"] == "harmonic") {
        const auto da = detail::turns_from_csv(dir_a / "turn_voltages.csv");
        const auto db = detail::turns_from_csv(dir_b / "turn_voltages.csv");
        double worst = 0.0;
        for (int i = 0; i < da.n_turns; ++i) {
            const double ref = std::abs(da.per_turn[i]);
            worst = std::max(worst, std::abs(std::abs(db.per_turn[i]) - ref) / ref);
        }
        rep.max_turn_deviation = worst;
        rep.r2 = r_squared(da, db);
    } else {
        const auto pa = detail::loss_series_from_csv(dir_a / "losses.csv");
        const auto pb = detail::loss_series_from_csv(dir_b / "losses.csv");
        const std::size_t n = std::min(pa.size(), pb.size());
        double scale = 0.0;
        for (std::size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(pa[k]));
        for (std::size_t k = 0; k < n; ++k)
            rep.max_loss_deviation =
                std::max(rep.max_loss_deviation, std::abs(pa[k] - pb[k]) / scale);
    }
    return rep;
}

}  // namespace foilfem
