// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: configuration-driven runs, parameter sweeps and
// run-to-run comparisons for the 2-D foil-winding solver.

#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "foilfem/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const foilfem::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const foilfem::validation_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const foilfem::capability_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const foilfem::solver_error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const foilfem::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-D foil-winding magnetodynamics solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir, basis, formulation, axis, values_csv;
    int refine = 0;

    auto* cmd_run = app.add_subcommand("run", "execute one configured solve");
    cmd_run->add_option("config", config_path, "configuration file")->required();
    cmd_run->add_option("--refine", refine, "mesh refinement override");
    cmd_run->add_option("--basis", basis, "voltage basis override (poly:p | pwl:N)");
    cmd_run->add_option("--formulation", formulation,
                        "formulation override ({av|h|hphi}-{resolved|fw})");
    cmd_run->add_option("--out", out_dir, "output directory override");

    auto* cmd_sweep = app.add_subcommand("sweep", "run a refinement/basis/frequency sweep");
    cmd_sweep->add_option("config", config_path, "configuration file")->required();
    cmd_sweep->add_option("--axis", axis, "sweep axis (refinement | basis | frequency)");
    cmd_sweep->add_option("--values", values_csv, "comma-separated axis values");
    cmd_sweep->add_option("--out", out_dir, "output directory override");

    std::string dir_a, dir_b, report_path;
    auto* cmd_compare = app.add_subcommand("compare", "compare two finished run directories");
    cmd_compare->add_option("dir_a", dir_a, "first run directory")->required();
    cmd_compare->add_option("dir_b", dir_b, "second run directory")->required();
    cmd_compare->add_option("--out", report_path, "report file (JSON)");

    CLI11_PARSE(app, argc, argv);

    if (cmd_run->parsed()) {
        return guarded([&]() {
            auto cfg = foilfem::load_run_config(foilfem::ConfigFile::parse_file(config_path));
            if (refine > 0) cfg.refinement = refine;
            if (!basis.empty()) cfg.basis = basis;
            if (!formulation.empty()) cfg.formulation = formulation;
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            cfg.validate();
            if (cfg.model() == foilfem::WindingModel::fw) foilfem::parse_basis_spec(cfg.basis);
            const auto res = foilfem::run(cfg);
            std::cout << res.summary.dump(2) << "\n";
            std::cout << "results written to " << res.out_dir.string() << "\n";
            return kExitOk;
        });
    }
    if (cmd_sweep->parsed()) {
        return guarded([&]() {
            auto cfg = foilfem::load_run_config(foilfem::ConfigFile::parse_file(config_path));
            if (!axis.empty()) cfg.sweep_axis = axis;
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            if (!values_csv.empty()) {
                cfg.sweep_values.clear();
                cfg.sweep_basis_values.clear();
                std::istringstream in(values_csv);
                std::string item;
                while (std::getline(in, item, ',')) {
                    if (cfg.sweep_axis == "basis") cfg.sweep_basis_values.push_back(item);
                    else cfg.sweep_values.push_back(std::stod(item));
                }
            }
            const auto res = foilfem::sweep(cfg);
            for (const auto& row : res.rows)
                std::cout << row.formulation << " " << row.value << ": dofs=" << row.dof_count
                          << " R=" << row.r_tot << " L=" << row.l_tot
                          << " 1-R2=" << row.one_minus_r2 << "\n";
            std::cout << "sweep table written to " << res.csv_path.string() << "\n";
            return kExitOk;
        });
    }
    return guarded([&]() {
        const auto rep = foilfem::compare(dir_a, dir_b);
        std::cout << rep.as_json().dump(2) << "\n";
        if (!report_path.empty()) foilfem::detail::write_json(rep.as_json(), report_path);
        return kExitOk;
    });
}
