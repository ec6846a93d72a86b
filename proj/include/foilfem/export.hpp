// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "foilfem/postproc.hpp"

namespace foilfem {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

}  // namespace detail

// One row per call, comma separated, scientific notation with 9 significant
// digits. Identical data produces byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw io_error("csv: cannot open " + path);
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << detail::fmt(values[i]);
        out_ << "\n";
    }

    void row_mixed(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

// Legacy ASCII VTK unstructured grid: cell data |j| and region tag, point
// data for the nodal potential where the formulation has one.
inline void export_vtk(const Mesh& mesh, const Solution& sol, const MaterialField& mats,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("vtk: cannot open " + path);
    out << "# vtk DataFile Version 3.0\n";
    out << "foilfem fields\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.n_nodes() << " double\n";
    for (const auto& n : mesh.nodes)
        out << detail::fmt(n[0]) << " " << detail::fmt(n[1]) << " 0\n";
    out << "CELLS " << mesh.n_tris() << " " << 4 * mesh.n_tris() << "\n";
    for (const auto& t : mesh.tris) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    out << "CELL_TYPES " << mesh.n_tris() << "\n";
    for (int t = 0; t < mesh.n_tris(); ++t) out << "5\n";

    CurrentEvaluator ev(mesh, sol, mats);
    out << "CELL_DATA " << mesh.n_tris() << "\n";
    out << "SCALARS j_abs double 1\nLOOKUP_TABLE default\n";
    const int last = sol.is_harmonic() ? 0 : static_cast<int>(sol.times.size()) - 1;
    for (int t = 0; t < mesh.n_tris(); ++t) {
        const auto c = mesh.centroid(t);
        double j = 0.0;
        if (ev.is_conducting(t))
            j = sol.is_harmonic() ? std::abs(ev.harmonic(t, {c[0], c[1]}))
                                  : std::abs(ev.transient(t, {c[0], c[1]}, last));
        out << detail::fmt(j) << "\n";
    }
    out << "SCALARS region int 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < mesh.n_tris(); ++t) out << mesh.tri_region[t] << "\n";

    if (!sol.dofs.node_index.empty()) {
        out << "POINT_DATA " << mesh.n_nodes() << "\n";
        out << "SCALARS potential_abs double 1\nLOOKUP_TABLE default\n";
        for (int n = 0; n < mesh.n_nodes(); ++n) {
            double v = 0.0;
            if (sol.dofs.node_index[n] >= 0) {
                v = sol.is_harmonic() ? std::abs(sol.x[sol.dofs.node_index[n]])
                                      : std::abs(sol.states[last][sol.dofs.node_index[n]]);
            } else if (sol.dofs.node_index[n] == DofSpace::kFixed) {
                v = std::abs(sol.dofs.node_fixed[n]);
            }
            out << detail::fmt(v) << "\n";
        }
    }
}

inline void export_turn_voltages_csv(const VoltageDistribution& dist, const std::string& path) {
    CsvWriter csv(path, {"turn", "alpha_center", "v_abs", "v_re", "v_im"});
    for (int i = 0; i < dist.n_turns; ++i) {
        const cplx v = dist.strip_average(i);
        csv.row({static_cast<double>(i + 1), (i + 0.5) / dist.n_turns, std::abs(v), v.real(),
                 v.imag()});
    }
}

inline void export_losses_csv(const LossResult& loss, const std::string& path) {
    CsvWriter csv(path, {"time", "power"});
    for (std::size_t k = 0; k < loss.time.size(); ++k) csv.row({loss.time[k], loss.power[k]});
}

inline void export_samples_csv(const std::vector<LineSample>& samples, const std::string& path) {
    CsvWriter csv(path, {"x", "y", "j_abs", "j_phase"});
    for (const auto& s : samples) csv.row({s.point[0], s.point[1], s.j_abs, s.j_phase});
}

}  // namespace foilfem
