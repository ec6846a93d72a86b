// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "foilfem/mesh.hpp"

namespace foilfem {

class msh_parse_error : public std::runtime_error {
public:
    msh_parse_error(std::size_t line, const std::string& what)
        : std::runtime_error("msh parse error at line " + std::to_string(line) + ": " + what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Reads the ASCII msh v2.2 subset: $MeshFormat, $Nodes and $Elements with
// 2-node lines (type 1) and 3-node triangles (type 2) only. The first
// element tag is the physical tag and becomes the region index; boundary
// lines become outer boundary edges. Nodes must lie in the z = 0 plane.
inline Mesh read_msh(const std::string& path,
                     CoordinateSystem coord = CoordinateSystem::planar) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_msh: cannot open " + path);

    std::size_t lineno = 0;
    std::string line;
    auto next_line = [&]() -> std::string& {
        if (!std::getline(in, line)) throw msh_parse_error(lineno, "unexpected end of file");
        ++lineno;
        return line;
    };

    bool saw_format = false, saw_nodes = false, saw_elements = false;
    std::unordered_map<long, int> node_of;
    Mesh m;
    m.coord = coord;
    std::unordered_map<int, int> region_of_phys;
    struct BLine {
        int a, b;
    };
    std::vector<BLine> blines;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("$MeshFormat", 0) == 0) {
            std::istringstream fs(next_line());
            double version;
            int file_type, data_size;
            if (!(fs >> version >> file_type >> data_size) || version < 2.0 ||
                version >= 3.0 || file_type != 0)
                throw msh_parse_error(lineno, "unsupported mesh format (need ASCII v2.x)");
            if (next_line().rfind("$EndMeshFormat", 0) != 0)
                throw msh_parse_error(lineno, "missing $EndMeshFormat");
            saw_format = true;
        } else if (line.rfind("$Nodes", 0) == 0) {
            std::istringstream hs(next_line());
            long count;
            if (!(hs >> count) || count < 0) throw msh_parse_error(lineno, "bad node count");
            for (long k = 0; k < count; ++k) {
                std::istringstream ns(next_line());
                long id;
                double x, y, z;
                if (!(ns >> id >> x >> y >> z)) throw msh_parse_error(lineno, "bad node line");
                if (z != 0.0) throw msh_parse_error(lineno, "non-2-D node (z != 0)");
                node_of[id] = m.n_nodes();
                m.nodes.push_back({x, y});
            }
            if (next_line().rfind("$EndNodes", 0) != 0)
                throw msh_parse_error(lineno, "missing $EndNodes");
            saw_nodes = true;
        } else if (line.rfind("$Elements", 0) == 0) {
            std::istringstream hs(next_line());
            long count;
            if (!(hs >> count) || count < 0) throw msh_parse_error(lineno, "bad element count");
            for (long k = 0; k < count; ++k) {
                std::istringstream es(next_line());
                long id;
                int type, ntags;
                if (!(es >> id >> type >> ntags)) throw msh_parse_error(lineno, "bad element line");
                int phys = 0, tag;
                for (int t = 0; t < ntags; ++t) {
                    if (!(es >> tag)) throw msh_parse_error(lineno, "bad element tags");
                    if (t == 0) phys = tag;
                }
                if (type == 1) {
                    long a, b;
                    if (!(es >> a >> b)) throw msh_parse_error(lineno, "bad line element");
                    blines.push_back({node_of.at(a), node_of.at(b)});
                } else if (type == 2) {
                    long a, b, c;
                    if (!(es >> a >> b >> c)) throw msh_parse_error(lineno, "bad triangle element");
                    auto [it, inserted] =
                        region_of_phys.try_emplace(phys, static_cast<int>(m.regions.size()));
                    if (inserted) m.regions.push_back({RegionRole::air, -1, false});
                    m.tris.push_back({node_of.at(a), node_of.at(b), node_of.at(c)});
                    m.tri_region.push_back(it->second);
                } else {
                    throw msh_parse_error(lineno, "unsupported element type " + std::to_string(type));
                }
            }
            if (next_line().rfind("$EndElements", 0) != 0)
                throw msh_parse_error(lineno, "missing $EndElements");
            saw_elements = true;
        }
        // other sections ($PhysicalNames, ...) are skipped silently
    }
    if (!saw_format) throw msh_parse_error(lineno, "missing $MeshFormat section");
    if (!saw_nodes) throw msh_parse_error(lineno, "missing $Nodes section");
    if (!saw_elements) throw msh_parse_error(lineno, "missing $Elements section");

    // fix orientation, then build connectivity
    for (auto& tr : m.tris) {
        const auto& a = m.nodes[tr[0]];
        const auto& b = m.nodes[tr[1]];
        const auto& c = m.nodes[tr[2]];
        const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if (det < 0.0) std::swap(tr[1], tr[2]);
    }
    m.finalize();
    check_mesh(m);
    (void)blines;  // physical boundary lines carry no extra information here
    return m;
}

// Minimal exporter for the same subset; physical tag = region index + 1.
inline void write_msh(const Mesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_msh: cannot open " + path);
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$Nodes\n" << m.n_nodes() << "\n";
    char buf[128];
    for (int n = 0; n < m.n_nodes(); ++n) {
        std::snprintf(buf, sizeof buf, "%d %.16g %.16g 0\n", n + 1, m.nodes[n][0], m.nodes[n][1]);
        out << buf;
    }
    out << "$EndNodes\n";
    int n_blines = 0;
    for (int e = 0; e < m.n_edges(); ++e)
        if (m.edge_boundary[e] != BoundaryTag::interior) ++n_blines;
    out << "$Elements\n" << (m.n_tris() + n_blines) << "\n";
    int id = 1;
    for (int e = 0; e < m.n_edges(); ++e) {
        if (m.edge_boundary[e] == BoundaryTag::interior) continue;
        out << id++ << " 1 2 1001 1001 " << m.edges[e][0] + 1 << " " << m.edges[e][1] + 1 << "\n";
    }
    for (int t = 0; t < m.n_tris(); ++t) {
        out << id++ << " 2 2 " << m.tri_region[t] + 1 << " " << m.tri_region[t] + 1 << " "
            << m.tris[t][0] + 1 << " " << m.tris[t][1] + 1 << " " << m.tris[t][2] + 1 << "\n";
    }
    out << "$EndElements\n";
}

}  // namespace foilfem
