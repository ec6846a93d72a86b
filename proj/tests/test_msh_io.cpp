// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "foilfem/msh_io.hpp"

using namespace foilfem;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / name;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST(MshIo, SingleTriangle) {
    const auto p = temp_file("foilfem_tri.msh");
    write_text(p,
               "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
               "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n"
               "$Elements\n1\n1 2 2 1 1 1 2 3\n$EndElements\n");
    const auto m = read_msh(p.string());
    EXPECT_EQ(m.n_tris(), 1);
    EXPECT_EQ(m.n_nodes(), 3);
    int boundary_edges = 0;
    for (int e = 0; e < m.n_edges(); ++e)
        if (m.edge_boundary[e] != BoundaryTag::interior) ++boundary_edges;
    EXPECT_EQ(boundary_edges, 3);
    fs::remove(p);
}

TEST(MshIo, QuadrangleRejectedWithLineNumber) {
    const auto p = temp_file("foilfem_quad.msh");
    write_text(p,
               "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
               "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n$EndNodes\n"
               "$Elements\n1\n1 3 2 1 1 1 2 3 4\n$EndElements\n");
    try {
        read_msh(p.string());
        FAIL() << "expected msh_parse_error";
    } catch (const msh_parse_error& err) {
        EXPECT_EQ(err.line(), 13u);  // the offending element line
        EXPECT_NE(std::string(err.what()).find("unsupported element type"), std::string::npos);
    }
    fs::remove(p);
}

TEST(MshIo, NonPlanarNodeRejected) {
    const auto p = temp_file("foilfem_3d.msh");
    write_text(p,
               "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
               "$Nodes\n3\n1 0 0 0\n2 1 0 0.5\n3 0 1 0\n$EndNodes\n"
               "$Elements\n1\n1 2 2 1 1 1 2 3\n$EndElements\n");
    EXPECT_THROW(read_msh(p.string()), msh_parse_error);
    fs::remove(p);
}

TEST(MshIo, MissingSectionRejected) {
    const auto p = temp_file("foilfem_nosec.msh");
    write_text(p,
               "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
               "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n");
    EXPECT_THROW(read_msh(p.string()), msh_parse_error);
    fs::remove(p);
}

TEST(MshIo, RoundTripPreservesConnectivity) {
    GeometrySpec g;
    g.coord = CoordinateSystem::planar;
    g.domain = {0.0, 0.0, 1.0, 1.0};
    g.bulk = {0.25, 0.25, 0.75, 0.75};
    g.n_turns = 2;
    g.fill_factor = 0.8;
    g.mesh_size_air = 0.25;
    g.mesh_size_foil = 0.1;
    g.mesh_size_gap = 0.05;
    const auto m = generate_structured_mesh(g, 1);

    const auto p = temp_file("foilfem_roundtrip.msh");
    write_msh(m, p.string());
    const auto r = read_msh(p.string());
    ASSERT_EQ(r.n_nodes(), m.n_nodes());
    ASSERT_EQ(r.n_tris(), m.n_tris());
    ASSERT_EQ(r.n_edges(), m.n_edges());
    EXPECT_TRUE(r.tris == m.tris);
    EXPECT_TRUE(r.edges == m.edges);
    for (int n = 0; n < m.n_nodes(); ++n) {
        EXPECT_DOUBLE_EQ(r.nodes[n][0], m.nodes[n][0]);
        EXPECT_DOUBLE_EQ(r.nodes[n][1], m.nodes[n][1]);
    }
    // physical tags map back to the same partition (up to relabeling)
    auto relabel = [](const std::vector<int>& v) {
        std::vector<int> out;
        std::map<int, int> seen;
        for (int x : v) out.push_back(seen.try_emplace(x, (int)seen.size()).first->second);
        return out;
    };
    EXPECT_TRUE(relabel(r.tri_region) == relabel(m.tri_region));
    fs::remove(p);
}
