// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "foilfem/assembly.hpp"
#include "foilfem/quadrature.hpp"
#include "foilfem/shape.hpp"

#include <Eigen/SparseLU>

using namespace foilfem;

namespace {

// identity field map: local entity k -> global index of that entity
FieldExpansion nodal_identity(const Mesh& m) {
    return [&m](int t) {
        ElementDofs d;
        for (int k = 0; k < 3; ++k) d.d[k].add(m.tris[t][k], 1.0);
        return d;
    };
}

FieldExpansion edge_identity(const Mesh& m) {
    return [&m](int t) {
        ElementDofs d;
        for (int k = 0; k < 3; ++k) d.d[k].add(m.tri_edges[t][k], 1.0);
        return d;
    };
}

CoefficientFn unit_coeff() {
    return [](int, const Vec2&) { return 1.0; };
}

Mesh single_triangle(std::array<Vec2, 3> pts, CoordinateSystem coord) {
    Mesh m;
    m.coord = coord;
    m.nodes = {pts[0], pts[1], pts[2]};
    m.tris = {{0, 1, 2}};
    m.tri_region = {0};
    m.regions = {{RegionRole::air, -1, false}};
    m.finalize();
    return m;
}

std::vector<int> all_tris(const Mesh& m) {
    std::vector<int> t(m.n_tris());
    for (int i = 0; i < m.n_tris(); ++i) t[i] = i;
    return t;
}

Mesh rectangle_mesh(double x0, double y0, double x1, double y1, double h,
                    CoordinateSystem coord) {
    GeometrySpec g;
    g.coord = coord;
    g.domain = {x0, y0, x1, y1};
    g.bulk = {x0, y0, x1, y1};
    g.n_turns = 1;
    g.fill_factor = 1.0;
    g.mesh_size_air = h;
    g.mesh_size_foil = h;
    g.mesh_size_gap = h;
    return generate_structured_mesh(g, 1);
}

}  // namespace

TEST(Shape, NodalPartitionOfUnity) {
    const auto s = eval_reference(0.3, 0.25);
    EXPECT_NEAR(s.lambda[0] + s.lambda[1] + s.lambda[2], 1.0, 1e-15);
    EXPECT_NEAR(s.grad[0][0] + s.grad[1][0] + s.grad[2][0], 0.0, 1e-15);
    EXPECT_NEAR(s.grad[0][1] + s.grad[1][1] + s.grad[2][1], 0.0, 1e-15);
}

TEST(Shape, NodalVerticesAndCentroid) {
    const auto v0 = eval_reference(0.0, 0.0);
    EXPECT_DOUBLE_EQ(v0.lambda[0], 1.0);
    EXPECT_DOUBLE_EQ(v0.lambda[1], 0.0);
    EXPECT_DOUBLE_EQ(v0.lambda[2], 0.0);
    const auto c = eval_reference(1.0 / 3.0, 1.0 / 3.0);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(c.lambda[k], 1.0 / 3.0, 1e-15);
}

TEST(Shape, EdgeCirculations) {
    // circulation of psi_e along edge f: integral over the edge of the
    // tangential component; for Whitney forms this is the Kronecker delta.
    // Midpoint of edge (i,j): psi_ij = (grad_j - grad_i)/2 there, and the
    // circulation equals psi . t * length with a 2-point Gauss rule (exact
    // for the linear integrand).
    Mesh m = single_triangle({{Vec2{0.2, 0.1}, Vec2{1.3, 0.4}, Vec2{0.5, 1.7}}},
                             CoordinateSystem::planar);
    const ElementGeometry geo(m, 0);
    const double g2 = 0.5 / std::sqrt(3.0);
    for (int e = 0; e < 3; ++e) {
        for (int f = 0; f < 3; ++f) {
            const int a = f, b = (f + 1) % 3;
            const Vec2 pa = geo.coord[a], pb = geo.coord[b];
            double circ = 0.0;
            for (const double u : {0.5 - g2, 0.5 + g2}) {
                const Vec2 p{pa[0] + u * (pb[0] - pa[0]), pa[1] + u * (pb[1] - pa[1])};
                const auto l = geo.barycentric(p);
                const auto s = geo.eval(l[1], l[2]);
                circ += 0.5 * (s.edge[e][0] * (pb[0] - pa[0]) + s.edge[e][1] * (pb[1] - pa[1]));
            }
            EXPECT_NEAR(circ, e == f ? 1.0 : 0.0, 1e-13) << "edge " << e << " along " << f;
        }
    }
}

TEST(Shape, CurlOnUnitRightTriangle) {
    // grads: l0 = 1-x-y, l1 = x, l2 = y; curl psi_01 = 2 (grad l0 x grad l1)
    // = 2 * ((-1,-1) x (1,0)) = 2 * (0*(-1) - ... ) = 2 -> 1/A with A = 1/2
    const auto s = eval_reference(0.2, 0.3);
    const double A = 0.5;
    EXPECT_NEAR(s.curl[0], 1.0 / A, 1e-14);
    EXPECT_NEAR(s.curl[1], 1.0 / A, 1e-14);
    EXPECT_NEAR(s.curl[2], 1.0 / A, 1e-14);
    // finite-difference check of curl psi_0 = d(psi_y)/dx - d(psi_x)/dy
    const double h = 1e-6;
    const auto px = eval_reference(0.2 + h, 0.3);
    const auto mx = eval_reference(0.2 - h, 0.3);
    const auto py = eval_reference(0.2, 0.3 + h);
    const auto my = eval_reference(0.2, 0.3 - h);
    const double fd =
        (px.edge[0][1] - mx.edge[0][1]) / (2 * h) - (py.edge[0][0] - my.edge[0][0]) / (2 * h);
    EXPECT_NEAR(fd, s.curl[0], 1e-7);
}

TEST(Quadrature, Order1Centroid) {
    const auto q = quadrature(1);
    ASSERT_EQ(q.points.size(), 1u);
    EXPECT_DOUBLE_EQ(q.points[0].w, 0.5);
    EXPECT_DOUBLE_EQ(q.points[0].xi, 1.0 / 3.0);
}

TEST(Quadrature, WeightsPositiveSumHalf) {
    for (int order : {1, 2, 3, 4}) {
        const auto q = quadrature(order);
        double sum = 0.0;
        for (const auto& p : q.points) {
            EXPECT_GT(p.w, 0.0);
            EXPECT_GT(p.xi, 0.0);
            EXPECT_GT(p.eta, 0.0);
            EXPECT_LT(p.xi + p.eta, 1.0);
            sum += p.w;
        }
        EXPECT_NEAR(sum, 0.5, 1e-14);
    }
    EXPECT_THROW(quadrature(7), std::invalid_argument);
}

TEST(Quadrature, BarycentricMonomials) {
    // integral over the reference triangle: a! b! c! 2A / (a+b+c+2)!
    // lambda_1 -> 1/6, lambda_1 lambda_2 -> 1/24
    for (int order : {1, 2, 3, 4}) {
        const auto q = quadrature(order);
        double s1 = 0.0;
        for (const auto& p : q.points) s1 += p.w * p.xi;
        EXPECT_NEAR(s1, 1.0 / 6.0, 1e-14) << "order " << order;
    }
    for (int order : {2, 3, 4}) {
        const auto q = quadrature(order);
        double s2 = 0.0;
        for (const auto& p : q.points) s2 += p.w * p.xi * p.eta;
        EXPECT_NEAR(s2, 1.0 / 24.0, 1e-14) << "order " << order;
    }
    // cubic exactness of the degree-4 rule: lambda_1^3 -> 3! 2A / 5! = 1/20
    const auto q4 = quadrature(4);
    double s3 = 0.0, s4 = 0.0;
    for (const auto& p : q4.points) {
        s3 += p.w * p.xi * p.xi * p.xi;
        s4 += p.w * p.xi * p.xi * p.eta * p.eta;
    }
    EXPECT_NEAR(s3, 6.0 / 120.0, 1e-14);
    EXPECT_NEAR(s4, 2.0 * 2.0 / 720.0, 1e-14);
}

TEST(Assembly, ScalarMassSingleTriangle) {
    Mesh m = single_triangle({{Vec2{0.0, 0.0}, Vec2{2.0, 0.0}, Vec2{0.0, 3.0}}},
                             CoordinateSystem::planar);
    const double A = 3.0;
    SparseSystem<double> sys(3, 3);
    assemble_term<double>(m, all_tris(m), BilinearTerm::mass_scalar, unit_coeff(), 2,
                          nodal_identity(m), nodal_identity(m), sys);
    const auto M = sys.matrix();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_NEAR(M.coeff(i, j), i == j ? A / 6.0 : A / 12.0, 1e-13);
}

TEST(Assembly, GradGradRowSumsZero) {
    Mesh m = single_triangle({{Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}}},
                             CoordinateSystem::planar);
    SparseSystem<double> sys(3, 3);
    assemble_term<double>(m, all_tris(m), BilinearTerm::gradgrad, unit_coeff(), 2,
                          nodal_identity(m), nodal_identity(m), sys);
    const auto K = sys.matrix();
    for (int i = 0; i < 3; ++i) {
        double row = 0.0;
        for (int j = 0; j < 3; ++j) row += K.coeff(i, j);
        EXPECT_NEAR(row, 0.0, 1e-14);
    }
}

TEST(Assembly, ZeroCoefficientZeroContribution) {
    Mesh m = single_triangle({{Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}}},
                             CoordinateSystem::planar);
    SparseSystem<double> sys(3, 3);
    assemble_term<double>(m, all_tris(m), BilinearTerm::mass_scalar,
                          [](int, const Vec2&) { return 0.0; }, 2, nodal_identity(m),
                          nodal_identity(m), sys);
    EXPECT_TRUE(sys.triplets.empty());
}

TEST(Assembly, AxisymmetricAnnulusVolume) {
    // unit-coefficient scalar mass over r in [r1,r2], z in [0,h] sums to
    // pi (r2^2 - r1^2) h: the integrand (sum of hats)^2 * 2 pi r is linear
    const double r1 = 0.2, r2 = 0.7, h = 0.4;
    Mesh m = rectangle_mesh(r1, 0.0, r2, h, 0.1, CoordinateSystem::axisymmetric);
    SparseSystem<double> sys(m.n_nodes(), m.n_nodes());
    assemble_term<double>(m, all_tris(m), BilinearTerm::mass_scalar, unit_coeff(), 2,
                          nodal_identity(m), nodal_identity(m), sys);
    double total = 0.0;
    for (const auto& t : sys.triplets) total += t.value();
    EXPECT_NEAR(total, pi * (r2 * r2 - r1 * r1) * h, 1e-12);
}

TEST(Assembly, PatchTestLinearFieldReproduced) {
    // Laplace solve with Dirichlet trace of g(x,y) = 2x - 3y + 1 recovers g
    // at every interior node
    Mesh m = rectangle_mesh(0.0, 0.0, 1.0, 1.0, 0.25, CoordinateSystem::planar);
    auto g = [](double x, double y) { return 2.0 * x - 3.0 * y + 1.0; };
    std::vector<int> index(m.n_nodes(), -1);
    int n_free = 0;
    for (int n = 0; n < m.n_nodes(); ++n)
        if (m.node_boundary[n] == BoundaryTag::interior) index[n] = n_free++;
    FieldExpansion rows = [&](int t) {
        ElementDofs d;
        for (int k = 0; k < 3; ++k) {
            const int n = m.tris[t][k];
            if (index[n] >= 0) d.d[k].add(index[n], 1.0);
            else d.d[k].fixed = g(m.nodes[n][0], m.nodes[n][1]);
        }
        return d;
    };
    SparseSystem<double> sys(n_free, n_free);
    assemble_term<double>(m, all_tris(m), BilinearTerm::gradgrad, unit_coeff(), 2, rows, rows,
                          sys);
    Eigen::SparseMatrix<double> K = sys.matrix();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(K);
    Eigen::VectorXd x = lu.solve(sys.rhs_static);
    for (int n = 0; n < m.n_nodes(); ++n)
        if (index[n] >= 0)
            EXPECT_NEAR(x[index[n]], g(m.nodes[n][0], m.nodes[n][1]), 1e-11);
}

TEST(Assembly, AssembledOperatorsSymmetric) {
    Mesh m = rectangle_mesh(0.1, 0.0, 1.0, 1.0, 0.2, CoordinateSystem::axisymmetric);
    for (auto term : {BilinearTerm::mass_scalar, BilinearTerm::gradgrad}) {
        SparseSystem<double> sys(m.n_nodes(), m.n_nodes());
        assemble_term<double>(m, all_tris(m), term, unit_coeff(), 2, nodal_identity(m),
                              nodal_identity(m), sys);
        EXPECT_EQ(max_asymmetry(sys.matrix()), 0.0);
    }
    for (auto term : {BilinearTerm::mass_vector, BilinearTerm::curlcurl}) {
        SparseSystem<double> sys(m.n_edges(), m.n_edges());
        assemble_term<double>(m, all_tris(m), term, unit_coeff(), 2, edge_identity(m),
                              edge_identity(m), sys);
        EXPECT_EQ(max_asymmetry(sys.matrix()), 0.0);
    }
}

TEST(Assembly, DofIndexOutOfRangeThrows) {
    Mesh m = single_triangle({{Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}}},
                             CoordinateSystem::planar);
    SparseSystem<double> sys(2, 2);  // too small on purpose
    EXPECT_THROW(assemble_term<double>(m, all_tris(m), BilinearTerm::mass_scalar, unit_coeff(),
                                       2, nodal_identity(m), nodal_identity(m), sys),
                 std::out_of_range);
}
