// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "foilfem/mesh.hpp"
#include "foilfem/quadrature.hpp"

namespace foilfem {

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
// out-of-plane component of a x b
inline double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

// Nodal (Whitney 0-form) and edge (Whitney 1-form) shape functions at one
// reference point. Local edges are (0,1), (1,2), (2,0); psi_ij =
// lambda_i grad(lambda_j) - lambda_j grad(lambda_i). Curls are constant.
struct ShapeSet {
    std::array<double, 3> lambda;
    std::array<Vec2, 3> grad;       // physical gradients of lambda
    std::array<Vec2, 3> edge;       // edge function values
    std::array<double, 3> curl;     // out-of-plane curl of the edge functions
};

// Per-element affine geometry: maps reference evaluations to physical ones.
struct ElementGeometry {
    std::array<int, 3> nodes;
    std::array<Vec2, 3> coord;
    std::array<Vec2, 3> grad_lambda;  // constant per element
    double area = 0.0;

    ElementGeometry() = default;
    ElementGeometry(const Mesh& m, int t) {
        nodes = m.tris[t];
        for (int k = 0; k < 3; ++k) coord[k] = m.nodes[nodes[k]];
        const Vec2 e1{coord[1][0] - coord[0][0], coord[1][1] - coord[0][1]};
        const Vec2 e2{coord[2][0] - coord[0][0], coord[2][1] - coord[0][1]};
        const double det = cross(e1, e2);  // 2 * area, positive for CCW
        area = 0.5 * det;
        // grad lambda_0 = (rot of opposite edge) / det, etc.
        grad_lambda[0] = {(coord[1][1] - coord[2][1]) / det, (coord[2][0] - coord[1][0]) / det};
        grad_lambda[1] = {(coord[2][1] - coord[0][1]) / det, (coord[0][0] - coord[2][0]) / det};
        grad_lambda[2] = {(coord[0][1] - coord[1][1]) / det, (coord[1][0] - coord[0][0]) / det};
    }

    Vec2 map(double xi, double eta) const {
        const double l0 = 1.0 - xi - eta;
        return {l0 * coord[0][0] + xi * coord[1][0] + eta * coord[2][0],
                l0 * coord[0][1] + xi * coord[1][1] + eta * coord[2][1]};
    }

    std::array<double, 3> barycentric(const Vec2& p) const {
        std::array<double, 3> l;
        const Vec2 d{p[0] - coord[0][0], p[1] - coord[0][1]};
        l[1] = dot(grad_lambda[1], d);
        l[2] = dot(grad_lambda[2], d);
        l[0] = 1.0 - l[1] - l[2];
        return l;
    }

    ShapeSet eval(double xi, double eta) const {
        ShapeSet s;
        s.lambda = {1.0 - xi - eta, xi, eta};
        s.grad = grad_lambda;
        for (int k = 0; k < 3; ++k) {
            const int i = k, j = (k + 1) % 3;
            s.edge[k] = {s.lambda[i] * grad_lambda[j][0] - s.lambda[j] * grad_lambda[i][0],
                         s.lambda[i] * grad_lambda[j][1] - s.lambda[j] * grad_lambda[i][1]};
            s.curl[k] = 2.0 * cross(grad_lambda[i], grad_lambda[j]);
        }
        return s;
    }
};

// Reference-element evaluation used by the kernel unit tests.
inline ShapeSet eval_reference(double xi, double eta) {
    Mesh unit;
    unit.coord = CoordinateSystem::planar;
    unit.nodes = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    unit.tris = {{0, 1, 2}};
    unit.tri_region = {0};
    unit.regions = {{RegionRole::air, -1, false}};
    unit.finalize();
    return ElementGeometry(unit, 0).eval(xi, eta);
}

}  // namespace foilfem
