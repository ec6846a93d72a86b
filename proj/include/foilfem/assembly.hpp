// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "foilfem/quadrature.hpp"
#include "foilfem/shape.hpp"

namespace foilfem {

// Expansion of one local basis coefficient in global unknowns:
//   value = sum_k w[k] * x[idx[k]] + fixed + fixed_I * I_t
// The fixed_I slot carries contributions proportional to the transport
// current (strongly fixed cut coefficients), so transient right-hand sides
// can follow I_t(t) without re-assembly.
struct LocalDof {
    static constexpr int cap = 24;  // seams of distinct cuts may share edges
    int n = 0;
    int idx[cap];
    double w[cap];
    double fixed = 0.0;
    double fixed_I = 0.0;

    void add(int index, double weight) {
        if (index < 0) throw std::runtime_error("assembly: negative dof index");
        if (n == cap) throw std::runtime_error("assembly: dof expansion overflow");
        idx[n] = index;
        w[n] = weight;
        ++n;
    }
};

struct ElementDofs {
    LocalDof d[3];
};

// row/column map: local basis expansions of one triangle
using FieldExpansion = std::function<ElementDofs(int tri)>;
using CoefficientFn = std::function<double(int tri, const Vec2&)>;

// Sparse operator under construction: COO triplets plus right-hand-side
// pattern vectors. rhs_static collects contributions of fixed boundary
// values, rhs_current those proportional to I_t.
template <class Scalar>
struct SparseSystem {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    int rows = 0, cols = 0;
    std::vector<Eigen::Triplet<Scalar>> triplets;
    Vector rhs_static;
    Vector rhs_current;

    SparseSystem() = default;
    SparseSystem(int r, int c) : rows(r), cols(c) {
        rhs_static = Vector::Zero(r);
        rhs_current = Vector::Zero(r);
    }

    void add(int i, int j, Scalar v) {
        if (i < 0 || i >= rows || j < 0 || j >= cols)
            throw std::out_of_range("assembly: dof index out of range");
        triplets.emplace_back(i, j, v);
    }

    // Duplicates are merged in insertion order before the matrix is built,
    // so pairwise-symmetric contributions stay exactly symmetric.
    Eigen::SparseMatrix<Scalar> matrix() const {
        std::vector<std::size_t> order(triplets.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& ta = triplets[a];
            const auto& tb = triplets[b];
            return ta.row() != tb.row() ? ta.row() < tb.row() : ta.col() < tb.col();
        });
        std::vector<Eigen::Triplet<Scalar>> merged;
        merged.reserve(order.size());
        for (std::size_t i : order) {
            const auto& t = triplets[i];
            if (!merged.empty() && merged.back().row() == t.row() &&
                merged.back().col() == t.col())
                merged.back() = {t.row(), t.col(), merged.back().value() + t.value()};
            else
                merged.push_back(t);
        }
        Eigen::SparseMatrix<Scalar> A(rows, cols);
        A.setFromTriplets(merged.begin(), merged.end());
        return A;
    }
};

enum class BilinearTerm { curlcurl, mass_vector, mass_scalar, gradgrad };

inline bool is_edge_term(BilinearTerm t) {
    return t == BilinearTerm::curlcurl || t == BilinearTerm::mass_vector;
}

// Assembles (coeff * B_a, B_b) over the listed triangles into sys, where B
// is the edge or nodal basis selected by the term. Axisymmetric problems
// weight the integrand by 2 pi r. Element order is fixed, so accumulation
// is deterministic.
template <class Scalar>
inline void assemble_term(const Mesh& mesh, const std::vector<int>& tris, BilinearTerm term,
                          const CoefficientFn& coeff, int quad_order,
                          const FieldExpansion& rows, const FieldExpansion& cols,
                          SparseSystem<Scalar>& sys, Scalar scale = Scalar(1)) {
    const auto quad = quadrature(quad_order);
    const bool axi = mesh.coord == CoordinateSystem::axisymmetric;
    for (int t : tris) {
        const ElementGeometry geo(mesh, t);
        double loc[3][3] = {};
        for (const auto& q : quad.points) {
            const auto s = geo.eval(q.xi, q.eta);
            const Vec2 x = geo.map(q.xi, q.eta);
            const double meas = 2.0 * geo.area * q.w * (axi ? 2.0 * pi * x[0] : 1.0);
            const double c = coeff(t, x) * meas;
            if (c == 0.0) continue;
            // products are parenthesized so the local matrix is exactly
            // symmetric in floating point
            switch (term) {
                case BilinearTerm::curlcurl:
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) loc[a][b] += c * (s.curl[a] * s.curl[b]);
                    break;
                case BilinearTerm::mass_vector:
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) loc[a][b] += c * dot(s.edge[a], s.edge[b]);
                    break;
                case BilinearTerm::mass_scalar:
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b)
                            loc[a][b] += c * (s.lambda[a] * s.lambda[b]);
                    break;
                case BilinearTerm::gradgrad:
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) loc[a][b] += c * dot(s.grad[a], s.grad[b]);
                    break;
            }
        }
        // global edge orientation
        if (is_edge_term(term)) {
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    loc[a][b] *= mesh.tri_edge_sign[t][a] * mesh.tri_edge_sign[t][b];
        }
        const ElementDofs r = rows(t);
        const ElementDofs c = cols(t);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                if (loc[a][b] == 0.0) continue;
                const Scalar v = scale * Scalar(loc[a][b]);
                for (int i = 0; i < r.d[a].n; ++i) {
                    const Scalar rw = v * Scalar(r.d[a].w[i]);
                    const int ri = r.d[a].idx[i];
                    for (int j = 0; j < c.d[b].n; ++j)
                        sys.add(ri, c.d[b].idx[j], rw * Scalar(c.d[b].w[j]));
                    sys.rhs_static[ri] -= rw * Scalar(c.d[b].fixed);
                    sys.rhs_current[ri] -= rw * Scalar(c.d[b].fixed_I);
                }
            }
        }
    }
}

// Coupling block between field rows and voltage columns:
//   loc(a, k) = integral of basis_factor_a(x) * coeff(x) * p_k(alpha or turn)
// For the h-family the row factor is curl(psi_a) (constant); for a-v it is
// lambda_a. The winding-function direction factor and the axisymmetric
// weight cancel, so the integral uses the plain area measure with any
// residual r-dependence folded into coeff.
struct VoltageColumns {
    int first_index = 0;  // global index of voltage dof 0
    int count = 0;
    // weight of voltage dof k at a point (voltage basis value, or a per-turn
    // indicator for resolved models)
    std::function<double(int tri, const Vec2&, int k)> weight;
};

template <class Scalar>
inline void assemble_voltage_coupling(const Mesh& mesh, const std::vector<int>& tris,
                                      bool edge_rows, const CoefficientFn& coeff,
                                      int quad_order, const FieldExpansion& rows,
                                      const VoltageColumns& vc, bool field_rows,
                                      bool voltage_rows, SparseSystem<Scalar>& sys) {
    const auto quad = quadrature(quad_order);
    if (vc.count > 32) throw std::runtime_error("assembly: too many voltage dofs");
    for (int t : tris) {
        const ElementGeometry geo(mesh, t);
        double loc[3][32] = {};
        for (const auto& q : quad.points) {
            const auto s = geo.eval(q.xi, q.eta);
            const Vec2 x = geo.map(q.xi, q.eta);
            const double meas = 2.0 * geo.area * q.w;
            const double c = coeff(t, x) * meas;
            if (c == 0.0) continue;
            for (int k = 0; k < vc.count; ++k) {
                const double pk = vc.weight(t, x, k);
                if (pk == 0.0) continue;
                for (int a = 0; a < 3; ++a) {
                    const double fa = edge_rows ? s.curl[a] * mesh.tri_edge_sign[t][a]
                                                : s.lambda[a];
                    loc[a][k] += c * pk * fa;
                }
            }
        }
        const ElementDofs r = rows(t);
        for (int a = 0; a < 3; ++a) {
            for (int k = 0; k < vc.count; ++k) {
                const double v = loc[a][k];
                if (v == 0.0) continue;
                const int col = vc.first_index + k;
                if (field_rows)
                    for (int i = 0; i < r.d[a].n; ++i)
                        sys.add(r.d[a].idx[i], col, Scalar(v * r.d[a].w[i]));
                if (voltage_rows) {
                    for (int i = 0; i < r.d[a].n; ++i)
                        sys.add(col, r.d[a].idx[i], Scalar(v * r.d[a].w[i]));
                    sys.rhs_static[col] -= Scalar(v * r.d[a].fixed);
                    sys.rhs_current[col] -= Scalar(v * r.d[a].fixed_I);
                }
            }
        }
    }
}

// voltage-voltage block (a-v formulations): integral of
// coeff * p_k * p_l over the conductor
template <class Scalar>
inline void assemble_voltage_mass(const Mesh& mesh, const std::vector<int>& tris,
                                  const CoefficientFn& coeff, int quad_order,
                                  const VoltageColumns& vc, Scalar scale,
                                  SparseSystem<Scalar>& sys) {
    const auto quad = quadrature(quad_order);
    std::vector<double> loc(static_cast<std::size_t>(vc.count) * vc.count, 0.0);
    for (int t : tris) {
        const ElementGeometry geo(mesh, t);
        for (const auto& q : quad.points) {
            const Vec2 x = geo.map(q.xi, q.eta);
            const double c = coeff(t, x) * 2.0 * geo.area * q.w;
            if (c == 0.0) continue;
            for (int k = 0; k < vc.count; ++k) {
                const double pk = vc.weight(t, x, k);
                if (pk == 0.0) continue;
                for (int l = 0; l < vc.count; ++l)
                    loc[k * vc.count + l] += c * pk * vc.weight(t, x, l);
            }
        }
    }
    for (int k = 0; k < vc.count; ++k)
        for (int l = 0; l < vc.count; ++l)
            if (loc[k * vc.count + l] != 0.0)
                sys.add(vc.first_index + k, vc.first_index + l,
                        scale * Scalar(loc[k * vc.count + l]));
}

// max |A - A^T| over the pattern, used by the symmetry tests
template <class Scalar>
inline double max_asymmetry(const Eigen::SparseMatrix<Scalar>& A) {
    Eigen::SparseMatrix<Scalar> D = A - Eigen::SparseMatrix<Scalar>(A.transpose());
    double m = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(D, k); it; ++it)
            m = std::max(m, std::abs(it.value()));
    return m;
}

}  // namespace foilfem
