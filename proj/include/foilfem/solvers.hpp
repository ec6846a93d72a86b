// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "foilfem/formulations.hpp"

namespace foilfem {

class solver_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TransientConfig {
    double theta = 1.0;           // implicit Euler by default
    int steps_per_period = 200;   // grid sizing hint used by the drivers
    double newton_tol = 1e-8;     // relative residual
    int newton_max_iter = 25;

    void validate() const {
        if (!(theta > 0.0 && theta <= 1.0))
            throw validation_error("transient: theta must be in (0, 1]");
        if (steps_per_period < 20)
            throw validation_error("transient: need at least 20 steps per period");
        if (!(newton_tol > 0.0) || newton_max_iter < 1)
            throw validation_error("transient: bad Newton settings");
    }
};

// Unknown vector (harmonic) or state series (transient) plus everything
// post-processing needs to interpret it.
struct Solution {
    FormulationFamily family = FormulationFamily::av;
    WindingModel model = WindingModel::resolved;
    CoordinateSystem coord = CoordinateSystem::planar;
    ExcitationSpec excitation;
    DofSpace dofs;
    std::optional<FoilWindingSpec> fw;

    Eigen::VectorXcd x;          // harmonic dof vector
    Eigen::VectorXcd reactions;  // dual values of strongly fixed cuts

    std::vector<double> times;   // transient grid (t_0 = 0 included)
    std::vector<Eigen::VectorXd> states;
    std::vector<int> newton_iterations;      // per accepted step
    std::vector<double> newton_last_ratio;   // residual ratio of the final two iterates

    bool is_harmonic() const { return times.empty(); }
};

namespace detail {

inline void copy_metadata(const AssembledSystem& sys, Solution& sol) {
    sol.family = sys.family;
    sol.model = sys.model;
    sol.coord = sys.coord;
    sol.excitation = sys.excitation;
    sol.dofs = sys.dofs;
    sol.fw = sys.fw;
}

// Direct solver with two ingredients the formulations need: symmetric
// row-max equilibration (the voltage and constraint blocks are scaled very
// differently from the field block), and Schur-complement elimination of
// the trailing `nv` voltage unknowns, whose dense coupling columns would
// otherwise cause catastrophic fill-in.
template <class Scalar>
class BlockLu {
public:
    using SpMat = Eigen::SparseMatrix<Scalar>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    void factorize(const SpMat& A, int nv, const char* context) {
        const int n = static_cast<int>(A.rows());
        nv_ = nv;
        nf_ = n - nv;

        scale_.resize(n);
        Eigen::VectorXd rmax = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < A.outerSize(); ++k)
            for (typename SpMat::InnerIterator it(A, k); it; ++it)
                rmax[it.row()] = std::max(rmax[it.row()], std::abs(it.value()));
        for (int i = 0; i < n; ++i) {
            if (!(rmax[i] > 0.0))
                throw solver_error(std::string(context) +
                                   ": empty matrix row; suspected cause: missing gauge, "
                                   "boundary condition, or cohomology cut");
            scale_[i] = 1.0 / std::sqrt(rmax[i]);
        }

        std::vector<Eigen::Triplet<Scalar>> tf;
        B_ = Dense::Zero(nf_, nv_);
        Dense D = Dense::Zero(nv_, nv_);
        for (int k = 0; k < A.outerSize(); ++k) {
            for (typename SpMat::InnerIterator it(A, k); it; ++it) {
                const Scalar v = it.value() * Scalar(scale_[it.row()] * scale_[it.col()]);
                if (it.row() < nf_ && it.col() < nf_) tf.emplace_back(it.row(), it.col(), v);
                else if (it.row() < nf_) B_(it.row(), it.col() - nf_) += v;
                else if (it.col() >= nf_) D(it.row() - nf_, it.col() - nf_) += v;
                // the (voltage, field) block is the transpose of B by symmetry
            }
        }
        SpMat Aff(nf_, nf_);
        Aff.setFromTriplets(tf.begin(), tf.end());
        // the sparsity pattern is constant across Newton iterations and
        // time steps, so the symbolic analysis is done once
        if (!analyzed_) {
            lu_.analyzePattern(Aff);
            analyzed_ = true;
        }
        lu_.factorize(Aff);
        if (lu_.info() != Eigen::Success)
            throw solver_error(std::string(context) +
                               ": singular matrix; suspected cause: missing gauge, "
                               "boundary condition, or cohomology cut");
        if (nv_ > 0) {
            Y_ = lu_.solve(B_);
            Dense S = D - B_.transpose() * Y_;
            Slu_.compute(S);
        }
        // keep the scaled matrix for residual checks and refinement
        As_ = SpMat(A.rows(), A.cols());
        std::vector<Eigen::Triplet<Scalar>> all;
        all.reserve(A.nonZeros());
        for (int k = 0; k < A.outerSize(); ++k)
            for (typename SpMat::InnerIterator it(A, k); it; ++it)
                all.emplace_back(it.row(), it.col(),
                                 it.value() * Scalar(scale_[it.row()] * scale_[it.col()]));
        As_.setFromTriplets(all.begin(), all.end());
    }

    // solves A x = b for the original (unscaled) system
    Vector solve(const Vector& b, double* rel_residual = nullptr, int refine = 2) const {
        Vector bs(b.size());
        for (int i = 0; i < b.size(); ++i) bs[i] = b[i] * Scalar(scale_[i]);
        Vector y = block_solve(bs);
        double rel = (As_ * y - bs).norm() / bs.norm();
        for (int pass = 0; pass < refine && rel > 1e-13; ++pass) {
            y += block_solve(bs - As_ * y);
            rel = (As_ * y - bs).norm() / bs.norm();
        }
        if (rel_residual) *rel_residual = rel;
        Vector x(y.size());
        for (int i = 0; i < y.size(); ++i) x[i] = y[i] * Scalar(scale_[i]);
        return x;
    }

private:
    Vector block_solve(const Vector& bs) const {
        if (nv_ == 0) return lu_.solve(bs);
        const Vector yb = lu_.solve(Vector(bs.head(nf_)));
        const Vector xv = Slu_.solve(Vector(bs.tail(nv_) - B_.transpose() * yb));
        Vector x(nf_ + nv_);
        x.head(nf_) = yb - Y_ * xv;
        x.tail(nv_) = xv;
        return x;
    }

    int nf_ = 0, nv_ = 0;
    bool analyzed_ = false;
    Eigen::VectorXd scale_;
    Eigen::SparseLU<SpMat> lu_;
    Dense B_, Y_;
    Eigen::PartialPivLU<Dense> Slu_;
    SpMat As_;
};

// residual and tangent of the power-law resistive term at state x
inline void nonlinear_contrib(const AssembledSystem& sys, const Eigen::VectorXd& x, double It,
                              double scale, Eigen::VectorXd* residual,
                              std::vector<Eigen::Triplet<double>>* tangent) {
    for (const auto& el : sys.nonlinear) {
        double coeff[3];
        double j = 0.0;
        for (int a = 0; a < 3; ++a) {
            const LocalDof& d = el.dofs[a];
            double c = d.fixed + d.fixed_I * It;
            for (int i = 0; i < d.n; ++i) c += d.w[i] * x[d.idx[i]];
            coeff[a] = c;
            j += c * el.curl[a];
        }
        const auto ev = hts_resistivity(std::abs(j), sys.laws[el.law]);
        if (residual) {
            const double r = scale * ev.rho * j * el.volume;
            for (int a = 0; a < 3; ++a) {
                const LocalDof& d = el.dofs[a];
                for (int i = 0; i < d.n; ++i) (*residual)[d.idx[i]] += d.w[i] * r * el.curl[a];
            }
        }
        if (tangent) {
            const double k = scale * ev.rho_diff * el.volume;
            for (int a = 0; a < 3; ++a) {
                const LocalDof& da = el.dofs[a];
                for (int b = 0; b < 3; ++b) {
                    const LocalDof& db = el.dofs[b];
                    const double v = k * el.curl[a] * el.curl[b];
                    for (int i = 0; i < da.n; ++i)
                        for (int jj = 0; jj < db.n; ++jj)
                            tangent->emplace_back(da.idx[i], db.idx[jj],
                                                  v * da.w[i] * db.w[jj]);
                }
            }
        }
    }
}

}  // namespace detail

// Direct complex-symmetric solve of the harmonic system. Zero excitation
// returns the zero vector exactly.
inline Solution solve_harmonic(const AssembledSystem& sys) {
    if (sys.excitation.mode != ExcitationMode::harmonic)
        throw solver_error("solve_harmonic: system was assembled for transient mode");
    Solution sol;
    detail::copy_metadata(sys, sol);
    const int n = sys.dofs.n_free;
    if (sys.b.norm() == 0.0) {
        sol.x = Eigen::VectorXcd::Zero(n);
    } else {
        detail::BlockLu<cplx> lu;
        lu.factorize(sys.A, sys.dofs.n_voltage, "solve_harmonic");
        double rel = 0.0;
        sol.x = lu.solve(sys.b, &rel);
        if (rel > 1e-10) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3e", rel);
            throw solver_error("solve_harmonic: relative residual " + std::string(buf) +
                               " exceeds 1e-10");
        }
    }
    if (sys.R.rows() > 0) sol.reactions = sys.R * sol.x + sys.r_fixed;
    return sol;
}

// Theta-scheme time integration with Newton iteration on the power-law
// resistive term (analytic tangent). Stores every accepted step.
inline Solution solve_transient(const AssembledSystem& sys, const TransientConfig& cfg = {}) {
    if (sys.excitation.mode != ExcitationMode::transient)
        throw solver_error("solve_transient: system was assembled for harmonic mode");
    cfg.validate();
    const double theta = cfg.theta;
    const int n = sys.dofs.n_free;
    const int nv = sys.dofs.n_voltage;
    const int steps = sys.excitation.n_steps;
    const double dt = sys.excitation.t_end / steps;

    Solution sol;
    detail::copy_metadata(sys, sol);
    sol.times.push_back(0.0);
    sol.states.push_back(Eigen::VectorXd::Zero(n));

    Eigen::SparseMatrix<double> Mdt = sys.M / dt;
    Eigen::SparseMatrix<double> Jlin = Mdt + theta * sys.K;
    Eigen::SparseMatrix<double> Eexp = Mdt - (1.0 - theta) * sys.K;

    detail::BlockLu<double> lu;
    const bool nonlinear = !sys.nonlinear.empty();
    if (!nonlinear) lu.factorize(Jlin, nv, "solve_transient");

    Eigen::VectorXd x = sol.states[0];
    for (int k = 0; k < steps; ++k) {
        const double t0 = k * dt, t1 = (k + 1) * dt;
        const Eigen::VectorXd b01 = theta * sys.rhs(t1) + (1.0 - theta) * sys.rhs(t0);
        const Eigen::VectorXd xp = x;

        if (!nonlinear) {
            const Eigen::VectorXd rhs = Eexp * xp + b01;
            if (rhs.norm() == 0.0) x = Eigen::VectorXd::Zero(n);
            else x = lu.solve(rhs);
            sol.newton_iterations.push_back(0);
            sol.newton_last_ratio.push_back(0.0);
        } else {
            // constant part of the residual over this step
            Eigen::VectorXd f_old = Eigen::VectorXd::Zero(n);
            if (theta < 1.0) {
                f_old = (1.0 - theta) * (sys.K * xp);
                detail::nonlinear_contrib(sys, xp, sys.excitation.I(t0), 1.0 - theta, &f_old,
                                          nullptr);
            }
            const double It1 = sys.excitation.I(t1);
            auto residual = [&](const Eigen::VectorXd& y) {
                Eigen::VectorXd F = Mdt * (y - xp) + theta * (sys.K * y) + f_old - b01;
                detail::nonlinear_contrib(sys, y, It1, theta, &F, nullptr);
                return F;
            };
            // linear prediction from the previous step shortens the search
            if (sol.states.size() >= 2) {
                const Eigen::VectorXd& xpp = sol.states[sol.states.size() - 2];
                x = 2.0 * xp - xpp;
            }
            // converge relative to the forcing scale of the step; the
            // residual cannot drop below the rounding floor of its terms
            const double scale =
                std::max({b01.norm(), (Mdt * xp).norm() + theta * (sys.K * xp).norm(), 1e-300});
            double prev = -1.0, ratio = 0.0;
            int iter = 0;
            for (;; ++iter) {
                Eigen::VectorXd F = Mdt * (x - xp) + theta * (sys.K * x) + f_old - b01;
                std::vector<Eigen::Triplet<double>> tan;
                detail::nonlinear_contrib(sys, x, It1, theta, &F, &tan);
                const double res = F.norm();
                if (prev > 0.0) ratio = res / prev;
                prev = res;
                if (res <= cfg.newton_tol * scale || res == 0.0) break;
                if (iter >= cfg.newton_max_iter) {
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "%.3e", res / scale);
                    throw solver_error("solve_transient: Newton failed at step " +
                                       std::to_string(k + 1) + ", residual " + buf);
                }
                Eigen::SparseMatrix<double> T(n, n);
                T.setFromTriplets(tan.begin(), tan.end());
                Eigen::SparseMatrix<double> J = Jlin + T;
                lu.factorize(J, nv, "solve_transient");
                const Eigen::VectorXd dx = lu.solve(F);
                // backtracking guards the strongly nonlinear steps; full
                // steps are kept unless the residual actually grows
                double s = 1.0;
                Eigen::VectorXd xs = x - dx;
                for (int back = 0; back < 8 && residual(xs).norm() > res; ++back) {
                    s *= 0.5;
                    xs = x - s * dx;
                }
                x = xs;
            }
            sol.newton_iterations.push_back(iter);
            sol.newton_last_ratio.push_back(ratio);
        }
        sol.times.push_back(t1);
        sol.states.push_back(x);
    }
    return sol;
}

}  // namespace foilfem
