#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace jerkplan {

/// Convex quadratic program
///     minimize    0.5 x' H x + g' x
///     subject to  A x = b,   C x <= d
/// with H symmetric positive semidefinite. Dense storage; sized for the
/// local-filter subproblems (a few hundred variables at most).
struct QpProblem {
    Eigen::MatrixXd H;
    Eigen::VectorXd g;
    Eigen::MatrixXd A;  // may have zero rows
    Eigen::VectorXd b;
    Eigen::MatrixXd C;  // may have zero rows
    Eigen::VectorXd d;
};

struct QpResult {
    bool converged = false;
    Eigen::VectorXd x;
    Eigen::VectorXd y;  // equality multipliers
    Eigen::VectorXd z;  // inequality multipliers (>= 0)
    int iterations = 0;
};

/// Primal-dual interior-point solver (Mehrotra predictor-corrector). The
/// objective is normalized internally so regularization and stopping tests
/// are scale-free; feasibility tolerances are absolute in the constraint
/// units. Returns converged=false when the subproblem appears infeasible or
/// stalls.
inline QpResult solve_qp(const QpProblem& prob, double feas_tol = 1e-10,
                         int max_iters = 80) {
    const int n = static_cast<int>(prob.H.rows());
    const int me = static_cast<int>(prob.A.rows());
    const int mi = static_cast<int>(prob.C.rows());

    // Objective scaling: x and the constraints are untouched; internal
    // multipliers are in scaled units and convert back on return.
    const double obj_scale = std::max({1.0, prob.H.cwiseAbs().maxCoeff(),
                                       prob.g.cwiseAbs().maxCoeff()});
    const Eigen::MatrixXd H = prob.H / obj_scale;
    const Eigen::VectorXd g = prob.g / obj_scale;

    QpResult res;
    res.x = Eigen::VectorXd::Zero(n);
    res.y = Eigen::VectorXd::Zero(me);
    res.z = Eigen::VectorXd::Zero(mi);

    const double reg = 1e-12;

    // Equality-only (or unconstrained) case: one KKT solve plus a step of
    // iterative refinement to undo the regularization.
    if (mi == 0) {
        Eigen::MatrixXd K(n + me, n + me);
        K.setZero();
        K.topLeftCorner(n, n) = H + reg * Eigen::MatrixXd::Identity(n, n);
        if (me > 0) {
            K.topRightCorner(n, me) = prob.A.transpose();
            K.bottomLeftCorner(me, n) = prob.A;
        }
        Eigen::VectorXd rhs(n + me);
        rhs.head(n) = -g;
        rhs.tail(me) = prob.b;
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
        Eigen::VectorXd sol = lu.solve(rhs);
        sol += lu.solve(rhs - K * sol);
        if (!sol.allFinite()) return res;
        res.x = sol.head(n);
        res.y = sol.tail(me) * obj_scale;
        const double eq_res =
            me > 0 ? (prob.A * res.x - prob.b).cwiseAbs().maxCoeff() : 0.0;
        res.converged = eq_res <= std::max(feas_tol, 1e-9);
        res.iterations = 1;
        return res;
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(me);  // scaled units
    Eigen::VectorXd s = (prob.d - prob.C * x).cwiseMax(1.0);
    Eigen::VectorXd z = Eigen::VectorXd::Ones(mi);  // scaled units

    const int dim = n + me;
    Eigen::MatrixXd K(dim, dim);
    Eigen::VectorXd rhs(dim);
    const double dual_tol = 1e-9 * (1.0 + g.cwiseAbs().maxCoeff());
    const double mu_tol = 1e-11;

    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd r_dual =
            H * x + g + prob.A.transpose() * y + prob.C.transpose() * z;
        const Eigen::VectorXd r_eq =
            me > 0 ? (prob.A * x - prob.b).eval() : Eigen::VectorXd::Zero(0);
        const Eigen::VectorXd r_in = prob.C * x + s - prob.d;
        const double mu = s.dot(z) / mi;

        const double norm_dual = r_dual.cwiseAbs().maxCoeff();
        const double norm_eq = me > 0 ? r_eq.cwiseAbs().maxCoeff() : 0.0;
        const double norm_in = r_in.cwiseAbs().maxCoeff();
        res.iterations = it;
        if (norm_dual <= dual_tol && norm_eq <= feas_tol && norm_in <= feas_tol &&
            mu <= mu_tol) {
            res.x = x;
            res.y = y * obj_scale;
            res.z = z * obj_scale;
            res.converged = true;
            return res;
        }

        const Eigen::ArrayXd w = z.array() / s.array();
        K.setZero();
        K.topLeftCorner(n, n) = H + reg * Eigen::MatrixXd::Identity(n, n) +
                                prob.C.transpose() * w.matrix().asDiagonal() * prob.C;
        if (me > 0) {
            K.topRightCorner(n, me) = prob.A.transpose();
            K.bottomLeftCorner(me, n) = prob.A;
            K.bottomRightCorner(me, me) = -reg * Eigen::MatrixXd::Identity(me, me);
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);

        auto solve_step = [&](const Eigen::VectorXd& r_comp, Eigen::VectorXd& dx,
                              Eigen::VectorXd& dy, Eigen::VectorXd& ds,
                              Eigen::VectorXd& dz) {
            // Eliminate ds = -r_in - C dx, then dz from complementarity.
            rhs.head(n) = -r_dual -
                          prob.C.transpose() *
                              ((z.array() * r_in.array() - r_comp.array()) / s.array())
                                  .matrix();
            if (me > 0) rhs.tail(me) = -r_eq;
            const Eigen::VectorXd sol = lu.solve(rhs);
            dx = sol.head(n);
            dy = sol.tail(me);
            ds = -r_in - prob.C * dx;
            dz = (-(r_comp.array()) - z.array() * ds.array()) / s.array();
        };

        auto max_step = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
            double a = 1.0;
            for (int i = 0; i < v.size(); ++i)
                if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
            return a;
        };

        // Affine (predictor) direction.
        Eigen::VectorXd dx_a, dy_a, ds_a, dz_a;
        solve_step((s.array() * z.array()).matrix(), dx_a, dy_a, ds_a, dz_a);
        if (!dx_a.allFinite()) break;
        const double a_aff = std::min(max_step(s, ds_a), max_step(z, dz_a));
        const double mu_aff = (s + a_aff * ds_a).dot(z + a_aff * dz_a) / mi;
        const double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);

        // Corrector.
        const Eigen::VectorXd r_comp =
            (s.array() * z.array() + ds_a.array() * dz_a.array() - sigma * mu).matrix();
        Eigen::VectorXd dx, dy, ds, dz;
        solve_step(r_comp, dx, dy, ds, dz);
        if (!dx.allFinite()) break;

        const double alpha = 0.995 * std::min(max_step(s, ds), max_step(z, dz));
        if (alpha < 1e-13) break;
        x += alpha * dx;
        if (me > 0) y += alpha * dy;
        s += alpha * ds;
        z += alpha * dz;
    }

    res.x = x;
    res.y = y * obj_scale;
    res.z = z * obj_scale;
    res.converged = false;
    return res;
}

}  // namespace jerkplan
