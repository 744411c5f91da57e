#pragma once

#include "jerkplan/derivatives.hpp"
#include "jerkplan/indicator.hpp"
#include "jerkplan/kinematics.hpp"
#include "jerkplan/qp.hpp"
#include "jerkplan/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace jerkplan {

/// Always-negative indicator for scenes without obstacles.
inline IndicatorModel permissive_indicator() {
    IndicatorModel ind;
    ind.bias = -1.0;
    return ind;
}

/// Waypoint segment [a, b] (inclusive) optimized by one filter call. The two
/// configurations on each side stay constant; a >= 2 and b <= M-3 keep those
/// margins inside the path.
struct FilterWindow {
    int a = 0;
    int b = 0;
};

struct FilterParams {
    double kkt_tol = 1e-6;
    double eq_tol = 1e-8;           // meters, task-position violation
    double ineq_tol = 1e-9;
    double rel_decrease = 1e-6;     // minimum relative J_local improvement
    double indicator_margin = 1e-6; // strict inequality as indicator <= -margin
    int max_sqp_iters = 60;
};

struct FilterResult {
    bool success = false;
    std::vector<JointConfig> segment;  // configs for [a, b]
    double j_local_before = 0.0;
    double j_local_after = 0.0;
};

namespace detail {

/// Joint-limit interval expressed in the winding of an unwrapped angle.
/// Joints spanning the full circle have no limit at all.
struct WrappedBounds {
    bool active = false;
    double lo = 0.0;
    double hi = 0.0;
};

inline WrappedBounds wrapped_bounds(double q, double q_min, double q_max) {
    if (q_max - q_min >= kTwoPi - 1e-12) return {};
    const double mid = 0.5 * (q_min + q_max);
    const double k = std::round((q - mid) / kTwoPi);
    return {true, q_min + kTwoPi * k, q_max + kTwoPi * k};
}

/// One five-point linear operator: value_t = sum_j w[j] * q[start+j][t].
struct StencilRow {
    int start = 0;
    std::array<double, 5> w{};
};

inline StencilRow make_row(const std::vector<double>& times, int i, int order) {
    const int m = static_cast<int>(times.size());
    const int s = stencil_window_start(i, m);
    std::array<double, 5> t5;
    for (int j = 0; j < 5; ++j) t5[j] = times[s + j];
    const Stencil st = derivative_stencil(t5, order, times[i]);
    return StencilRow{s, st.weights};
}

inline Vec3 apply_row(const StencilRow& row, const std::vector<JointConfig>& configs) {
    Vec3 v = Vec3::Zero();
    for (int j = 0; j < 5; ++j) v += row.w[j] * configs[row.start + j].q;
    return v;
}

}  // namespace detail

/// Sum of weighted squared jerks over waypoints [lo, hi] of the trajectory,
/// with the same stencil conventions as evaluate_profile.
inline double jerk_sum_range(const Trajectory& traj, const RobotModel& model, int lo, int hi) {
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) {
        const Vec3 jerk = detail::apply_row(detail::make_row(traj.times, i, 3), traj.configs);
        sum += jerk.dot(model.weights.asDiagonal() * jerk);
    }
    return sum;
}

/// Local constrained jerk minimization over one window. The summed squared
/// jerk is an exact convex quadratic in the stacked free configurations;
/// each SQP step solves a QP with linearized task-position equalities and
/// linearized indicator / velocity / acceleration / joint-limit
/// inequalities, followed by an l1 merit line search. The jerk limit itself
/// is deliberately not imposed here; the greedy loop handles it.
///
/// Changing q_a..q_b also changes velocity, acceleration, and jerk at the
/// margin points a-2..a-1 and b+1..b+2, so the filter minimizes the jerk sum
/// over that whole affected range and constrains velocity/acceleration on it
/// too. Success still requires the windowed J_local (the reported quantity)
/// to strictly decrease, plus feasibility and no increase of the
/// affected-range sum - together these make the global objective
/// non-increasing across accepted filters.
inline FilterResult local_filter(const Trajectory& traj, const FilterWindow& window,
                                 const PathTask& path, const RobotModel& model,
                                 const IndicatorModel& indicator,
                                 const FilterParams& params = {}) {
    const int m = static_cast<int>(traj.size());
    const int a = window.a, b = window.b;
    if (a < 2 || b > m - 3 || a > b) throw InvalidInputError("invalid filter window");

    const int s = b - a + 1;
    const int nv = 3 * s;
    const int e_lo = std::max(0, a - 2);
    const int e_hi = std::min(m - 1, b + 2);

    // Stencil rows, shared across SQP iterations (they depend on times only).
    // The objective rows cover the affected range; the window rows [a, b]
    // are the reported J_local.
    std::vector<detail::StencilRow> jerk_rows(e_hi - e_lo + 1);
    std::vector<detail::StencilRow> vel_rows(e_hi - e_lo + 1), acc_rows(e_hi - e_lo + 1);
    for (int i = e_lo; i <= e_hi; ++i) {
        jerk_rows[i - e_lo] = detail::make_row(traj.times, i, 3);
        vel_rows[i - e_lo] = detail::make_row(traj.times, i, 1);
        acc_rows[i - e_lo] = detail::make_row(traj.times, i, 2);
    }

    // Working copy of the trajectory; only [a, b] changes.
    std::vector<JointConfig> work = traj.configs;
    const auto col_of = [&](int global, int joint) { return 3 * (global - a) + joint; };
    const auto in_window = [&](int global) { return global >= a && global <= b; };

    // Constant objective Hessian: the jerk sum is 0.5 x'Hx + (linear) + const.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nv, nv);
    for (const auto& row : jerk_rows)
        for (int t = 0; t < 3; ++t)
            for (int j1 = 0; j1 < 5; ++j1) {
                if (!in_window(row.start + j1)) continue;
                for (int j2 = 0; j2 < 5; ++j2) {
                    if (!in_window(row.start + j2)) continue;
                    H(col_of(row.start + j1, t), col_of(row.start + j2, t)) +=
                        2.0 * model.weights[t] * row.w[j1] * row.w[j2];
                }
            }

    // Objective = jerk sum over the affected range; J_local = the [a, b]
    // part of it, which is what the result reports.
    const auto j_objective = [&]() {
        double sum = 0.0;
        for (const auto& row : jerk_rows) {
            const Vec3 jerk = detail::apply_row(row, work);
            sum += jerk.dot(model.weights.asDiagonal() * jerk);
        }
        return sum;
    };
    const auto j_local = [&]() {
        double sum = 0.0;
        for (int i = a; i <= b; ++i) {
            const Vec3 jerk = detail::apply_row(jerk_rows[i - e_lo], work);
            sum += jerk.dot(model.weights.asDiagonal() * jerk);
        }
        return sum;
    };
    const auto grad_objective = [&]() {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(nv);
        for (const auto& row : jerk_rows) {
            const Vec3 jerk = detail::apply_row(row, work);
            for (int t = 0; t < 3; ++t)
                for (int j = 0; j < 5; ++j)
                    if (in_window(row.start + j))
                        g[col_of(row.start + j, t)] +=
                            2.0 * model.weights[t] * row.w[j] * jerk[t];
        }
        return g;
    };

    // Nonlinear constraint residuals at the working point.
    const auto eq_violation = [&]() {
        double v = 0.0;
        for (int i = a; i <= b; ++i) {
            const ToolPose pose = forward_kinematics(model, work[i]);
            v = std::max(v, (pose.p - path.waypoints[i].p).cwiseAbs().maxCoeff());
        }
        return v;
    };
    const auto merit_infeasibility = [&]() {
        double v = 0.0;
        for (int i = a; i <= b; ++i) {
            const ToolPose pose = forward_kinematics(model, work[i]);
            v += (pose.p - path.waypoints[i].p).cwiseAbs().sum();
            v += std::max(0.0, evaluate_indicator(indicator, work[i]) +
                                   params.indicator_margin);
            for (int t = 0; t < 3; ++t) {
                const auto wb =
                    detail::wrapped_bounds(work[i].q[t], model.q_min[t], model.q_max[t]);
                if (!wb.active) continue;
                v += std::max(0.0, work[i].q[t] - wb.hi);
                v += std::max(0.0, wb.lo - work[i].q[t]);
            }
        }
        for (int i = e_lo; i <= e_hi; ++i) {
            const Vec3 vel = detail::apply_row(vel_rows[i - e_lo], work).cwiseAbs();
            const Vec3 acc = detail::apply_row(acc_rows[i - e_lo], work).cwiseAbs();
            v += (vel - model.v_max).cwiseMax(0.0).sum();
            v += (acc - model.a_max).cwiseMax(0.0).sum();
        }
        return v;
    };
    const auto max_ineq_violation = [&]() {
        double v = 0.0;
        for (int i = a; i <= b; ++i) {
            v = std::max(v, evaluate_indicator(indicator, work[i]) + params.indicator_margin);
            for (int t = 0; t < 3; ++t) {
                const auto wb =
                    detail::wrapped_bounds(work[i].q[t], model.q_min[t], model.q_max[t]);
                if (!wb.active) continue;
                v = std::max(v, work[i].q[t] - wb.hi);
                v = std::max(v, wb.lo - work[i].q[t]);
            }
        }
        for (int i = e_lo; i <= e_hi; ++i) {
            const Vec3 vel = detail::apply_row(vel_rows[i - e_lo], work).cwiseAbs();
            const Vec3 acc = detail::apply_row(acc_rows[i - e_lo], work).cwiseAbs();
            v = std::max(v, (vel - model.v_max).maxCoeff());
            v = std::max(v, (acc - model.a_max).maxCoeff());
        }
        return v;
    };

    FilterResult res;
    res.j_local_before = j_local();
    res.segment.assign(traj.configs.begin() + a, traj.configs.begin() + b + 1);
    const double affected_before = jerk_sum_range(traj, model, e_lo, e_hi);

    double mu = 10.0;
    bool solver_ok = false;

    for (int sqp = 0; sqp < params.max_sqp_iters; ++sqp) {
        // Assemble the QP in step coordinates around the working point.
        QpProblem qp;
        qp.H = H;
        qp.g = grad_objective();

        qp.A.resize(2 * s, nv);
        qp.A.setZero();
        qp.b.resize(2 * s);
        for (int i = a; i <= b; ++i) {
            const ToolPose pose = forward_kinematics(model, work[i]);
            const Eigen::Matrix3d J = jacobian(model, work[i]);
            for (int r = 0; r < 2; ++r) {
                for (int t = 0; t < 3; ++t) qp.A(2 * (i - a) + r, col_of(i, t)) = J(r, t);
                qp.b[2 * (i - a) + r] = path.waypoints[i].p[r] - pose.p[r];
            }
        }

        std::vector<Eigen::VectorXd> c_rows;
        std::vector<double> c_rhs;
        const auto add_ineq = [&](const Eigen::VectorXd& row, double rhs) {
            c_rows.push_back(row);
            c_rhs.push_back(rhs);
        };
        for (int i = e_lo; i <= e_hi; ++i) {
            for (int which = 0; which < 2; ++which) {
                const auto& row = which == 0 ? vel_rows[i - e_lo] : acc_rows[i - e_lo];
                const Vec3 limit = which == 0 ? model.v_max : model.a_max;
                const Vec3 value = detail::apply_row(row, work);
                for (int t = 0; t < 3; ++t) {
                    Eigen::VectorXd r = Eigen::VectorXd::Zero(nv);
                    bool touches = false;
                    for (int j = 0; j < 5; ++j)
                        if (in_window(row.start + j)) {
                            r[col_of(row.start + j, t)] = row.w[j];
                            touches = true;
                        }
                    if (!touches) continue;
                    add_ineq(r, limit[t] - value[t]);
                    add_ineq(-r, limit[t] + value[t]);
                }
            }
        }
        for (int i = a; i <= b; ++i) {
            for (int t = 0; t < 3; ++t) {
                const auto wb =
                    detail::wrapped_bounds(work[i].q[t], model.q_min[t], model.q_max[t]);
                if (!wb.active) continue;
                Eigen::VectorXd r = Eigen::VectorXd::Zero(nv);
                r[col_of(i, t)] = 1.0;
                add_ineq(r, wb.hi - work[i].q[t]);
                add_ineq(-r, work[i].q[t] - wb.lo);
            }
            const double gval = evaluate_indicator(indicator, work[i]);
            const Vec3 ggrad = gradient_indicator(indicator, work[i]);
            Eigen::VectorXd r = Eigen::VectorXd::Zero(nv);
            for (int t = 0; t < 3; ++t) r[col_of(i, t)] = ggrad[t];
            add_ineq(r, -params.indicator_margin - gval);
        }
        qp.C.resize(static_cast<int>(c_rows.size()), nv);
        qp.d.resize(static_cast<int>(c_rows.size()));
        for (int r = 0; r < static_cast<int>(c_rows.size()); ++r) {
            qp.C.row(r) = c_rows[r].transpose();
            qp.d[r] = c_rhs[r];
        }

        QpResult step = solve_qp(qp);
#ifdef JP_FILTER_TRACE
        std::printf("sqp qp conv=%d iters=%d\n", (int)step.converged, step.iterations);
#endif
        if (!step.converged) {
            // Elastic relaxation: one shared slack on the inequalities with a
            // heavy linear penalty; a positive slack at the optimum means the
            // subproblem is genuinely infeasible.
            QpProblem relaxed;
            const int nr = nv + 1;
            relaxed.H = Eigen::MatrixXd::Zero(nr, nr);
            relaxed.H.topLeftCorner(nv, nv) = qp.H;
            relaxed.H(nv, nv) = 1.0;
            relaxed.g = Eigen::VectorXd::Zero(nr);
            relaxed.g.head(nv) = qp.g;
            relaxed.g[nv] = 1e8;
            relaxed.A = Eigen::MatrixXd::Zero(qp.A.rows(), nr);
            relaxed.A.leftCols(nv) = qp.A;
            relaxed.b = qp.b;
            relaxed.C = Eigen::MatrixXd::Zero(qp.C.rows() + 1, nr);
            relaxed.C.topLeftCorner(qp.C.rows(), nv) = qp.C;
            relaxed.C.col(nv).head(qp.C.rows()).setConstant(-1.0);
            relaxed.C(qp.C.rows(), nv) = -1.0;  // slack >= 0
            relaxed.d.resize(qp.C.rows() + 1);
            relaxed.d.head(qp.C.rows()) = qp.d;
            relaxed.d[qp.C.rows()] = 0.0;
            const QpResult rstep = solve_qp(relaxed);
#ifdef JP_FILTER_TRACE
            std::printf("  elastic conv=%d slack=%.3g\n", (int)rstep.converged,
                        rstep.converged ? rstep.x[nv] : -1.0);
#endif
            if (!rstep.converged || rstep.x[nv] > 1e-7) break;  // infeasible window
            step.x = rstep.x.head(nv);
            step.y = rstep.y;
            step.z = rstep.z.head(qp.C.rows());
            step.converged = true;
        }

        const Eigen::VectorXd& dx = step.x;
        const double step_norm = dx.cwiseAbs().maxCoeff();

        // Penalty parameter tracks the multipliers.
        double mult_norm = 0.0;
        if (step.y.size() > 0) mult_norm = std::max(mult_norm, step.y.cwiseAbs().maxCoeff());
        if (step.z.size() > 0) mult_norm = std::max(mult_norm, step.z.cwiseAbs().maxCoeff());
        mu = std::max(mu, 2.0 * mult_norm + 1.0);

        const double f0 = j_objective();
        const double infeas0 = merit_infeasibility();
        const double merit0 = f0 + mu * infeas0;
        const double descent = qp.g.dot(dx) - mu * infeas0;

        const std::vector<JointConfig> backup(work.begin() + a, work.begin() + b + 1);
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 25; ++ls) {
            for (int i = a; i <= b; ++i)
                for (int t = 0; t < 3; ++t)
                    work[i].q[t] = backup[i - a].q[t] + alpha * dx[col_of(i, t)];
            const double merit = j_objective() + mu * merit_infeasibility();
            if (merit <= merit0 + 1e-4 * alpha * std::min(descent, 0.0) + 1e-14 * (1.0 + merit0)) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            for (int i = a; i <= b; ++i) work[i] = backup[i - a];
#ifdef JP_FILTER_TRACE
            std::printf("  ls FAILED merit0=%.8g descent=%.3g\n", merit0, descent);
#endif
            break;
        }
        solver_ok = true;

        // Convergence: feasible, stationary, and no meaningful step left.
        // The exact quadratic objective lets Newton steps polish to machine
        // precision, which keeps repeated filter calls idempotent.
        if (eq_violation() <= params.eq_tol && max_ineq_violation() <= params.ineq_tol) {
            const Eigen::VectorXd grad = grad_objective();
            Eigen::VectorXd kkt = grad;
            kkt += qp.A.transpose() * step.y;
            kkt += qp.C.transpose() * step.z;
            const double kkt_res = kkt.cwiseAbs().maxCoeff();
            const double scale = 1.0 + grad.cwiseAbs().maxCoeff();
            if (kkt_res <= params.kkt_tol * scale && alpha * step_norm <= 1e-10) break;
        }
        if (alpha * step_norm <= 1e-14) break;
    }

    if (!solver_ok) return res;

    // Final acceptance: hard feasibility, strict decrease, and the
    // affected-range guard.
#ifdef JP_FILTER_TRACE
    std::printf("final eq=%.3g ineq=%.3g Jb=%.8g Ja=%.8g\n", eq_violation(),
                max_ineq_violation(), res.j_local_before, j_local());
#endif
    if (eq_violation() > params.eq_tol) return res;
    if (max_ineq_violation() > params.ineq_tol) return res;
    const double j_after = j_local();
    if (!(res.j_local_before - j_after >=
          params.rel_decrease * std::max(res.j_local_before, 1e-300)))
        return res;

    Trajectory cand = traj;
    for (int i = a; i <= b; ++i) cand.configs[i] = work[i];
    const double affected_after = jerk_sum_range(cand, model, e_lo, e_hi);
    if (affected_after > affected_before * (1.0 + 1e-12) + 1e-15) return res;

    res.success = true;
    res.j_local_after = j_after;
    res.segment.assign(work.begin() + a, work.begin() + b + 1);
    return res;
}

struct OptimizeParams {
    int d = 5;
    int d_max = 20;
    int max_iters = 100;
    FilterParams filter;
};

struct IterationRecord {
    int iter = 0;
    int center = 0;
    int d = 0;
    int window_a = 0;  // final window tried this iteration
    int window_b = 0;
    bool success = false;
    double j_local_before = 0.0;
    double j_local_after = 0.0;
    double j_global = 0.0;
    Vec3 max_jerk = Vec3::Zero();
};

struct OptimizeResult {
    Trajectory trajectory;
    std::vector<IterationRecord> log;
    double j_initial = 0.0;
    double j_final = 0.0;
    int iterations = 0;
    int accepted = 0;
    bool jerk_limit_met = false;  // componentwise, over every waypoint
};

/// Greedy jerk optimization: repeatedly pick the free waypoint with the
/// largest weighted jerk that still violates the jerk limit, filter a window
/// around it, grow the window on failure, and lock the window once the
/// largest size fails too. A later successful window frees the points it
/// covers. Stops when no free waypoint violates the limit or the iteration
/// budget runs out.
inline OptimizeResult optimize_trajectory(const Trajectory& traj, const PathTask& path,
                                          const RobotModel& model,
                                          const IndicatorModel& indicator,
                                          const OptimizeParams& params = {}) {
    const int m = static_cast<int>(traj.size());
    if (m < 5) throw PathTooShortError("trajectory has fewer than 5 waypoints");
    if (params.d < 1 || params.d_max < params.d)
        throw InvalidInputError("window margins must satisfy 1 <= d <= d_max");

    OptimizeResult out;
    out.trajectory = traj;
    MotionProfile prof = evaluate_profile(out.trajectory, model);
    out.j_initial = prof.total_squared_jerk;

    std::vector<char> locked(m, 0);

    const auto select_center = [&]() {
        int best = -1;
        double best_norm = -1.0;
        for (int i = 0; i < m; ++i) {
            if (locked[i]) continue;
            if (!((prof.jerk[i].cwiseAbs().array() > model.j_max.array()).any())) continue;
            const double norm =
                std::sqrt(prof.jerk[i].dot(model.weights.asDiagonal() * prof.jerk[i]));
            if (norm > best_norm) {
                best_norm = norm;
                best = i;
            }
        }
        return best;
    };
    const auto clamp_window = [&](int center, int d) {
        FilterWindow w;
        w.a = center - d;
        w.b = center + d;
        if (w.a < 2) {
            w.a = 2;
            w.b = std::min(2 + 2 * d, m - 3);
        }
        if (w.b > m - 3) {
            w.b = m - 3;
            w.a = std::max(m - 3 - 2 * d, 2);
        }
        return w;
    };

    int center = select_center();
    while (center >= 0 && out.iterations < params.max_iters) {
        ++out.iterations;
        bool success = false;
        int d = params.d;
        FilterWindow window = clamp_window(center, d);
        FilterResult fr;
        while (!success && d <= params.d_max) {
            window = clamp_window(center, d);
            fr = local_filter(out.trajectory, window, path, model, indicator, params.filter);
            if (fr.success) {
                success = true;
                for (int i = window.a; i <= window.b; ++i) {
                    out.trajectory.configs[i] = fr.segment[i - window.a];
                    locked[i] = 0;
                }
                prof = evaluate_profile(out.trajectory, model);
                ++out.accepted;
            } else {
                d += 5;
            }
        }
        if (!success) {
            for (int i = window.a; i <= window.b; ++i) locked[i] = 1;
            // A center clamped outside its own window (path ends) has no
            // other admissible window left; lock it as well.
            locked[center] = 1;
        }

        IterationRecord rec;
        rec.iter = out.iterations;
        rec.center = center;
        rec.d = success ? d : params.d_max;
        rec.window_a = window.a;
        rec.window_b = window.b;
        rec.success = success;
        rec.j_local_before = fr.j_local_before;
        rec.j_local_after = success ? fr.j_local_after : fr.j_local_before;
        rec.j_global = prof.total_squared_jerk;
        rec.max_jerk = prof.max_abs_jerk();
        out.log.push_back(rec);

        center = select_center();
    }

    out.j_final = prof.total_squared_jerk;
    out.jerk_limit_met = !((prof.max_abs_jerk().array() > model.j_max.array()).any());
    return out;
}

}  // namespace jerkplan
