#pragma once

#include "jerkplan/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace jerkplan {

/// Finite-difference weights over a five-point window. Applying the weights
/// to q_{i-2..i+2} (in index order) approximates the order-th derivative of
/// the quartic interpolant at the evaluation time.
struct Stencil {
    int center_index = 0;
    std::array<double, 5> weights{};
    int order = 0;

    Vec3 apply(const std::array<Vec3, 5>& q) const {
        Vec3 d = Vec3::Zero();
        for (int j = 0; j < 5; ++j) d += weights[j] * q[j];
        return d;
    }
};

namespace detail {

inline void check_times(const std::array<double, 5>& times) {
    for (int i = 1; i < 5; ++i) {
        if (!(times[i] > times[i - 1]))
            throw DegenerateTimesError("interpolation times must be strictly increasing");
        if (times[i] - times[i - 1] < 1e-9)
            throw DegenerateTimesError("interpolation times are too close together");
    }
}

inline bool uniform_spacing(const std::array<double, 5>& times, double& h) {
    h = times[1] - times[0];
    for (int i = 2; i < 5; ++i)
        if (times[i] - times[i - 1] != h) return false;
    return true;
}

}  // namespace detail

/// Coefficients of the five Lagrange basis polynomials B_j on the given
/// times: column j holds the powers-of-t coefficients of B_j, so that
/// B_j(t_k) = delta_jk. Computed as the inverse of the Vandermonde matrix.
inline Eigen::Matrix<double, 5, 5> interpolation_basis(const std::array<double, 5>& times) {
    detail::check_times(times);
    Eigen::Matrix<double, 5, 5> vand;
    for (int r = 0; r < 5; ++r) {
        double p = 1.0;
        for (int k = 0; k < 5; ++k) {
            vand(r, k) = p;
            p *= times[r];
        }
    }
    return vand.fullPivLu().inverse();
}

/// Evaluates basis polynomial j (column of `basis`) at t.
inline double evaluate_basis(const Eigen::Matrix<double, 5, 5>& basis, int j, double t) {
    double v = 0.0, p = 1.0;
    for (int k = 0; k < 5; ++k) {
        v += basis(k, j) * p;
        p *= t;
    }
    return v;
}

/// Derivative weights from the general Vandermonde route, with no special
/// casing. Times are shifted so the evaluation point is zero before the
/// inversion, which keeps the system well conditioned: the order-th
/// derivative at zero is then order! times one coefficient row.
inline Stencil derivative_stencil_general(const std::array<double, 5>& times, int order,
                                          double t_eval) {
    detail::check_times(times);
    if (order < 1 || order > 3) throw InvalidInputError("stencil order must be 1, 2, or 3");
    if (t_eval < times[0] || t_eval > times[4])
        throw InvalidInputError("evaluation time outside the stencil window");

    Eigen::Matrix<double, 5, 5> vand;
    for (int r = 0; r < 5; ++r) {
        const double s = times[r] - t_eval;
        double p = 1.0;
        for (int k = 0; k < 5; ++k) {
            vand(r, k) = p;
            p *= s;
        }
    }
    // Row `order` of the inverse, scaled by order!.
    const Eigen::Matrix<double, 5, 1> rhs = Eigen::Matrix<double, 5, 1>::Unit(order);
    const Eigen::Matrix<double, 5, 1> row = vand.transpose().fullPivLu().solve(rhs);
    double fact = 1.0;
    for (int k = 2; k <= order; ++k) fact *= k;

    Stencil st;
    st.order = order;
    for (int j = 0; j < 5; ++j) st.weights[j] = fact * row[j];
    return st;
}

/// Weights of the order-th derivative of the quartic interpolant at t_eval.
/// A uniformly spaced window evaluated at its center takes the closed-form
/// central-difference path; order 3 gives (-1, 2, 0, -2, 1) / (2 h^3).
inline Stencil derivative_stencil(const std::array<double, 5>& times, int order,
                                  double t_eval) {
    double h = 0.0;
    if (detail::uniform_spacing(times, h) && t_eval == times[2]) {
        detail::check_times(times);
        Stencil st;
        st.order = order;
        switch (order) {
            case 1: {
                const double d = 12.0 * h;
                st.weights = {1.0 / d, -8.0 / d, 0.0, 8.0 / d, -1.0 / d};
                return st;
            }
            case 2: {
                const double d = 12.0 * h * h;
                st.weights = {-1.0 / d, 16.0 / d, -30.0 / d, 16.0 / d, -1.0 / d};
                return st;
            }
            case 3: {
                const double d = 2.0 * h * h * h;
                st.weights = {-1.0 / d, 2.0 / d, 0.0, -2.0 / d, 1.0 / d};
                return st;
            }
            default:
                throw InvalidInputError("stencil order must be 1, 2, or 3");
        }
    }
    return derivative_stencil_general(times, order, t_eval);
}

/// Five-point window used for waypoint i of an M-point path: centered for
/// interior points, shifted to the nearest complete window at the ends.
inline int stencil_window_start(int i, int m) {
    int s = i - 2;
    if (s < 0) s = 0;
    if (s > m - 5) s = m - 5;
    return s;
}

/// Per-waypoint derivative estimates plus the weighted total squared jerk.
struct MotionProfile {
    std::vector<Vec3> velocity;
    std::vector<Vec3> acceleration;
    std::vector<Vec3> jerk;
    double total_squared_jerk = 0.0;  // sum_i ||jerk_i||^2_W

    Vec3 max_abs_jerk() const {
        Vec3 m = Vec3::Zero();
        for (const auto& j : jerk) m = m.cwiseMax(j.cwiseAbs());
        return m;
    }
    Vec3 max_abs_velocity() const {
        Vec3 m = Vec3::Zero();
        for (const auto& v : velocity) m = m.cwiseMax(v.cwiseAbs());
        return m;
    }
    Vec3 max_abs_acceleration() const {
        Vec3 m = Vec3::Zero();
        for (const auto& a : acceleration) m = m.cwiseMax(a.cwiseAbs());
        return m;
    }
};

/// Velocity, acceleration, and jerk at every waypoint of the trajectory,
/// and the global objective J = sum_i ||jerk_i||^2_W. Interior points use
/// centered five-point stencils; the first two and last two points use the
/// nearest complete window evaluated at their own time.
inline MotionProfile evaluate_profile(const Trajectory& traj, const RobotModel& model) {
    const int m = static_cast<int>(traj.size());
    if (m < 5) throw PathTooShortError("trajectory has fewer than 5 waypoints");

    MotionProfile prof;
    prof.velocity.resize(m);
    prof.acceleration.resize(m);
    prof.jerk.resize(m);

    for (int i = 0; i < m; ++i) {
        const int s = stencil_window_start(i, m);
        std::array<double, 5> times;
        std::array<Vec3, 5> window;
        for (int j = 0; j < 5; ++j) {
            times[j] = traj.times[s + j];
            window[j] = traj.configs[s + j].q;
        }
        const double t = traj.times[i];
        prof.velocity[i] = derivative_stencil(times, 1, t).apply(window);
        prof.acceleration[i] = derivative_stencil(times, 2, t).apply(window);
        prof.jerk[i] = derivative_stencil(times, 3, t).apply(window);
        prof.total_squared_jerk += prof.jerk[i].dot(model.weights.asDiagonal() * prof.jerk[i]);
    }
    return prof;
}

}  // namespace jerkplan
