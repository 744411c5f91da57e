#pragma once

#include "jerkplan/types.hpp"

#include <array>
#include <cmath>

namespace jerkplan {

/// Tip position plus tool heading of the planar arm.
struct ToolPose {
    Vec2 p = Vec2::Zero();
    double phi = 0.0;
};

struct Quaternion {
    double x = 0.0, y = 0.0, z = 0.0, w = 1.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }
};

/// Rotation of `theta` about the unit axis `n_hat`:
/// (n_hat * sin(theta/2), cos(theta/2)).
inline Quaternion quaternion_from_axis_angle(const Vec3& n_hat, double theta) {
    if (std::abs(n_hat.norm() - 1.0) > 1e-9)
        throw InvalidInputError("rotation axis must be a unit vector");
    const double half = 0.5 * theta;
    const double s = std::sin(half);
    return Quaternion{n_hat[0] * s, n_hat[1] * s, n_hat[2] * s, std::cos(half)};
}

/// Positions of the four chain points: base, elbow, wrist, tip.
inline std::array<Vec2, 4> link_points(const RobotModel& model, const JointConfig& c) {
    std::array<Vec2, 4> pts;
    pts[0] = model.base;
    double cum = 0.0;
    for (int k = 0; k < 3; ++k) {
        cum += c.q[k];
        pts[k + 1] = pts[k] + model.link_lengths[k] * Vec2(std::cos(cum), std::sin(cum));
    }
    return pts;
}

inline ToolPose forward_kinematics(const RobotModel& model, const JointConfig& c) {
    const auto pts = link_points(model, c);
    return ToolPose{pts[3], c.q.sum()};
}

/// Smallest signed angular difference b - a, componentwise in (-pi, pi].
inline Vec3 circular_distance(const JointConfig& a, const JointConfig& b) {
    return Vec3(normalize_angle(b.q[0] - a.q[0]), normalize_angle(b.q[1] - a.q[1]),
                normalize_angle(b.q[2] - a.q[2]));
}

/// 3x3 Jacobian of forward kinematics. Rows: d(p_x)/dq, d(p_y)/dq, d(phi)/dq.
inline Eigen::Matrix3d jacobian(const RobotModel& model, const JointConfig& c) {
    Eigen::Matrix3d J;
    double cum = 0.0;
    std::array<double, 3> cums;
    for (int k = 0; k < 3; ++k) {
        cum += c.q[k];
        cums[k] = cum;
    }
    // Joint j moves all links k >= j.
    for (int j = 0; j < 3; ++j) {
        double dx = 0.0, dy = 0.0;
        for (int k = j; k < 3; ++k) {
            dx -= model.link_lengths[k] * std::sin(cums[k]);
            dy += model.link_lengths[k] * std::cos(cums[k]);
        }
        J(0, j) = dx;
        J(1, j) = dy;
        J(2, j) = 1.0;
    }
    return J;
}

/// Analytic IK for the planar 3R chain. The wrist target is the tip moved
/// back along the heading by the last link; the remaining 2R problem has at
/// most two elbow branches. Branches are ordered elbow-up (q2 <= 0) first.
/// Configurations outside [q_min, q_max] are dropped. Unreachable targets
/// yield an empty list.
inline std::vector<JointConfig> inverse_kinematics(const RobotModel& model,
                                                   const ToolPose& pose) {
    const double l1 = model.link_lengths[0];
    const double l2 = model.link_lengths[1];
    const double l3 = model.link_lengths[2];
    const Vec2 wrist = pose.p - l3 * Vec2(std::cos(pose.phi), std::sin(pose.phi));
    const Vec2 rel = wrist - model.base;
    const double r2 = rel.squaredNorm();

    double cos_q2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    if (cos_q2 > 1.0) {
        if (cos_q2 > 1.0 + 1e-9) return {};
        cos_q2 = 1.0;
    } else if (cos_q2 < -1.0) {
        if (cos_q2 < -1.0 - 1e-9) return {};
        cos_q2 = -1.0;
    }
    const double elbow = std::acos(cos_q2);

    std::vector<JointConfig> out;
    const double heading = std::atan2(rel[1], rel[0]);
    const int n_branch = (elbow > 0.0) ? 2 : 1;  // tangent reach: branches coincide
    for (int b = 0; b < n_branch; ++b) {
        const double q2 = (b == 0) ? -elbow : elbow;
        const double q1 = heading - std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
        const double q3 = pose.phi - q1 - q2;
        JointConfig c = normalize_angles(JointConfig(q1, q2, q3));
        if ((c.q.array() < model.q_min.array()).any() ||
            (c.q.array() > model.q_max.array()).any())
            continue;
        out.push_back(c);
    }
    return out;
}

}  // namespace jerkplan
