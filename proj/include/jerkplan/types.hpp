#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace jerkplan {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Input validation failures (bad arguments, malformed data).
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Interpolation times too close together to invert the Vandermonde system.
struct DegenerateTimesError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Fewer than five waypoints; five-point stencils cannot be formed.
struct PathTooShortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SVM training set contains a single class.
struct DegenerateTrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Contact sampling found no reachable configuration anywhere on the surface.
struct EmptySampleSetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File could not be read, written, or parsed.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point in the joint space of the planar 3-link arm.
struct JointConfig {
    Vec3 q = Vec3::Zero();

    JointConfig() = default;
    explicit JointConfig(const Vec3& v) : q(v) {}
    JointConfig(double q1, double q2, double q3) : q(q1, q2, q3) {}
};

/// A time-stamped task-space constraint: the tool tip must be at `p` at time
/// `t`. The heading is the redundant degree of freedom; `heading_phase`
/// offsets the rotational sampling grid at this waypoint (used by `perturb`).
struct Waypoint {
    double t = 0.0;
    Vec2 p = Vec2::Zero();
    bool free_heading = true;
    double heading_phase = 0.0;
};

struct PathTask {
    std::vector<Waypoint> waypoints;

    std::size_t size() const { return waypoints.size(); }
};

/// Planar 3-link serial chain with hardware limits. Limits are per joint;
/// `weights` is the diagonal of the joint-importance matrix W.
struct RobotModel {
    Vec3 link_lengths = Vec3(1.0, 1.0, 1.0);
    Vec2 base = Vec2::Zero();
    double link_radius = 0.02;
    Vec3 q_min = Vec3(-kPi, -kPi, -kPi);
    Vec3 q_max = Vec3(kPi, kPi, kPi);
    Vec3 v_max = Vec3(2.0, 2.0, 2.0);
    Vec3 a_max = Vec3(10.0, 10.0, 10.0);
    Vec3 j_max = Vec3(50.0, 50.0, 50.0);
    Vec3 weights = Vec3(1.0, 1.0, 1.0);
};

/// Joint configurations aligned one-to-one with the waypoint times of a
/// PathTask. Angles are stored unwrapped (continuous across waypoints) so
/// finite differences never see 2-pi jumps.
struct Trajectory {
    std::vector<JointConfig> configs;
    std::vector<double> times;

    std::size_t size() const { return configs.size(); }
};

using Polygon = std::vector<Vec2>;   // simple polygon, counter-clockwise or clockwise
using Polyline = std::vector<Vec2>;  // >= 2 vertices

/// Workspace: polygonal obstacles plus the working surface the tool traces.
struct Scene {
    std::vector<Polygon> obstacles;
    Polyline surface;
};

/// Maps an angle into (-pi, pi].
inline double normalize_angle(double a) {
    double y = std::fmod(a + kPi, kTwoPi);
    if (y <= 0.0) y += kTwoPi;
    return y - kPi;
}

/// Componentwise normalization into (-pi, pi]. Idempotent.
inline JointConfig normalize_angles(const JointConfig& c) {
    return JointConfig(normalize_angle(c.q[0]), normalize_angle(c.q[1]),
                       normalize_angle(c.q[2]));
}

/// Throws unless the path has at least five strictly time-ordered waypoints
/// with finite positions.
inline void validate_path(const PathTask& path) {
    if (path.size() < 5)
        throw PathTooShortError("path has " + std::to_string(path.size()) +
                                " waypoints; at least 5 are required");
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!path.waypoints[i].p.allFinite())
            throw InvalidInputError("waypoint position is not finite");
        if (i > 0 && !(path.waypoints[i].t > path.waypoints[i - 1].t))
            throw InvalidInputError("waypoint times must be strictly increasing");
    }
}

inline void validate_model(const RobotModel& m) {
    if (!(m.link_lengths.minCoeff() > 0.0))
        throw InvalidInputError("link lengths must be positive");
    if (m.link_radius < 0.0)
        throw InvalidInputError("link radius must be non-negative");
    if (!((m.q_min.array() < m.q_max.array()).all()))
        throw InvalidInputError("q_min must be componentwise below q_max");
    if (!(m.v_max.minCoeff() > 0.0 && m.a_max.minCoeff() > 0.0 && m.j_max.minCoeff() > 0.0))
        throw InvalidInputError("velocity/acceleration/jerk limits must be positive");
    if (m.weights.minCoeff() < 0.0)
        throw InvalidInputError("joint weights must be non-negative");
}

}  // namespace jerkplan
