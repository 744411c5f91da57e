#pragma once

#include "jerkplan/kinematics.hpp"
#include "jerkplan/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jerkplan {

namespace geom {

inline Vec2 closest_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return a;
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return a + t * ab;
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    return (p - closest_point_on_segment(a, b, p)).norm();
}

inline double cross2(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

inline bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const double d1 = cross2(q2 - q1, p1 - q1);
    const double d2 = cross2(q2 - q1, p2 - q1);
    const double d3 = cross2(p2 - p1, q1 - p1);
    const double d4 = cross2(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    // Collinear / endpoint-touching cases fall through to the distance test.
    return false;
}

inline double segment_segment_distance(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                                       const Vec2& q2) {
    if (segments_intersect(p1, p2, q1, q2)) return 0.0;
    double d = point_segment_distance(p1, q1, q2);
    d = std::min(d, point_segment_distance(p2, q1, q2));
    d = std::min(d, point_segment_distance(q1, p1, p2));
    d = std::min(d, point_segment_distance(q2, p1, p2));
    return d;
}

/// Even-odd rule; points exactly on the boundary are resolved by the
/// distance tests of the callers, never by this predicate alone.
inline bool point_in_polygon(const Vec2& p, const Polygon& poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a[1] > p[1]) != (b[1] > p[1])) {
            const double x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if (p[0] < x) inside = !inside;
        }
    }
    return inside;
}

inline double segment_polygon_boundary_distance(const Vec2& a, const Vec2& b,
                                                const Polygon& poly) {
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        d = std::min(d, segment_segment_distance(a, b, poly[j], poly[i]));
        if (d == 0.0) return 0.0;
    }
    return d;
}

inline double point_polyline_distance(const Vec2& p, const Polyline& line) {
    if (line.size() == 1) return (p - line[0]).norm();
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.size(); ++i)
        d = std::min(d, point_segment_distance(p, line[i], line[i + 1]));
    return d;
}

inline Vec2 closest_point_on_polyline(const Vec2& p, const Polyline& line) {
    if (line.size() == 1) return line[0];
    Vec2 best = line[0];
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        const Vec2 c = closest_point_on_segment(line[i], line[i + 1], p);
        const double dc = (p - c).squaredNorm();
        if (dc < d) {
            d = dc;
            best = c;
        }
    }
    return best;
}

/// Closest point plus the unit direction of the segment it lies on.
inline std::pair<Vec2, Vec2> closest_point_and_tangent(const Vec2& p, const Polyline& line) {
    if (line.size() == 1) return {line[0], Vec2(1.0, 0.0)};
    Vec2 best = line[0];
    Vec2 tangent(1.0, 0.0);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        const Vec2 c = closest_point_on_segment(line[i], line[i + 1], p);
        const double dc = (p - c).squaredNorm();
        if (dc < d) {
            d = dc;
            best = c;
            const Vec2 seg = line[i + 1] - line[i];
            tangent = seg.norm() > 0.0 ? Vec2(seg.normalized()) : Vec2(1.0, 0.0);
        }
    }
    return {best, tangent};
}

inline double point_polygon_boundary_distance(const Vec2& p, const Polygon& poly) {
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        d = std::min(d, point_segment_distance(p, poly[j], poly[i]));
    return d;
}

/// Signed distance from a capsule (segment a-b inflated by radius r) to a
/// simple polygon. Positive when separated, zero when touching, negative
/// when penetrating. Penetration depth for contained segments is measured
/// from the deeper endpoint.
inline double capsule_polygon_clearance(const Vec2& a, const Vec2& b, double r,
                                        const Polygon& poly) {
    const bool a_in = point_in_polygon(a, poly);
    const bool b_in = point_in_polygon(b, poly);
    if (a_in || b_in) {
        double pen = 0.0;
        if (a_in) pen = std::max(pen, point_polygon_boundary_distance(a, poly));
        if (b_in) pen = std::max(pen, point_polygon_boundary_distance(b, poly));
        return -(pen + r);
    }
    // Both endpoints outside: crossing segments hit distance zero.
    return segment_polygon_boundary_distance(a, b, poly) - r;
}

}  // namespace geom

/// Result of an exact geometric collision query.
struct CollisionReport {
    bool colliding = false;
    double clearance = std::numeric_limits<double>::infinity();
};

/// Exact oracle: each link is a capsule of the model's link radius; the
/// configuration collides when any capsule touches or penetrates any
/// obstacle polygon. Clearance is the smallest capsule-to-polygon signed
/// distance over all link/obstacle pairs.
inline CollisionReport check_collision(const Scene& scene, const RobotModel& model,
                                       const JointConfig& c) {
    CollisionReport rep;
    if (scene.obstacles.empty()) return rep;
    const auto pts = link_points(model, c);
    for (int k = 0; k < 3; ++k) {
        for (const auto& poly : scene.obstacles) {
            const double cl =
                geom::capsule_polygon_clearance(pts[k], pts[k + 1], model.link_radius, poly);
            rep.clearance = std::min(rep.clearance, cl);
        }
    }
    rep.colliding = rep.clearance <= 0.0;
    return rep;
}

/// Euclidean distance from the tool tip at configuration c to the nearest
/// point of the working surface polyline.
inline double distance_to_surface(const RobotModel& model, const JointConfig& c,
                                  const Polyline& surface) {
    if (surface.empty()) throw InvalidInputError("surface polyline is empty");
    const ToolPose pose = forward_kinematics(model, c);
    return geom::point_polyline_distance(pose.p, surface);
}

}  // namespace jerkplan
