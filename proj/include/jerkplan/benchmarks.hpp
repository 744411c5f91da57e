#pragma once

#include "jerkplan/types.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace jerkplan {

/// A named benchmark problem: robot, workspace, and timed waypoint path.
struct Benchmark {
    std::string name;
    RobotModel model;
    Scene scene;
    PathTask path;
};

namespace bench_detail {

inline RobotModel default_arm() {
    RobotModel m;
    m.link_lengths = Vec3(1.0, 0.8, 0.6);
    m.base = Vec2(0.0, 0.0);
    m.link_radius = 0.02;
    m.q_min = Vec3(-kPi, -kPi, -kPi);
    m.q_max = Vec3(kPi, kPi, kPi);
    m.weights = Vec3(1.0, 1.0, 1.0);
    return m;
}

inline Polygon box(double x0, double y0, double x1, double y1) {
    return Polygon{Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
}

/// Waypoints walking a polyline surface at uniform arclength with uniform
/// time spacing h.
inline PathTask walk_surface(const Polyline& surface, int count, double h) {
    std::vector<double> cum{0.0};
    for (std::size_t i = 0; i + 1 < surface.size(); ++i)
        cum.push_back(cum.back() + (surface[i + 1] - surface[i]).norm());
    const double total = cum.back();

    PathTask path;
    for (int i = 0; i < count; ++i) {
        const double s = total * i / (count - 1);
        std::size_t seg = 0;
        while (seg + 2 < cum.size() && cum[seg + 1] < s) ++seg;
        const double local = (s - cum[seg]) / std::max(cum[seg + 1] - cum[seg], 1e-300);
        Waypoint wp;
        wp.t = h * i;
        wp.p = surface[seg] + local * (surface[seg + 1] - surface[seg]);
        path.waypoints.push_back(wp);
    }
    return path;
}

/// Arc around the base from angle psi0 to psi1 with a varying radius. Paths
/// running near the reach limit squeeze the feasible heading cone around the
/// outward direction, so the graph stage is forced to hop between heading
/// samples as the cone rotates - the jerky initializations the filter is
/// for.
inline Benchmark arc_benchmark(const std::string& name, double psi0, double psi1,
                               const std::function<double(double)>& radius, int waypoints,
                               double h) {
    Benchmark b;
    b.name = name;
    b.model = default_arm();

    Polyline surface;
    const int segs = 2000;
    for (int i = 0; i <= segs; ++i) {
        const double s = static_cast<double>(i) / segs;
        const double psi = psi0 + (psi1 - psi0) * s;
        surface.emplace_back(radius(s) * std::cos(psi), radius(s) * std::sin(psi));
    }
    b.scene.surface = surface;
    b.path = walk_surface(surface, waypoints, h);
    return b;
}

}  // namespace bench_detail

/// 500 waypoints on a 140-degree arc whose radius breathes twice between
/// 1.92 and 2.12: the feasible heading cone rotates across more than its
/// own width, so the initialization must hop between heading samples. Near
/// the reach limit the arm is almost radial, which leaves no room for
/// obstacles; the scene ships without any.
inline Benchmark benchmark_wave() {
    Benchmark b = bench_detail::arc_benchmark(
        "wave", 150.0 * kPi / 180.0, 10.0 * kPi / 180.0,
        [](double s) { return 2.02 + 0.10 * std::sin(2.0 * kTwoPi * s); }, 500, 0.1);
    b.model.v_max = Vec3(2.2, 2.2, 2.2);
    b.model.a_max = Vec3(40.0, 40.0, 40.0);
    b.model.j_max = Vec3(10.0, 10.0, 10.0);
    return b;
}

/// 200 waypoints on a straight mid-reach pass over staggered fence pickets:
/// above each picket the straight-down heading is blocked, so the
/// initialization hops between heading samples while the links route around
/// the pickets. A ceiling slab caps the from-above headings.
inline Benchmark benchmark_fence() {
    Benchmark b;
    b.name = "fence";
    b.model = bench_detail::default_arm();
    b.model.v_max = Vec3(2.0, 2.0, 2.0);
    b.model.a_max = Vec3(40.0, 40.0, 40.0);
    b.model.j_max = Vec3(10.0, 10.0, 10.0);

    Polyline surface{Vec2(-0.55, 1.25), Vec2(0.55, 1.25)};
    b.scene.surface = surface;
    b.scene.obstacles.push_back(bench_detail::box(-0.8, 1.55, 0.8, 1.85));   // ceiling
    b.scene.obstacles.push_back(bench_detail::box(-1.05, 0.85, -0.82, 1.5));  // left wall
    b.scene.obstacles.push_back(bench_detail::box(0.82, 0.85, 1.05, 1.5));    // right wall
    for (const double cx : {-0.3, 0.0, 0.3})
        b.scene.obstacles.push_back(bench_detail::box(cx - 0.03, 0.55, cx + 0.03, 0.95));
    b.path = bench_detail::walk_surface(surface, 200, 0.1);
    return b;
}

/// 1000 waypoints, radius rippling six times between 1.86 and 2.14 over a
/// 130-degree sweep: the heading cone rotates and breathes, forcing heading
/// hops all along the path.
inline Benchmark benchmark_ripple() {
    Benchmark b = bench_detail::arc_benchmark(
        "ripple", 150.0 * kPi / 180.0, 20.0 * kPi / 180.0,
        [](double s) { return 2.0 + 0.14 * std::sin(6.0 * kTwoPi * s); }, 1000, 0.1);
    b.model.v_max = Vec3(2.5, 2.5, 2.5);
    b.model.a_max = Vec3(50.0, 50.0, 50.0);
    b.model.j_max = Vec3(10.0, 10.0, 10.0);
    return b;
}

/// Straight pass between corridor walls with a ceiling slab, 200 waypoints.
/// The scene used for collision-indication learning.
inline Benchmark benchmark_corridor() {
    Benchmark b;
    b.name = "corridor";
    b.model = bench_detail::default_arm();
    b.model.v_max = Vec3(2.0, 2.0, 2.0);
    b.model.a_max = Vec3(12.0, 12.0, 12.0);
    b.model.j_max = Vec3(10.0, 10.0, 10.0);

    Polyline surface{Vec2(-0.55, 1.25), Vec2(0.55, 1.25)};
    b.scene.surface = surface;
    b.scene.obstacles.push_back(bench_detail::box(-0.75, 1.62, 0.75, 1.92));  // ceiling
    b.scene.obstacles.push_back(bench_detail::box(-1.15, 0.85, -0.92, 1.5));  // left wall
    b.scene.obstacles.push_back(bench_detail::box(0.92, 0.85, 1.15, 1.5));    // right wall
    // Slab under the path: steep downward headings collide, shallow ones
    // clear it, and configurations perturbed off the contact space reach it
    // before pure contact samples ever see it.
    b.scene.obstacles.push_back(bench_detail::box(-0.25, 0.8, 0.25, 0.95));
    b.path = bench_detail::walk_surface(surface, 200, 0.1);
    return b;
}

/// A square frame encloses the tool path; the only opening is a slot in the
/// bottom wall placed so the last link can enter at headings near 3*pi/8
/// only. The n = 4 and n = 8 heading grids miss the slot; n = 16 samples
/// 3*pi/8 itself.
inline Benchmark benchmark_pinch() {
    Benchmark b;
    b.name = "pinch";
    b.model = bench_detail::default_arm();
    b.model.v_max = Vec3(2.0, 2.0, 2.0);
    b.model.a_max = Vec3(12.0, 12.0, 12.0);
    b.model.j_max = Vec3(50.0, 50.0, 50.0);

    // Frame around the tip region, walls 0.04 thick, half-size 0.35/0.31.
    b.scene.obstacles.push_back(bench_detail::box(-0.35, 1.56, 0.35, 1.60));    // top
    b.scene.obstacles.push_back(bench_detail::box(-0.35, 0.90, -0.31, 1.60));   // left
    b.scene.obstacles.push_back(bench_detail::box(0.31, 0.90, 0.35, 1.60));     // right
    // Bottom wall with the slot: a heading of 3*pi/8 crosses y = 0.92 at
    // x ~ -0.137 for a tip at the center (0, 1.25).
    b.scene.obstacles.push_back(bench_detail::box(-0.35, 0.90, -0.197, 0.94));
    b.scene.obstacles.push_back(bench_detail::box(-0.077, 0.90, 0.35, 0.94));

    Polyline surface{Vec2(-0.01, 1.25), Vec2(0.01, 1.25)};
    b.scene.surface = surface;
    b.path = bench_detail::walk_surface(surface, 8, 0.1);
    return b;
}

/// Trivial five-waypoint straight path in an empty scene.
inline Benchmark benchmark_trivial() {
    Benchmark b;
    b.name = "trivial";
    b.model = bench_detail::default_arm();
    Polyline surface{Vec2(-0.1, 1.2), Vec2(0.1, 1.2)};
    b.scene.surface = surface;
    b.path = bench_detail::walk_surface(surface, 5, 0.1);
    return b;
}

inline Benchmark make_benchmark(const std::string& name) {
    if (name == "wave") return benchmark_wave();
    if (name == "fence") return benchmark_fence();
    if (name == "ripple") return benchmark_ripple();
    if (name == "corridor") return benchmark_corridor();
    if (name == "pinch") return benchmark_pinch();
    if (name == "trivial") return benchmark_trivial();
    throw InvalidInputError("unknown benchmark: " + name);
}

inline std::vector<std::string> benchmark_names() {
    return {"wave", "fence", "ripple", "corridor", "pinch", "trivial"};
}

/// The three scenes with deliberately jerky graph initializations; the jerk
/// reduction and dense-baseline comparisons run on these.
inline std::vector<std::string> jerk_benchmark_names() {
    return {"wave", "fence", "ripple"};
}

}  // namespace jerkplan
