#pragma once

#include "jerkplan/collision.hpp"
#include "jerkplan/kinematics.hpp"
#include "jerkplan/types.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace jerkplan {

/// Exact collision predicate used to admit graph nodes.
using CollisionOracle = std::function<bool(const JointConfig&)>;

inline CollisionOracle make_scene_oracle(const Scene& scene, const RobotModel& model) {
    return [&scene, &model](const JointConfig& c) {
        return check_collision(scene, model, c).colliding;
    };
}

/// Per-waypoint columns of collision-free IK solutions, connected step to
/// step by joint-velocity-feasible transitions. Edges are defined by the
/// model's velocity limits and waypoint times; `edges_at` materializes the
/// outgoing edges of one step on demand.
struct LadderGraph {
    std::vector<std::vector<JointConfig>> ladders;
    std::vector<double> times;
    int n = 0;  // heading samples per waypoint

    struct Edge {
        int from = 0;
        int to = 0;
        double weight = 0.0;
    };

    std::size_t steps() const { return ladders.empty() ? 0 : ladders.size() - 1; }
};

/// Velocity feasibility of a transition: the componentwise
/// circular joint difference over the time gap must stay within v_max.
inline bool edge_feasible(const RobotModel& model, const JointConfig& a,
                          const JointConfig& b, double dt) {
    const Vec3 d = circular_distance(a, b).cwiseAbs();
    return (d.array() <= model.v_max.array() * dt).all();
}

/// Transition cost w = dq^T W dq with dq the circular difference.
inline double edge_weight(const RobotModel& model, const JointConfig& a,
                          const JointConfig& b) {
    const Vec3 d = circular_distance(a, b);
    return d.dot(model.weights.asDiagonal() * d);
}

inline std::vector<LadderGraph::Edge> edges_at(const LadderGraph& g, const RobotModel& model,
                                               std::size_t step) {
    std::vector<LadderGraph::Edge> edges;
    const double dt = g.times[step + 1] - g.times[step];
    const auto& from = g.ladders[step];
    const auto& to = g.ladders[step + 1];
    for (int j = 0; j < static_cast<int>(from.size()); ++j)
        for (int k = 0; k < static_cast<int>(to.size()); ++k)
            if (edge_feasible(model, from[j], to[k], dt))
                edges.push_back({j, k, edge_weight(model, from[j], to[k])});
    return edges;
}

/// All collision-free IK solutions for one waypoint over n uniformly spaced
/// headings theta_k = -pi + 2*pi*k/n (plus the waypoint's phase offset).
/// Doubling n refines the same dyadic grid, so coarser ladders are strict
/// subsets of finer ones.
inline std::vector<JointConfig> build_ladder(const RobotModel& model, const Waypoint& wp,
                                             int n, const CollisionOracle& oracle) {
    std::vector<JointConfig> ladder;
    for (int k = 0; k < n; ++k) {
        const double theta = normalize_angle(-kPi + kTwoPi * k / n + wp.heading_phase);
        for (const auto& c : inverse_kinematics(model, ToolPose{wp.p, theta}))
            if (!oracle(c)) ladder.push_back(c);
    }
    return ladder;
}

inline LadderGraph build_graph(const RobotModel& model, const PathTask& path, int n,
                               const CollisionOracle& oracle) {
    LadderGraph g;
    g.n = n;
    g.ladders.reserve(path.size());
    g.times.reserve(path.size());
    for (const auto& wp : path.waypoints) {
        g.ladders.push_back(build_ladder(model, wp, n, oracle));
        g.times.push_back(wp.t);
    }
    return g;
}

/// Outcome of the multi-source shortest-path search.
struct GraphSearchResult {
    bool found = false;
    Trajectory trajectory;           // normalized configs, one per waypoint
    double transition_cost = 0.0;    // sum of edge weights along the path
    int first_infeasible_ladder = -1;  // first empty or unreachable ladder on failure
};

/// Multi-source Dijkstra over the ladder graph: every node of the first
/// ladder is a source with zero cost, and the result is traced back from the
/// cheapest node of the last ladder. Edges only connect consecutive ladders,
/// so relaxation sweeps the ladders front to back; ties resolve to the
/// lowest node index.
inline GraphSearchResult shortest_trajectory(const LadderGraph& g, const RobotModel& model) {
    GraphSearchResult res;
    const int m = static_cast<int>(g.ladders.size());
    if (m == 0) return res;

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> cost(m);
    std::vector<std::vector<int>> parent(m);
    for (int i = 0; i < m; ++i) {
        cost[i].assign(g.ladders[i].size(), kInf);
        parent[i].assign(g.ladders[i].size(), -1);
    }
    if (g.ladders[0].empty()) {
        res.first_infeasible_ladder = 0;
        return res;
    }
    for (auto& c0 : cost[0]) c0 = 0.0;

    for (int i = 0; i + 1 < m; ++i) {
        const double dt = g.times[i + 1] - g.times[i];
        const auto& from = g.ladders[i];
        const auto& to = g.ladders[i + 1];
        bool reached = false;
        for (int j = 0; j < static_cast<int>(from.size()); ++j) {
            if (cost[i][j] == kInf) continue;
            for (int k = 0; k < static_cast<int>(to.size()); ++k) {
                if (!edge_feasible(model, from[j], to[k], dt)) continue;
                const double c = cost[i][j] + edge_weight(model, from[j], to[k]);
                // Strict improvement only: with ascending j, ties keep the
                // lowest parent index.
                if (c < cost[i + 1][k]) {
                    cost[i + 1][k] = c;
                    parent[i + 1][k] = j;
                    reached = true;
                }
            }
        }
        if (!reached) {
            res.first_infeasible_ladder = i + 1;
            return res;
        }
    }

    int best = -1;
    double best_cost = kInf;
    for (int k = 0; k < static_cast<int>(cost[m - 1].size()); ++k) {
        if (cost[m - 1][k] < best_cost) {
            best_cost = cost[m - 1][k];
            best = k;
        }
    }
    if (best < 0) {
        res.first_infeasible_ladder = m - 1;
        return res;
    }

    res.found = true;
    res.transition_cost = best_cost;
    res.trajectory.times = g.times;
    res.trajectory.configs.resize(m);
    int node = best;
    for (int i = m - 1; i >= 0; --i) {
        res.trajectory.configs[i] = g.ladders[i][node];
        node = parent[i][node];
    }
    return res;
}

/// Re-expresses each configuration next to its predecessor so joint angles
/// are continuous across waypoints (no winding jumps in the differences).
inline Trajectory unwrap_trajectory(const Trajectory& traj) {
    Trajectory out = traj;
    for (std::size_t i = 1; i < out.configs.size(); ++i)
        out.configs[i].q =
            out.configs[i - 1].q + circular_distance(out.configs[i - 1], out.configs[i]);
    return out;
}

struct InitialPlanResult {
    bool found = false;
    Trajectory trajectory;  // unwrapped
    double transition_cost = 0.0;
    int n_used = 0;
    int first_infeasible_ladder = -1;  // diagnostic from the final attempt
};

/// Resolution-doubling initialization: searches the ladder graph at
/// n = n_start, doubling until a path is found or n exceeds n_cap.
inline InitialPlanResult plan_initial(const RobotModel& model, const PathTask& path,
                                      const CollisionOracle& oracle, int n_start = 4,
                                      int n_cap = 512) {
    if (n_cap < n_start) throw InvalidInputError("n_cap must be at least n_start");
    InitialPlanResult res;
    for (int n = n_start; n <= n_cap; n *= 2) {
        const LadderGraph g = build_graph(model, path, n, oracle);
        const GraphSearchResult sr = shortest_trajectory(g, model);
        res.n_used = n;
        res.first_infeasible_ladder = sr.first_infeasible_ladder;
        if (sr.found) {
            res.found = true;
            res.trajectory = unwrap_trajectory(sr.trajectory);
            res.transition_cost = sr.transition_cost;
            return res;
        }
    }
    return res;
}

}  // namespace jerkplan
