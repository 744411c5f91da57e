#include "jerkplan/benchmarks.hpp"
#include "jerkplan/ladder_graph.hpp"

#include <catch2/catch.hpp>

#include <cmath>
#include <random>

using namespace jerkplan;

namespace {

const CollisionOracle kNoCollision = [](const JointConfig&) { return false; };

/// Exhaustive enumeration over every ladder-to-ladder path, honoring the
/// velocity-feasibility rule. Returns the minimal transition cost, or
/// infinity when no path exists.
double brute_force_cost(const LadderGraph& g, const RobotModel& model) {
    const int m = static_cast<int>(g.ladders.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick(m, 0);
    const std::function<void(int, double)> recurse = [&](int step, double cost) {
        if (step == m) {
            best = std::min(best, cost);
            return;
        }
        for (int k = 0; k < static_cast<int>(g.ladders[step].size()); ++k) {
            if (step > 0) {
                const double dt = g.times[step] - g.times[step - 1];
                const auto& prev = g.ladders[step - 1][pick[step - 1]];
                if (!edge_feasible(model, prev, g.ladders[step][k], dt)) continue;
                pick[step] = k;
                recurse(step + 1, cost + edge_weight(model, prev, g.ladders[step][k]));
            } else {
                pick[step] = k;
                recurse(step + 1, 0.0);
            }
        }
    };
    recurse(0, 0.0);
    return best;
}

LadderGraph random_graph(std::mt19937_64& rng, int max_paths = 10000) {
    std::uniform_int_distribution<int> m_dist(2, 6);
    std::uniform_int_distribution<int> size_dist(1, 5);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    LadderGraph g;
    const int m = m_dist(rng);
    long paths = 1;
    for (int i = 0; i < m; ++i) {
        int size = size_dist(rng);
        while (paths * size > max_paths && size > 1) --size;
        paths *= size;
        std::vector<JointConfig> ladder;
        for (int k = 0; k < size; ++k)
            ladder.push_back(JointConfig(angle(rng), angle(rng), angle(rng)));
        g.ladders.push_back(ladder);
        g.times.push_back(0.5 * i);
    }
    return g;
}

}  // namespace

TEST_CASE("ladder size is bounded by two branches per heading") {
    RobotModel model;
    model.link_lengths = Vec3(1.0, 0.8, 0.6);
    Waypoint wp;
    wp.p = Vec2(0.6, 1.0);
    const auto ladder = build_ladder(model, wp, 4, kNoCollision);
    CHECK(!ladder.empty());
    CHECK(ladder.size() <= 8);
}

TEST_CASE("unreachable waypoint yields an empty ladder") {
    RobotModel model;
    Waypoint wp;
    wp.p = Vec2(50.0, 0.0);
    CHECK(build_ladder(model, wp, 16, kNoCollision).empty());
}

TEST_CASE("ladder matches brute-force heading x branch enumeration") {
    const Benchmark bench = benchmark_corridor();
    const auto oracle = make_scene_oracle(bench.scene, bench.model);
    const Waypoint& wp = bench.path.waypoints[40];
    const int n = 16;
    const auto ladder = build_ladder(bench.model, wp, n, oracle);

    std::vector<JointConfig> expected;
    for (int k = 0; k < n; ++k) {
        const double theta = normalize_angle(-kPi + kTwoPi * k / n);
        for (const auto& c : inverse_kinematics(bench.model, ToolPose{wp.p, theta}))
            if (!check_collision(bench.scene, bench.model, c).colliding)
                expected.push_back(c);
    }
    REQUIRE(ladder.size() == expected.size());
    for (std::size_t i = 0; i < ladder.size(); ++i)
        CHECK((ladder[i].q - expected[i].q).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(!ladder.empty());
}

TEST_CASE("heading grids nest when n doubles") {
    for (int n = 4; n <= 64; n *= 2) {
        for (int k = 0; k < n; ++k) {
            const double coarse = normalize_angle(-kPi + kTwoPi * k / n);
            bool found = false;
            for (int k2 = 0; k2 < 2 * n; ++k2)
                if (std::abs(normalize_angle(-kPi + kTwoPi * k2 / (2 * n)) - coarse) < 1e-12)
                    found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("single edge weight is the weighted squared difference") {
    RobotModel model;
    model.v_max = Vec3(10.0, 10.0, 10.0);
    LadderGraph g;
    g.times = {0.0, 1.0};
    g.ladders.resize(2);
    g.ladders[0].push_back(JointConfig(0.0, 0.0, 0.0));
    g.ladders[1].push_back(JointConfig(0.1, 0.2, 0.3));
    const auto edges = edges_at(g, model, 0);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].weight == Approx(0.14));
}

TEST_CASE("velocity limit blocks edges") {
    RobotModel model;
    model.v_max = Vec3(1.0, 1.0, 1.0);
    CHECK_FALSE(edge_feasible(model, JointConfig(0.0, 0.0, 0.0),
                              JointConfig(0.2, 0.0, 0.0), 0.1));
    CHECK(edge_feasible(model, JointConfig(0.0, 0.0, 0.0), JointConfig(0.05, 0.0, 0.0), 0.1));
}

TEST_CASE("single chain of single-node ladders") {
    RobotModel model;
    LadderGraph g;
    for (int i = 0; i < 5; ++i) {
        g.times.push_back(0.1 * i);
        g.ladders.push_back({JointConfig(0.01 * i, 0.0, 0.0)});
    }
    const GraphSearchResult res = shortest_trajectory(g, model);
    REQUIRE(res.found);
    for (int i = 0; i < 5; ++i)
        CHECK(res.trajectory.configs[i].q[0] == Approx(0.01 * i));
}

TEST_CASE("three two-node ladders match exhaustive enumeration") {
    RobotModel model;
    model.v_max = Vec3(10.0, 10.0, 10.0);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LadderGraph g;
    for (int i = 0; i < 3; ++i) {
        g.times.push_back(1.0 * i);
        g.ladders.push_back(
            {JointConfig(u(rng), u(rng), u(rng)), JointConfig(u(rng), u(rng), u(rng))});
    }
    const GraphSearchResult res = shortest_trajectory(g, model);
    REQUIRE(res.found);
    CHECK(res.transition_cost == brute_force_cost(g, model));
}

TEST_CASE("search matches exhaustive enumeration on random graphs") {
    std::mt19937_64 rng(123);
    RobotModel model;
    model.v_max = Vec3(3.0, 3.0, 3.0);  // with dt = 0.5 some edges are infeasible
    for (int trial = 0; trial < 100; ++trial) {
        const LadderGraph g = random_graph(rng);
        const double expected = brute_force_cost(g, model);
        const GraphSearchResult res = shortest_trajectory(g, model);
        if (std::isinf(expected)) {
            CHECK_FALSE(res.found);
        } else {
            REQUIRE(res.found);
            CHECK(res.transition_cost == expected);
        }
    }
}

TEST_CASE("disconnected ladders report the failing step") {
    RobotModel model;
    model.v_max = Vec3(0.5, 0.5, 0.5);
    LadderGraph g;
    g.times = {0.0, 0.1, 0.2};
    g.ladders.resize(3);
    g.ladders[0].push_back(JointConfig(0.0, 0.0, 0.0));
    g.ladders[1].push_back(JointConfig(0.01, 0.0, 0.0));
    g.ladders[2].push_back(JointConfig(2.0, 0.0, 0.0));  // unreachable jump
    const GraphSearchResult res = shortest_trajectory(g, model);
    CHECK_FALSE(res.found);
    CHECK(res.first_infeasible_ladder == 2);
}

TEST_CASE("plan_initial succeeds at n = 4 in the open scene") {
    const Benchmark bench = benchmark_trivial();
    const auto oracle = make_scene_oracle(bench.scene, bench.model);
    const InitialPlanResult res = plan_initial(bench.model, bench.path, oracle);
    REQUIRE(res.found);
    CHECK(res.n_used == 4);
    CHECK(res.trajectory.size() == bench.path.size());
}

TEST_CASE("initial trajectories are collision-free and velocity-feasible") {
    for (const std::string name : {"corridor", "fence"}) {
        const Benchmark bench = make_benchmark(name);
        const auto oracle = make_scene_oracle(bench.scene, bench.model);
        const InitialPlanResult res = plan_initial(bench.model, bench.path, oracle);
        REQUIRE(res.found);
        const Trajectory& traj = res.trajectory;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            CHECK_FALSE(check_collision(bench.scene, bench.model, traj.configs[i]).colliding);
            if (i == 0) continue;
            const double dt = traj.times[i] - traj.times[i - 1];
            const Vec3 step =
                circular_distance(traj.configs[i - 1], traj.configs[i]).cwiseAbs();
            CHECK((step.array() <= bench.model.v_max.array() * dt + 1e-12).all());
        }
    }
}

TEST_CASE("pinch benchmark needs n = 16") {
    const Benchmark bench = benchmark_pinch();
    const auto oracle = make_scene_oracle(bench.scene, bench.model);

    // Brute force at the ladder level: n = 4 and n = 8 admit no path.
    for (int n : {4, 8}) {
        const LadderGraph g = build_graph(bench.model, bench.path, n, oracle);
        CHECK_FALSE(shortest_trajectory(g, bench.model).found);
    }
    const LadderGraph g16 = build_graph(bench.model, bench.path, 16, oracle);
    CHECK(shortest_trajectory(g16, bench.model).found);

    const InitialPlanResult res = plan_initial(bench.model, bench.path, oracle);
    REQUIRE(res.found);
    CHECK(res.n_used == 16);
}

TEST_CASE("impossible scene reports failure") {
    Benchmark bench = benchmark_trivial();
    // Bury one waypoint inside a small obstacle (neighbors stay reachable).
    const Vec2 p = bench.path.waypoints[2].p;
    bench.scene.obstacles.push_back(Polygon{p + Vec2(-0.02, -0.02), p + Vec2(0.02, -0.02),
                                            p + Vec2(0.02, 0.02), p + Vec2(-0.02, 0.02)});
    const auto oracle = make_scene_oracle(bench.scene, bench.model);
    const InitialPlanResult res = plan_initial(bench.model, bench.path, oracle, 4, 64);
    CHECK_FALSE(res.found);
    CHECK(res.first_infeasible_ladder == 2);
}

TEST_CASE("transition cost is non-increasing in n") {
    const Benchmark bench = benchmark_corridor();
    const auto oracle = make_scene_oracle(bench.scene, bench.model);
    PathTask head;
    head.waypoints.assign(bench.path.waypoints.begin(), bench.path.waypoints.begin() + 30);
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 4; n <= 32; n *= 2) {
        const LadderGraph g = build_graph(bench.model, head, n, oracle);
        const GraphSearchResult res = shortest_trajectory(g, bench.model);
        if (!res.found) continue;
        CHECK(res.transition_cost <= prev + 1e-12);
        prev = res.transition_cost;
    }
    CHECK(std::isfinite(prev));
}

TEST_CASE("unwrapped trajectories have no winding jumps") {
    Trajectory traj;
    traj.times = {0.0, 0.1, 0.2};
    traj.configs = {JointConfig(3.0, 0.0, 0.0), JointConfig(-3.0, 0.0, 0.0),
                    JointConfig(3.0, 0.0, 0.0)};
    const Trajectory un = unwrap_trajectory(traj);
    CHECK(un.configs[1].q[0] == Approx(3.0 + (kTwoPi - 6.0)));
    for (std::size_t i = 1; i < un.size(); ++i)
        CHECK((un.configs[i].q - un.configs[i - 1].q).cwiseAbs().maxCoeff() < kPi);
}
