#include "jerkplan/benchmarks.hpp"
#include "jerkplan/jerk_filter.hpp"
#include "jerkplan/ladder_graph.hpp"
#include "jerkplan/pipeline.hpp"

#include <catch2/catch.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace jerkplan;

namespace {

/// Straight-line task with a deliberately zig-zag but exactly feasible
/// initialization: alternating headings, elbow-up IK branch.
struct ZigzagSetup {
    RobotModel model;
    PathTask path;
    Trajectory traj;
};

ZigzagSetup make_zigzag(int m = 15, double wiggle = 0.25) {
    ZigzagSetup s;
    s.model.link_lengths = Vec3(1.0, 0.8, 0.6);
    // Limits far above anything the zig-zag produces: the velocity and
    // acceleration constraints stay inactive.
    s.model.v_max = Vec3(100.0, 100.0, 100.0);
    s.model.a_max = Vec3(5000.0, 5000.0, 5000.0);
    s.model.j_max = Vec3(5.0, 5.0, 5.0);
    for (int i = 0; i < m; ++i) {
        Waypoint wp;
        wp.t = 0.1 * i;
        wp.p = Vec2(-0.3 + 0.6 * i / (m - 1), 1.2);
        s.path.waypoints.push_back(wp);
    }
    for (int i = 0; i < m; ++i) {
        // Calm lead-in and lead-out, zig-zag in between.
        const bool calm = i < 3 || i >= m - 3;
        const double heading =
            kPi / 2.0 + (calm ? 0.0 : ((i % 2 == 0) ? wiggle : -wiggle));
        const auto sols =
            inverse_kinematics(s.model, ToolPose{s.path.waypoints[i].p, heading});
        REQUIRE(!sols.empty());
        s.traj.configs.push_back(sols[0]);
        s.traj.times.push_back(s.path.waypoints[i].t);
    }
    s.traj = unwrap_trajectory(s.traj);
    return s;
}

/// Independent oracle: equality-constrained minimization by direct KKT
/// Newton solves (task position rows only, no inequalities, no merit
/// machinery). Minimizes the same affected-range jerk sum as the filter and
/// returns the achieved value.
double equality_only_optimum(const ZigzagSetup& s, int a, int b) {
    const int m = static_cast<int>(s.traj.size());
    const int nv = 3 * (b - a + 1);
    std::vector<JointConfig> work = s.traj.configs;

    // Jerk rows over the affected range [a-2, b+2], one-sided at the ends.
    struct Row {
        int start;
        std::array<double, 5> w;
    };
    std::vector<Row> rows;
    for (int i = std::max(0, a - 2); i <= std::min(m - 1, b + 2); ++i) {
        const int start = stencil_window_start(i, m);
        std::array<double, 5> t5;
        for (int j = 0; j < 5; ++j) t5[j] = s.traj.times[start + j];
        rows.push_back({start, derivative_stencil(t5, 3, s.traj.times[i]).weights});
    }
    const auto col = [&](int g, int t) { return 3 * (g - a) + t; };
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nv, nv);
    for (const auto& r : rows)
        for (int t = 0; t < 3; ++t)
            for (int j1 = 0; j1 < 5; ++j1)
                for (int j2 = 0; j2 < 5; ++j2) {
                    const int g1 = r.start + j1, g2 = r.start + j2;
                    if (g1 < a || g1 > b || g2 < a || g2 > b) continue;
                    H(col(g1, t), col(g2, t)) += 2.0 * r.w[j1] * r.w[j2];
                }
    const auto j_local = [&]() {
        double sum = 0.0;
        for (const auto& r : rows) {
            Vec3 jerk = Vec3::Zero();
            for (int j = 0; j < 5; ++j) jerk += r.w[j] * work[r.start + j].q;
            sum += jerk.squaredNorm();
        }
        return sum;
    };

    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(nv);
        for (const auto& r : rows) {
            Vec3 jerk = Vec3::Zero();
            for (int j = 0; j < 5; ++j) jerk += r.w[j] * work[r.start + j].q;
            for (int t = 0; t < 3; ++t)
                for (int j = 0; j < 5; ++j) {
                    const int gidx = r.start + j;
                    if (gidx >= a && gidx <= b) g[col(gidx, t)] += 2.0 * r.w[j] * jerk[t];
                }
        }
        const int me = 2 * (b - a + 1);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(me, nv);
        Eigen::VectorXd rhs(me);
        for (int i = a; i <= b; ++i) {
            const ToolPose pose = forward_kinematics(s.model, work[i]);
            const Eigen::Matrix3d J = jacobian(s.model, work[i]);
            for (int r = 0; r < 2; ++r) {
                for (int t = 0; t < 3; ++t) A(2 * (i - a) + r, col(i, t)) = J(r, t);
                rhs[2 * (i - a) + r] = s.path.waypoints[i].p[r] - pose.p[r];
            }
        }
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nv + me, nv + me);
        K.topLeftCorner(nv, nv) = H + 1e-12 * Eigen::MatrixXd::Identity(nv, nv);
        K.topRightCorner(nv, me) = A.transpose();
        K.bottomLeftCorner(me, nv) = A;
        Eigen::VectorXd full_rhs(nv + me);
        full_rhs.head(nv) = -g;
        full_rhs.tail(me) = rhs;
        const Eigen::VectorXd sol = K.partialPivLu().solve(full_rhs);
        const Eigen::VectorXd dx = sol.head(nv);
        for (int i = a; i <= b; ++i)
            for (int t = 0; t < 3; ++t) work[i].q[t] += dx[col(i, t)];
        if (dx.cwiseAbs().maxCoeff() < 1e-12) break;
    }
    // Confirm the oracle itself satisfies the task constraints.
    for (int i = a; i <= b; ++i) {
        const ToolPose pose = forward_kinematics(s.model, work[i]);
        REQUIRE((pose.p - s.path.waypoints[i].p).cwiseAbs().maxCoeff() < 1e-8);
    }
    return j_local();
}

}  // namespace

TEST_CASE("local filter reaches the equality-constrained optimum") {
    const ZigzagSetup s = make_zigzag();
    const int m = static_cast<int>(s.traj.size());
    const FilterWindow window{2, m - 3};
    const IndicatorModel ind = permissive_indicator();

    const FilterResult res = local_filter(s.traj, window, s.path, s.model, ind);
    REQUIRE(res.success);
    CHECK(res.j_local_after < res.j_local_before);

    Trajectory after = s.traj;
    for (int i = window.a; i <= window.b; ++i) after.configs[i] = res.segment[i - window.a];
    const double achieved = jerk_sum_range(after, s.model, 0, m - 1);
    const double oracle = equality_only_optimum(s, window.a, window.b);
    CHECK(achieved <= oracle * (1.0 + 1e-6) + 1e-9);
    CHECK(achieved >= oracle * (1.0 - 1e-4) - 1e-9);

    // Task equality after filtering.
    for (int i = window.a; i <= window.b; ++i) {
        const ToolPose pose = forward_kinematics(s.model, res.segment[i - window.a]);
        CHECK((pose.p - s.path.waypoints[i].p).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("filter at a constrained minimum reports failure and keeps the segment") {
    const ZigzagSetup s = make_zigzag();
    const FilterWindow window{2, static_cast<int>(s.traj.size()) - 3};
    const IndicatorModel ind = permissive_indicator();

    const FilterResult first = local_filter(s.traj, window, s.path, s.model, ind);
    REQUIRE(first.success);
    Trajectory optimized = s.traj;
    for (int i = window.a; i <= window.b; ++i)
        optimized.configs[i] = first.segment[i - window.a];

    const FilterResult second = local_filter(optimized, window, s.path, s.model, ind);
    CHECK_FALSE(second.success);
    for (int i = window.a; i <= window.b; ++i)
        CHECK(second.segment[i - window.a].q == optimized.configs[i].q);
}

TEST_CASE("waypoints outside the window are bit-identical") {
    const ZigzagSetup s = make_zigzag(17);
    const FilterWindow window{4, 12};
    const IndicatorModel ind = permissive_indicator();
    const FilterResult res = local_filter(s.traj, window, s.path, s.model, ind);
    REQUIRE(res.success);
    Trajectory after = s.traj;
    for (int i = window.a; i <= window.b; ++i) after.configs[i] = res.segment[i - window.a];
    for (int i = 0; i < static_cast<int>(s.traj.size()); ++i) {
        if (i >= window.a && i <= window.b) continue;
        CHECK(after.configs[i].q[0] == s.traj.configs[i].q[0]);
        CHECK(after.configs[i].q[1] == s.traj.configs[i].q[1]);
        CHECK(after.configs[i].q[2] == s.traj.configs[i].q[2]);
    }
}

TEST_CASE("filter respects velocity and acceleration limits") {
    ZigzagSetup s = make_zigzag(15, 0.12);
    // Binding but attainable limits for the mild zig-zag.
    s.model.v_max = Vec3(3.0, 3.0, 3.0);
    s.model.a_max = Vec3(60.0, 60.0, 60.0);
    const FilterWindow window{2, static_cast<int>(s.traj.size()) - 3};
    const FilterResult res = local_filter(s.traj, window, s.path, s.model,
                                          permissive_indicator());
    REQUIRE(res.success);
    Trajectory after = s.traj;
    for (int i = window.a; i <= window.b; ++i) after.configs[i] = res.segment[i - window.a];
    const MotionProfile prof = evaluate_profile(after, s.model);
    CHECK((prof.max_abs_velocity().array() <= s.model.v_max.array() + 1e-8).all());
    CHECK((prof.max_abs_acceleration().array() <= s.model.a_max.array() + 1e-8).all());
}

TEST_CASE("optimizer leaves a within-limit trajectory unchanged") {
    // A smooth straight-line trajectory at constant heading has tiny jerk.
    ZigzagSetup s = make_zigzag(15, 0.0);
    const OptimizeResult res =
        optimize_trajectory(s.traj, s.path, s.model, permissive_indicator());
    CHECK(res.iterations == 0);
    CHECK(res.log.empty());
    CHECK(res.jerk_limit_met);
    for (std::size_t i = 0; i < s.traj.size(); ++i)
        CHECK(res.trajectory.configs[i].q == s.traj.configs[i].q);
}

TEST_CASE("optimizer reduces jerk on the zig-zag and logs monotone J") {
    const ZigzagSetup s = make_zigzag(25);
    OptimizeParams params;
    const OptimizeResult res =
        optimize_trajectory(s.traj, s.path, s.model, permissive_indicator(), params);
    CHECK(res.j_final < 0.2 * res.j_initial);
    CHECK(res.accepted > 0);

    double last = res.j_initial;
    for (const auto& rec : res.log) {
        if (!rec.success) continue;
        CHECK(rec.j_global <= last * (1.0 + 1e-9) + 1e-12);
        last = rec.j_global;
    }
}

TEST_CASE("locked points are never selected as centers") {
    const ZigzagSetup s = make_zigzag(25);
    RobotModel tight = s.model;
    tight.j_max = Vec3(1e-6, 1e-6, 1e-6);  // unattainable: forces failures and locking
    const OptimizeResult res =
        optimize_trajectory(s.traj, s.path, s.model, permissive_indicator());

    const int m = static_cast<int>(s.traj.size());
    std::vector<char> locked(m, 0);
    for (const auto& rec : res.log) {
        CHECK_FALSE(locked[rec.center]);
        if (rec.success) {
            for (int i = rec.window_a; i <= rec.window_b; ++i) locked[i] = 0;
        } else {
            for (int i = rec.window_a; i <= rec.window_b; ++i) locked[i] = 1;
            locked[rec.center] = 1;
        }
    }
}

TEST_CASE("optimizer is deterministic") {
    const ZigzagSetup s = make_zigzag(21);
    const OptimizeResult a =
        optimize_trajectory(s.traj, s.path, s.model, permissive_indicator());
    const OptimizeResult b =
        optimize_trajectory(s.traj, s.path, s.model, permissive_indicator());
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    for (std::size_t i = 0; i < a.trajectory.size(); ++i)
        CHECK(a.trajectory.configs[i].q == b.trajectory.configs[i].q);
    CHECK(a.j_final == b.j_final);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("window growth is capped and locking happens at d_max") {
    const ZigzagSetup s = make_zigzag(61);
    RobotModel impossible = s.model;
    impossible.j_max = Vec3(1e-9, 1e-9, 1e-9);
    OptimizeParams params;
    params.max_iters = 8;
    const OptimizeResult res =
        optimize_trajectory(s.traj, s.path, impossible, permissive_indicator(), params);
    // The jerk bound is unattainable: every iteration either shrinks jerk or
    // locks a d_max window.
    for (const auto& rec : res.log) {
        if (!rec.success) {
            CHECK(rec.d == params.d_max);
            CHECK(rec.window_b - rec.window_a <= 2 * params.d_max);
        }
    }
    CHECK_FALSE(res.jerk_limit_met);
}

TEST_CASE("filter keeps the exact oracle happy on the corridor benchmark") {
    const Benchmark bench = benchmark_corridor();
    PathTask head;
    head.waypoints.assign(bench.path.waypoints.begin(), bench.path.waypoints.begin() + 40);
    const auto oracle = make_scene_oracle(bench.scene, bench.model);
    const InitialPlanResult init = plan_initial(bench.model, head, oracle);
    REQUIRE(init.found);

    PipelineConfig cfg;
    cfg.m_init = 80;
    cfg.budget = 600;
    std::mt19937_64 rng(cfg.seed);
    const IndicatorModel ind = train_scene_indicator(bench.model, bench.scene, cfg, rng);

    const OptimizeResult res = optimize_trajectory(init.trajectory, head, bench.model, ind);
    CHECK(res.j_final <= res.j_initial);
    for (const auto& c : res.trajectory.configs)
        CHECK_FALSE(check_collision(bench.scene, bench.model, c).colliding);
}
