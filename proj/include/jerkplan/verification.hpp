#pragma once

#include "jerkplan/collision.hpp"
#include "jerkplan/derivatives.hpp"
#include "jerkplan/kinematics.hpp"
#include "jerkplan/types.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace jerkplan {

struct Repair {
    int index = 0;
    double deviation_inf = 0.0;  // infinity-norm joint change of the repair
};

struct RepairReport {
    std::vector<Repair> repaired;
    std::vector<int> unrepairable;
    Vec3 residual_max_jerk = Vec3::Zero();

    bool clean() const { return repaired.empty() && unrepairable.empty(); }
};

struct VerifyResult {
    Trajectory trajectory;
    RepairReport report;
};

/// All collision-free IK solutions at waypoint `wp` over headings sampled at
/// the repair step pi/500, expressed next to `reference` (so the
/// infinity-norm deviation reads on circular differences).
inline std::vector<JointConfig> repair_candidates(const RobotModel& model, const Scene& scene,
                                                  const Waypoint& wp,
                                                  const JointConfig& reference) {
    std::vector<JointConfig> cands;
    const double step = kPi / 500.0;
    for (int k = 0; k < 1000; ++k) {
        const double theta = -kPi + k * step;
        for (const auto& sol : inverse_kinematics(model, ToolPose{wp.p, theta})) {
            if (check_collision(scene, model, sol).colliding) continue;
            JointConfig adj;
            adj.q = reference.q + circular_distance(reference, sol);
            cands.push_back(adj);
        }
    }
    return cands;
}

/// Exact post-optimization check: every waypoint is verified against the
/// geometric oracle. A colliding configuration is replaced by the dense
/// heading re-sampling candidate with the smallest infinity-norm deviation;
/// if no collision-free candidate exists the index is reported as
/// unrepairable and the trajectory keeps the colliding configuration.
/// Repairs are applied in index order and never touch non-colliding
/// waypoints. Residual jerk after repairs is reported, not re-optimized.
inline VerifyResult verify_and_repair(const Trajectory& traj, const PathTask& path,
                                      const RobotModel& model, const Scene& scene) {
    if (traj.size() != path.size())
        throw InvalidInputError("trajectory and path have different lengths");

    VerifyResult out;
    out.trajectory = traj;
    for (int i = 0; i < static_cast<int>(traj.size()); ++i) {
        if (!check_collision(scene, model, out.trajectory.configs[i]).colliding) continue;

        const auto cands =
            repair_candidates(model, scene, path.waypoints[i], out.trajectory.configs[i]);
        if (cands.empty()) {
            out.report.unrepairable.push_back(i);
            continue;
        }
        double best = std::numeric_limits<double>::infinity();
        const JointConfig* pick = nullptr;
        for (const auto& c : cands) {
            const double dev = (c.q - out.trajectory.configs[i].q).cwiseAbs().maxCoeff();
            if (dev < best) {
                best = dev;
                pick = &c;
            }
        }
        out.trajectory.configs[i] = *pick;
        out.report.repaired.push_back({i, best});
    }

    if (traj.size() >= 5)
        out.report.residual_max_jerk =
            evaluate_profile(out.trajectory, model).max_abs_jerk();
    return out;
}

}  // namespace jerkplan
