#pragma once

#include "jerkplan/collision.hpp"
#include "jerkplan/kinematics.hpp"
#include "jerkplan/svm.hpp"
#include "jerkplan/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace jerkplan {

inline constexpr double kContactTol = 1e-6;

/// A joint configuration labeled by the exact oracle: +1 collision, -1 free.
struct LabeledSample {
    JointConfig q;
    int label = -1;
    bool on_contact = false;
};

/// Learned approximation of the collision-indication function: negative
/// values predict collision-free. The stored bias already carries the
/// conservative shift epsilon.
struct IndicatorModel {
    struct Kernel {
        Vec3 q;
        double alpha;  // alpha_i * y_i of the support vector
    };
    std::vector<Kernel> kernels;
    double gamma = 0.7;
    double bias = 0.0;
};

inline double evaluate_indicator(const IndicatorModel& ind, const JointConfig& c) {
    double v = ind.bias;
    for (const auto& k : ind.kernels)
        v += k.alpha * std::exp(-ind.gamma * circular_sqdist(k.q, c.q));
    return v;
}

inline Vec3 gradient_indicator(const IndicatorModel& ind, const JointConfig& c) {
    Vec3 g = Vec3::Zero();
    for (const auto& k : ind.kernels) {
        Vec3 d;
        for (int t = 0; t < 3; ++t) d[t] = normalize_angle(c.q[t] - k.q[t]);
        g += k.alpha * (-2.0 * ind.gamma) * std::exp(-ind.gamma * d.squaredNorm()) * d;
    }
    return g;
}

struct ProjectionResult {
    bool converged = false;
    JointConfig q;
};

/// Projects a configuration onto the contact space (tool tip on the working
/// surface). Damped Gauss-Newton steps through the position Jacobian
/// pseudo-inverse restore contact; once on contact, steps in the null space
/// of the scalar contact constraint (surface normal through the Jacobian)
/// walk back toward the start, so the result is the locally closest contact
/// configuration. The constraint is dist(f(q), S) = 0, one scalar: its
/// tangent space includes sliding the tip along the surface.
inline ProjectionResult project_to_contact(const RobotModel& model, const JointConfig& start,
                                           const Polyline& surface, int max_iters = 100,
                                           double damping = 0.5) {
    JointConfig c = start;
    JointConfig best_contact = start;
    bool have_contact = false;
    double best_dist = std::numeric_limits<double>::infinity();
    int stalled = 0;
    int restorations = 0;
    // The restoration budget is max_iters; polish passes are bounded
    // separately since each one costs a handful of restorations.
    for (int pass = 0; pass < 4 * max_iters; ++pass) {
        const ToolPose pose = forward_kinematics(model, c);
        const auto [target, tangent] = geom::closest_point_and_tangent(pose.p, surface);
        const Vec2 err = pose.p - target;
        const Eigen::Matrix3d J = jacobian(model, c);
        const Eigen::Matrix<double, 2, 3> Jp = J.topRows<2>();

        if (err.norm() <= kContactTol) {
            const double moved = (c.q - start.q).norm();
            if (moved < best_dist - 1e-12) {
                best_dist = moved;
                best_contact = c;
                have_contact = true;
                stalled = 0;
            } else if (++stalled > 20) {
                return {true, best_contact};  // equilibrium at the facet scale
            }
            const Vec2 normal(-tangent[1], tangent[0]);
            const Eigen::Matrix<double, 1, 3> row = normal.transpose() * Jp;
            const double rr = row.squaredNorm();
            if (rr < 1e-18) return {true, best_contact};
            const Vec3 back = start.q - c.q;
            Vec3 step = back - row.transpose() * (row.dot(back) / rr);
            if (step.norm() <= 1e-10 * (1.0 + back.norm())) return {true, c};
            if (step.norm() > 0.5) step *= 0.5 / step.norm();
            c.q += step;
            continue;  // the next pass restores contact if the step left it
        }

        if (++restorations > max_iters) break;
        const Eigen::Matrix2d JJt = Jp * Jp.transpose();
        if (std::abs(JJt.determinant()) < 1e-14) break;
        c.q -= damping * (Jp.transpose() * JJt.inverse() * err);
    }
    if (have_contact) return {true, best_contact};
    const ToolPose pose = forward_kinematics(model, c);
    if (geom::point_polyline_distance(pose.p, surface) <= kContactTol) return {true, c};
    return {false, c};
}

struct SamplingParams {
    int m_init = 200;         // initial contact samples
    double tau_alpha = 0.8;   // up-scaling density threshold
    double tau_beta = 0.05;   // boundary refinement threshold
    int knn = 20;             // neighbor count
    int budget = 5000;        // total sample cap
    double projection_rate = 0.5;
};

/// One midpoint insertion during sampling, for diagnostics and tests.
struct InsertionRecord {
    enum Kind { kUpScaling, kRefinement };
    Kind kind = kUpScaling;
    int from = 0;       // index of the sample that spawned the midpoint
    int toward = 0;     // index of its neighbor
    bool projected = false;
};

namespace detail {

/// k nearest neighbors of samples[idx] among the first `count` samples
/// (the snapshot of the current round), circular metric, brute force.
inline std::vector<int> k_nearest(const std::vector<LabeledSample>& samples, int idx, int k,
                                  int count) {
    std::vector<std::pair<double, int>> d;
    d.reserve(count);
    for (int t = 0; t < count; ++t) {
        if (t == idx) continue;
        d.emplace_back(circular_sqdist(samples[idx].q.q, samples[t].q.q), t);
    }
    const int kk = std::min<int>(k, static_cast<int>(d.size()));
    std::partial_sort(d.begin(), d.begin() + kk, d.end());
    std::vector<int> out(kk);
    for (int t = 0; t < kk; ++t) out[t] = d[t].second;
    return out;
}

/// One random contact configuration: a random surface point, a random
/// heading, and a random IK branch. Empty when the pose is unreachable.
inline std::optional<JointConfig> random_contact_config(const RobotModel& model,
                                                        const Polyline& surface,
                                                        std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    // Pick a segment weighted by length, then a point along it.
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < surface.size(); ++i)
        total += (surface[i + 1] - surface[i]).norm();
    if (total <= 0.0) throw InvalidInputError("surface polyline has zero length");
    double pick = u01(rng) * total;
    Vec2 point = surface.back();
    for (std::size_t i = 0; i + 1 < surface.size(); ++i) {
        const double len = (surface[i + 1] - surface[i]).norm();
        if (pick <= len) {
            point = surface[i] + (pick / len) * (surface[i + 1] - surface[i]);
            break;
        }
        pick -= len;
    }
    const double theta = -kPi + kTwoPi * u01(rng);
    const auto sols = inverse_kinematics(model, ToolPose{point, theta});
    if (sols.empty()) return std::nullopt;
    const std::size_t branch = std::min<std::size_t>(
        static_cast<std::size_t>(u01(rng) * sols.size()), sols.size() - 1);
    return sols[branch];
}

}  // namespace detail

/// Adaptive contact-centered sample generation. Starts from m random contact
/// samples, then alternates up-scaling (midpoints toward sparse neighbors of
/// contact samples) and boundary refinement (midpoints toward opposite-label
/// neighbors), with half of the new midpoints projected back onto contact.
/// Rounds repeat until no insertion happens or the budget is reached.
inline std::vector<LabeledSample> generate_training_set(const RobotModel& model,
                                                        const Polyline& surface,
                                                        const Scene& scene,
                                                        const SamplingParams& params,
                                                        std::mt19937_64& rng,
                                                        std::vector<InsertionRecord>* log = nullptr) {
    if (params.m_init < 1) throw InvalidInputError("need at least one initial sample");
    if (!(params.tau_beta < params.tau_alpha))
        throw InvalidInputError("tau_beta must be below tau_alpha");
    if (params.budget < params.m_init)
        throw InvalidInputError("budget must cover the initial samples");

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const auto label_of = [&](const JointConfig& c) {
        return check_collision(scene, model, c).colliding ? 1 : -1;
    };
    const auto on_contact = [&](const JointConfig& c) {
        return distance_to_surface(model, c, surface) < kContactTol;
    };

    std::vector<LabeledSample> samples;
    samples.reserve(params.budget);
    // Initialization: contact samples only. Bounded retries guard surfaces
    // that are entirely out of reach.
    const long max_tries = 200L * params.m_init;
    long tries = 0;
    while (static_cast<int>(samples.size()) < params.m_init && tries < max_tries) {
        ++tries;
        const auto c = detail::random_contact_config(model, surface, rng);
        if (!c) continue;
        samples.push_back({*c, label_of(*c), true});
    }
    if (samples.empty())
        throw EmptySampleSetError("no reachable configuration found on the surface");

    const auto insert_midpoint = [&](int from, int toward, InsertionRecord::Kind kind) {
        if (static_cast<int>(samples.size()) >= params.budget) return false;
        const JointConfig& a = samples[from].q;
        const JointConfig& b = samples[toward].q;
        JointConfig mid;
        mid.q = a.q + 0.5 * circular_distance(a, b);
        mid = normalize_angles(mid);
        bool contact = false;
        bool projected = false;
        if (u01(rng) >= 1.0 - params.projection_rate) {
            const auto proj = project_to_contact(model, mid, surface);
            if (!proj.converged) return false;  // discard failed projections
            mid = normalize_angles(proj.q);
            contact = true;
            projected = true;
        } else {
            contact = on_contact(mid);
        }
        samples.push_back({mid, label_of(mid), contact});
        if (log) log->push_back({kind, from, toward, projected});
        return true;
    };

    bool inserted = true;
    while (inserted && static_cast<int>(samples.size()) < params.budget) {
        inserted = false;
        // Up-scaling round over a snapshot of the current samples.
        const int count_up = static_cast<int>(samples.size());
        for (int idx = 0; idx < count_up; ++idx) {
            if (static_cast<int>(samples.size()) >= params.budget) break;
            if (!samples[idx].on_contact) continue;
            for (int nb : detail::k_nearest(samples, idx, params.knn, count_up)) {
                const double dist =
                    std::sqrt(circular_sqdist(samples[idx].q.q, samples[nb].q.q));
                if (dist > params.tau_alpha)
                    inserted |= insert_midpoint(idx, nb, InsertionRecord::kUpScaling);
            }
        }
        // Refinement round: only toward opposite-label neighbors.
        const int count_ref = static_cast<int>(samples.size());
        for (int idx = 0; idx < count_ref; ++idx) {
            if (static_cast<int>(samples.size()) >= params.budget) break;
            if (!samples[idx].on_contact) continue;
            for (int nb : detail::k_nearest(samples, idx, params.knn, count_ref)) {
                const double dist =
                    std::sqrt(circular_sqdist(samples[idx].q.q, samples[nb].q.q));
                if (dist > params.tau_beta && samples[nb].label != samples[idx].label)
                    inserted |= insert_midpoint(idx, nb, InsertionRecord::kRefinement);
            }
        }
    }
    return samples;
}

/// Trains the RBF-SVM indicator and applies the conservative bias shift.
inline IndicatorModel train_indicator(const std::vector<LabeledSample>& samples,
                                      double gamma = 0.7, double C = 10.0,
                                      double epsilon = 1.0) {
    std::vector<Vec3> points;
    std::vector<int> labels;
    points.reserve(samples.size());
    labels.reserve(samples.size());
    for (const auto& s : samples) {
        points.push_back(s.q.q);
        labels.push_back(s.label);
    }
    const SvmModel svm = train_rbf_svm(points, labels, gamma, C);

    IndicatorModel ind;
    ind.gamma = gamma;
    ind.bias = svm.bias + epsilon;
    ind.kernels.reserve(svm.centers.size());
    for (std::size_t i = 0; i < svm.centers.size(); ++i)
        ind.kernels.push_back({svm.centers[i], svm.coeffs[i]});
    return ind;
}

struct TnrResult {
    std::optional<double> tnr;  // empty when the set has no truly-free samples
    long true_negatives = 0;   // predicted free and really collision-free
    long false_positives = 0;  // predicted colliding, yet really collision-free
    long predicted_free = 0;
};

/// True-negative ratio TNR = TN / (TN + FP): TN counts samples with a
/// negative indicator value that are really collision-free, FP counts
/// samples with a non-negative value that would nevertheless not lead to
/// collision or contact. Equivalently, the fraction of the truly
/// collision-free samples that the indicator certifies as free - blanket
/// conservatism costs TNR here.
inline TnrResult evaluate_tnr(const IndicatorModel& ind,
                              const std::vector<LabeledSample>& verification) {
    TnrResult r;
    for (const auto& s : verification) {
        const bool pred_free = evaluate_indicator(ind, s.q) < 0.0;
        if (pred_free) ++r.predicted_free;
        if (s.label < 0) {
            if (pred_free)
                ++r.true_negatives;
            else
                ++r.false_positives;
        }
    }
    if (r.true_negatives + r.false_positives > 0)
        r.tnr = static_cast<double>(r.true_negatives) /
                static_cast<double>(r.true_negatives + r.false_positives);
    return r;
}

}  // namespace jerkplan
