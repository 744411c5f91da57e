#pragma once

#include "jerkplan/derivatives.hpp"
#include "jerkplan/indicator.hpp"
#include "jerkplan/io.hpp"
#include "jerkplan/jerk_filter.hpp"
#include "jerkplan/ladder_graph.hpp"
#include "jerkplan/verification.hpp"

#include <chrono>
#include <optional>
#include <random>
#include <string>

namespace jerkplan {

/// Every tunable of the pipeline, with the published defaults.
struct PipelineConfig {
    int n_start = 4;
    int n_cap = 512;
    int n_dense = 360;  // 1-degree heading steps for the dense-graph baseline
    int d = 5;
    int d_max = 20;
    int max_iters = 100;
    double gamma = 0.7;
    double epsilon = 1.0;
    double tau_alpha = 0.8;
    double tau_beta = 0.05;
    int knn = 20;
    double svm_c = 400.0;
    int m_init = 200;
    int budget = 5000;
    double nearby_noise = 0.1;  // rad, verification-sample perturbation
    std::uint64_t seed = 42;
    bool timings = true;  // real wall-clock values in metrics

    OptimizeParams optimize_params() const {
        OptimizeParams p;
        p.d = d;
        p.d_max = d_max;
        p.max_iters = max_iters;
        return p;
    }
    SamplingParams sampling_params() const {
        SamplingParams p;
        p.m_init = m_init;
        p.tau_alpha = tau_alpha;
        p.tau_beta = tau_beta;
        p.knn = knn;
        p.budget = budget;
        return p;
    }
};

/// Applies overrides from a config JSON object; unknown keys are rejected.
inline void apply_config_json(PipelineConfig& cfg, const json& j) {
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "n_start") cfg.n_start = value.get<int>();
            else if (key == "n_cap") cfg.n_cap = value.get<int>();
            else if (key == "n_dense") cfg.n_dense = value.get<int>();
            else if (key == "d") cfg.d = value.get<int>();
            else if (key == "d_max") cfg.d_max = value.get<int>();
            else if (key == "max_iters") cfg.max_iters = value.get<int>();
            else if (key == "gamma") cfg.gamma = value.get<double>();
            else if (key == "epsilon") cfg.epsilon = value.get<double>();
            else if (key == "tau_alpha") cfg.tau_alpha = value.get<double>();
            else if (key == "tau_beta") cfg.tau_beta = value.get<double>();
            else if (key == "k") cfg.knn = value.get<int>();
            else if (key == "C") cfg.svm_c = value.get<double>();
            else if (key == "m") cfg.m_init = value.get<int>();
            else if (key == "budget") cfg.budget = value.get<int>();
            else if (key == "nearby_noise") cfg.nearby_noise = value.get<double>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else throw InvalidInputError("unknown config key: " + key);
        } catch (const json::exception& e) {
            throw InvalidInputError("bad config value for '" + key + "': " + e.what());
        }
    }
    if (cfg.n_start < 1 || cfg.n_cap < cfg.n_start || cfg.d < 1 || cfg.d_max < cfg.d ||
        cfg.max_iters < 0 || cfg.gamma <= 0.0 || cfg.svm_c <= 0.0 ||
        !(cfg.tau_beta < cfg.tau_alpha) || cfg.knn < 1 || cfg.m_init < 1 ||
        cfg.budget < cfg.m_init)
        throw InvalidInputError("config values out of range");
}

struct PlanOutcome {
    bool ok = false;
    InitialPlanResult init;
    OptimizeResult opt;
    VerifyResult verify;
    IndicatorModel indicator;
    json metrics;
};

namespace pipeline_detail {

inline double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline json vec3_metric(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

inline json profile_metrics(const Trajectory& traj, const RobotModel& model) {
    const MotionProfile prof = evaluate_profile(traj, model);
    json j;
    j["J"] = prof.total_squared_jerk;
    j["max_jerk"] = vec3_metric(prof.max_abs_jerk());
    j["max_velocity"] = vec3_metric(prof.max_abs_velocity());
    j["max_acceleration"] = vec3_metric(prof.max_abs_acceleration());
    return j;
}

}  // namespace pipeline_detail

/// Trains the collision indicator for the scene's working surface with the
/// adaptive sampler; scenes without obstacles use the always-free indicator.
inline IndicatorModel train_scene_indicator(const RobotModel& model, const Scene& scene,
                                            const PipelineConfig& cfg, std::mt19937_64& rng,
                                            std::vector<LabeledSample>* samples_out = nullptr) {
    if (scene.obstacles.empty()) return permissive_indicator();
    const auto samples =
        generate_training_set(model, scene.surface, scene, cfg.sampling_params(), rng);
    if (samples_out) *samples_out = samples;
    bool has_pos = false, has_neg = false;
    for (const auto& s : samples) (s.label > 0 ? has_pos : has_neg) = true;
    if (!has_pos) return permissive_indicator();  // nothing to avoid near the surface
    return train_indicator(samples, cfg.gamma, cfg.svm_c, cfg.epsilon);
}

/// Full planning pipeline: graph initialization, greedy jerk filtering, and
/// exact verification with repair.
inline PlanOutcome run_plan(const RobotModel& model, const Scene& scene, const PathTask& path,
                            const PipelineConfig& cfg,
                            const std::optional<IndicatorModel>& indicator = std::nullopt) {
    validate_model(model);
    validate_path(path);

    PlanOutcome out;
    const auto oracle = make_scene_oracle(scene, model);
    const auto t0 = std::chrono::steady_clock::now();

    out.init = plan_initial(model, path, oracle, cfg.n_start, cfg.n_cap);
    const double t_init = pipeline_detail::seconds_since(t0);
    if (!out.init.found) {
        out.metrics["command"] = "plan";
        out.metrics["ok"] = false;
        out.metrics["first_infeasible_ladder"] = out.init.first_infeasible_ladder;
        out.metrics["n_used"] = out.init.n_used;
        return out;
    }

    std::mt19937_64 rng(cfg.seed);
    out.indicator = indicator ? *indicator : train_scene_indicator(model, scene, cfg, rng);
    const double t_train = pipeline_detail::seconds_since(t0) - t_init;

    out.opt = optimize_trajectory(out.init.trajectory, path, model, out.indicator,
                                  cfg.optimize_params());
    const double t_opt = pipeline_detail::seconds_since(t0) - t_init - t_train;

    out.verify = verify_and_repair(out.opt.trajectory, path, model, scene);
    const double t_total = pipeline_detail::seconds_since(t0);

    out.ok = true;
    json& m = out.metrics;
    m["command"] = "plan";
    m["ok"] = true;
    m["seed"] = cfg.seed;
    m["waypoints"] = path.size();
    m["n_used"] = out.init.n_used;
    m["transition_cost"] = out.init.transition_cost;
    m["J_initial"] = out.opt.j_initial;
    m["J_final"] = out.opt.j_final;
    {
        const MotionProfile before = evaluate_profile(out.init.trajectory, model);
        m["max_jerk_initial"] = pipeline_detail::vec3_metric(before.max_abs_jerk());
    }
    const json prof = pipeline_detail::profile_metrics(out.verify.trajectory, model);
    m["max_jerk_final"] = prof["max_jerk"];
    m["max_velocity"] = prof["max_velocity"];
    m["max_acceleration"] = prof["max_acceleration"];
    m["iterations"] = out.opt.iterations;
    m["accepted_filters"] = out.opt.accepted;
    m["jerk_limit_met"] = out.opt.jerk_limit_met;
    m["repairs"] = {{"count", out.verify.report.repaired.size()},
                    {"unrepairable", out.verify.report.unrepairable.size()}};
    m["timings"] = {{"init_s", cfg.timings ? t_init : 0.0},
                    {"train_s", cfg.timings ? t_train : 0.0},
                    {"optimize_s", cfg.timings ? t_opt : 0.0},
                    {"total_s", cfg.timings ? t_total : 0.0}};
    return out;
}

/// Dense-graph baseline: ladders at 1-degree heading steps, no jerk
/// filtering, same metrics schema as run_plan.
inline PlanOutcome run_baseline_dense(const RobotModel& model, const Scene& scene,
                                      const PathTask& path, const PipelineConfig& cfg) {
    validate_model(model);
    validate_path(path);

    PlanOutcome out;
    const auto oracle = make_scene_oracle(scene, model);
    const auto t0 = std::chrono::steady_clock::now();

    const LadderGraph g = build_graph(model, path, cfg.n_dense, oracle);
    const GraphSearchResult sr = shortest_trajectory(g, model);
    const double t_init = pipeline_detail::seconds_since(t0);
    if (!sr.found) {
        out.metrics["command"] = "baseline-dense";
        out.metrics["ok"] = false;
        out.metrics["first_infeasible_ladder"] = sr.first_infeasible_ladder;
        out.metrics["n_used"] = cfg.n_dense;
        return out;
    }
    out.init.found = true;
    out.init.n_used = cfg.n_dense;
    out.init.transition_cost = sr.transition_cost;
    out.init.trajectory = unwrap_trajectory(sr.trajectory);
    out.verify = verify_and_repair(out.init.trajectory, path, model, scene);
    const double t_total = pipeline_detail::seconds_since(t0);

    const MotionProfile prof = evaluate_profile(out.init.trajectory, model);
    out.ok = true;
    json& m = out.metrics;
    m["command"] = "baseline-dense";
    m["ok"] = true;
    m["seed"] = cfg.seed;
    m["waypoints"] = path.size();
    m["n_used"] = cfg.n_dense;
    m["transition_cost"] = sr.transition_cost;
    m["J_initial"] = prof.total_squared_jerk;
    m["J_final"] = prof.total_squared_jerk;
    m["max_jerk_initial"] = pipeline_detail::vec3_metric(prof.max_abs_jerk());
    m["max_jerk_final"] = pipeline_detail::vec3_metric(prof.max_abs_jerk());
    m["max_velocity"] = pipeline_detail::vec3_metric(prof.max_abs_velocity());
    m["max_acceleration"] = pipeline_detail::vec3_metric(prof.max_abs_acceleration());
    m["iterations"] = 0;
    m["accepted_filters"] = 0;
    m["jerk_limit_met"] = !((prof.max_abs_jerk().array() > model.j_max.array()).any());
    m["repairs"] = {{"count", out.verify.report.repaired.size()},
                    {"unrepairable", out.verify.report.unrepairable.size()}};
    m["timings"] = {{"init_s", cfg.timings ? t_init : 0.0},
                    {"train_s", 0.0},
                    {"optimize_s", 0.0},
                    {"total_s", cfg.timings ? t_total : 0.0}};
    return out;
}

struct TrainOutcome {
    std::vector<LabeledSample> samples;
    IndicatorModel indicator;
    json report;
};

/// Oracle-labeled verification samples on the contact space (fresh random
/// surface samples) or in its nearby region (contact samples with uniform
/// joint noise).
inline std::vector<LabeledSample> make_verification_samples(const RobotModel& model,
                                                            const Scene& scene, int count,
                                                            bool nearby, double noise,
                                                            std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-noise, noise);
    std::vector<LabeledSample> out;
    out.reserve(count);
    long guard = 200L * count;
    while (static_cast<int>(out.size()) < count && guard-- > 0) {
        auto c = detail::random_contact_config(model, scene.surface, rng);
        if (!c) continue;
        JointConfig q = *c;
        if (nearby) {
            for (int t = 0; t < 3; ++t) q.q[t] += u(rng);
            q = normalize_angles(q);
        }
        LabeledSample s;
        s.q = q;
        s.label = check_collision(scene, model, q).colliding ? 1 : -1;
        s.on_contact = !nearby;
        out.push_back(s);
    }
    if (out.empty()) throw EmptySampleSetError("no verification samples could be generated");
    return out;
}

/// Random-sampling baseline for the comparison runs: plain random contact
/// samples (the initialization step alone, no up-scaling or refinement) at
/// a given total count.
inline std::vector<LabeledSample> generate_random_training_set(const RobotModel& model,
                                                               const Scene& scene, int count,
                                                               std::mt19937_64& rng) {
    return make_verification_samples(model, scene, count, false, 0.0, rng);
}

/// Adaptive sampling + SVM training + TNR evaluation on both verification
/// set types; optionally the equal-n random-sampling comparison.
inline TrainOutcome run_train_cspace(const RobotModel& model, const Scene& scene,
                                     const PipelineConfig& cfg, int verify_count = 20000,
                                     bool compare_random = false) {
    validate_model(model);
    if (scene.surface.size() < 2) throw InvalidInputError("scene has no working surface");

    TrainOutcome out;
    std::mt19937_64 rng(cfg.seed);
    const auto t0 = std::chrono::steady_clock::now();
    out.samples = generate_training_set(model, scene.surface, scene, cfg.sampling_params(), rng);
    out.indicator = train_indicator(out.samples, cfg.gamma, cfg.svm_c, cfg.epsilon);
    const double t_train = pipeline_detail::seconds_since(t0);

    std::mt19937_64 vrng(cfg.seed + 0x9e3779b97f4a7c15ULL);
    const auto nearby = make_verification_samples(model, scene, verify_count, true,
                                                  cfg.nearby_noise, vrng);
    const auto contact = make_verification_samples(model, scene, verify_count, false, 0.0, vrng);
    const TnrResult tnr_nearby = evaluate_tnr(out.indicator, nearby);
    const TnrResult tnr_contact = evaluate_tnr(out.indicator, contact);

    json& r = out.report;
    r["command"] = "train-cspace";
    r["seed"] = cfg.seed;
    r["samples"] = out.samples.size();
    r["kernels"] = out.indicator.kernels.size();
    r["verification_samples"] = verify_count;
    r["tnr_nearby"] = tnr_nearby.tnr ? json(*tnr_nearby.tnr) : json(nullptr);
    r["tnr_contact"] = tnr_contact.tnr ? json(*tnr_contact.tnr) : json(nullptr);

    if (compare_random) {
        std::mt19937_64 rrng(cfg.seed + 0x2545f4914f6cdd1dULL);
        const auto rnd_samples = generate_random_training_set(
            model, scene, static_cast<int>(out.samples.size()), rrng);
        const IndicatorModel rnd_ind =
            train_indicator(rnd_samples, cfg.gamma, cfg.svm_c, cfg.epsilon);
        const TnrResult rn = evaluate_tnr(rnd_ind, nearby);
        const TnrResult rc = evaluate_tnr(rnd_ind, contact);
        r["random_comparison"] = {{"samples", rnd_samples.size()},
                                  {"kernels", rnd_ind.kernels.size()},
                                  {"tnr_nearby", rn.tnr ? json(*rn.tnr) : json(nullptr)},
                                  {"tnr_contact", rc.tnr ? json(*rc.tnr) : json(nullptr)}};
    }
    r["timings"] = {{"train_s", cfg.timings ? t_train : 0.0},
                    {"total_s", cfg.timings ? pipeline_detail::seconds_since(t0) : 0.0}};
    return out;
}

/// Planar analog of the orientation-noise robustness test: each waypoint's
/// heading sampling phase is shifted by uniform noise within +/- degrees.
inline PathTask perturb_path(const PathTask& path, double degrees, std::uint64_t seed) {
    if (degrees < 0.0) throw InvalidInputError("perturbation must be non-negative");
    PathTask out = path;
    if (degrees == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-degrees * kPi / 180.0, degrees * kPi / 180.0);
    for (auto& wp : out.waypoints) wp.heading_phase += u(rng);
    return out;
}

}  // namespace jerkplan
