// Command-line front end for the planar jerk-optimized trajectory planner.

#include "jerkplan/benchmarks.hpp"
#include "jerkplan/io.hpp"
#include "jerkplan/pipeline.hpp"
#include "jerkplan/svg_plot.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

namespace fs = std::filesystem;
using namespace jerkplan;

constexpr int kExitOk = 0;
constexpr int kExitPlanningFailure = 1;
constexpr int kExitIoError = 2;
constexpr int kExitInvalidConfig = 3;

struct CommonOpts {
    std::string scene_file;
    std::string path_file;
    std::string out_dir = ".";
    std::string config_file;
    std::uint64_t seed = 42;
    bool seed_set = false;
    bool no_timings = false;
};

PipelineConfig make_config(const CommonOpts& opts) {
    PipelineConfig cfg;
    if (!opts.config_file.empty())
        apply_config_json(cfg, io_detail::load_json_file(opts.config_file));
    if (opts.seed_set) cfg.seed = opts.seed;
    cfg.timings = !opts.no_timings;
    return cfg;
}

void write_json(const fs::path& path, const json& j) {
    io_detail::write_text_file(path.string(), j.dump(2) + "\n");
}

void write_iteration_log(const fs::path& path, const std::vector<IterationRecord>& log) {
    std::string text;
    for (const auto& rec : log) {
        json j;
        j["iter"] = rec.iter;
        j["center"] = rec.center;
        j["d"] = rec.d;
        j["success"] = rec.success;
        j["J_local_before"] = rec.j_local_before;
        j["J_local_after"] = rec.j_local_after;
        j["J_global"] = rec.j_global;
        j["max_jerk"] = json::array({rec.max_jerk[0], rec.max_jerk[1], rec.max_jerk[2]});
        text += j.dump() + "\n";
    }
    io_detail::write_text_file(path.string(), text);
}

void write_repair_report(const fs::path& path, const RepairReport& rep) {
    json j;
    j["repaired"] = json::array();
    for (const auto& r : rep.repaired)
        j["repaired"].push_back({{"index", r.index}, {"deviation_inf", r.deviation_inf}});
    j["unrepairable"] = rep.unrepairable;
    j["residual_max_jerk"] = json::array(
        {rep.residual_max_jerk[0], rep.residual_max_jerk[1], rep.residual_max_jerk[2]});
    write_json(path, j);
}

void write_plots(const fs::path& dir, const RobotModel& model, const Trajectory& before,
                 const Trajectory& after) {
    const MotionProfile prof_before = evaluate_profile(before, model);
    const MotionProfile prof_after = evaluate_profile(after, model);

    SvgPlot joints("Joint angles before/after optimization", "time [s]", "angle [rad]");
    SvgPlot jerks("Joint |jerk| before/after optimization", "time [s]", "|jerk| [rad/s^3]");
    for (int t = 0; t < 3; ++t) {
        std::vector<double> qb, qa, jb, ja;
        for (std::size_t i = 0; i < before.size(); ++i) {
            qb.push_back(before.configs[i].q[t]);
            qa.push_back(after.configs[i].q[t]);
            jb.push_back(std::abs(prof_before.jerk[i][t]));
            ja.push_back(std::abs(prof_after.jerk[i][t]));
        }
        joints.add_series("q" + std::to_string(t + 1) + " init", before.times, qb);
        joints.add_series("q" + std::to_string(t + 1) + " opt", after.times, qa);
        jerks.add_series("q" + std::to_string(t + 1) + " init", before.times, jb);
        jerks.add_series("q" + std::to_string(t + 1) + " opt", after.times, ja);
    }
    joints.save((dir / "joints.svg").string());
    jerks.save((dir / "jerk.svg").string());
}

int cmd_plan(const CommonOpts& opts, const std::string& indicator_file, bool dense) {
    const PipelineConfig cfg = make_config(opts);
    RobotModel model;
    Scene scene;
    load_scene(opts.scene_file, model, scene);
    const PathTask path = load_path(opts.path_file);

    std::optional<IndicatorModel> indicator;
    if (!indicator_file.empty()) indicator = load_indicator(indicator_file);

    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);

    const PlanOutcome out = dense ? run_baseline_dense(model, scene, path, cfg)
                                  : run_plan(model, scene, path, cfg, indicator);
    write_json(dir / "metrics.json", out.metrics);
    if (!out.ok) {
        std::cerr << "planning failed: no feasible ladder path (first infeasible ladder "
                  << out.metrics["first_infeasible_ladder"] << " at n = "
                  << out.metrics["n_used"] << ")\n";
        return kExitPlanningFailure;
    }

    const Trajectory& final_traj = dense ? out.init.trajectory : out.verify.trajectory;
    save_trajectory((dir / "trajectory.csv").string(), final_traj);
    write_repair_report(dir / "repairs.json", out.verify.report);
    if (!dense) {
        write_iteration_log(dir / "iterations.jsonl", out.opt.log);
        write_plots(dir, model, out.init.trajectory, final_traj);
    }
    std::cout << out.metrics.dump(2) << "\n";
    return kExitOk;
}

int cmd_train(const CommonOpts& opts, bool compare_random, int verify_samples) {
    const PipelineConfig cfg = make_config(opts);
    RobotModel model;
    Scene scene;
    load_scene(opts.scene_file, model, scene);

    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);

    const TrainOutcome out =
        run_train_cspace(model, scene, cfg, verify_samples, compare_random);
    save_indicator((dir / "indicator.json").string(), out.indicator);
    write_json(dir / "report.json", out.report);
    std::cout << out.report.dump(2) << "\n";
    return kExitOk;
}

int cmd_verify(const CommonOpts& opts, const std::string& traj_file) {
    RobotModel model;
    Scene scene;
    load_scene(opts.scene_file, model, scene);
    const PathTask path = load_path(opts.path_file);
    const Trajectory traj = load_trajectory(traj_file);

    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);

    const VerifyResult vr = verify_and_repair(traj, path, model, scene);
    save_trajectory((dir / "repaired.csv").string(), vr.trajectory);
    write_repair_report(dir / "repairs.json", vr.report);
    std::cout << "repaired " << vr.report.repaired.size() << " waypoint(s), "
              << vr.report.unrepairable.size() << " unrepairable\n";
    return vr.report.unrepairable.empty() ? kExitOk : kExitPlanningFailure;
}

int cmd_perturb(const CommonOpts& opts, double degrees, const std::string& out_file) {
    const PipelineConfig cfg = make_config(opts);
    const PathTask path = load_path(opts.path_file);
    save_path(out_file, perturb_path(path, degrees, cfg.seed));
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& files) {
    for (const auto& f : files) {
        const json m = io_detail::load_json_file(f);
        std::cout << f << ":\n";
        std::cout << "  command     " << m.value("command", std::string("?")) << "\n";
        if (m.contains("J_initial") && m.contains("J_final")) {
            const double ji = m["J_initial"].get<double>();
            const double jf = m["J_final"].get<double>();
            std::cout << "  J initial   " << ji << "\n";
            std::cout << "  J final     " << jf << "\n";
            if (ji > 0.0)
                std::cout << "  reduction   " << 100.0 * (1.0 - jf / ji) << " %\n";
        }
        if (m.contains("max_jerk_final"))
            std::cout << "  max jerk    " << m["max_jerk_final"].dump() << "\n";
        if (m.contains("tnr_nearby"))
            std::cout << "  TNR nearby  " << m["tnr_nearby"].dump() << "\n";
        if (m.contains("tnr_contact"))
            std::cout << "  TNR contact " << m["tnr_contact"].dump() << "\n";
        if (m.contains("timings")) std::cout << "  timings     " << m["timings"].dump() << "\n";
    }
    return kExitOk;
}

int cmd_gen_bench(const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    for (const auto& name : benchmark_names()) {
        const Benchmark b = make_benchmark(name);
        save_scene((dir / (name + ".scene.json")).string(), b.model, b.scene);
        save_path((dir / (name + ".path.json")).string(), b.path);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jerk-optimized trajectory planning for a redundant planar arm"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string indicator_file, traj_file, out_path_file;
    double degrees = 0.0;
    bool compare_random = false;
    int verify_samples = 20000;
    std::vector<std::string> report_files;
    std::string bench_dir = "benchmarks";

    const auto add_common = [&](CLI::App* sub, bool needs_scene, bool needs_path) {
        if (needs_scene) sub->add_option("--scene", opts.scene_file, "scene JSON")->required();
        if (needs_path) sub->add_option("--path", opts.path_file, "path JSON")->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--config", opts.config_file, "config JSON with parameter overrides");
        sub->add_option("--seed", opts.seed, "random seed")->each([&](const std::string&) {
            opts.seed_set = true;
        });
        sub->add_flag("--no-timings", opts.no_timings,
                      "write zero timings for byte-reproducible metrics");
    };

    auto* plan = app.add_subcommand("plan", "full pipeline: initialize, filter, verify");
    add_common(plan, true, true);
    plan->add_option("--indicator", indicator_file,
                     "pre-trained indicator JSON (default: train in-process)");

    auto* dense = app.add_subcommand("baseline-dense",
                                     "graph-only baseline at 1-degree heading sampling");
    add_common(dense, true, true);

    auto* train = app.add_subcommand("train-cspace", "learn the collision indicator");
    add_common(train, true, false);
    train->add_flag("--compare-random", compare_random,
                    "also train and score an equal-n random-sampling indicator");
    train->add_option("--verify-samples", verify_samples,
                      "verification samples per set");

    auto* verify = app.add_subcommand("verify", "exact collision check and repair");
    add_common(verify, true, true);
    verify->add_option("--traj", traj_file, "trajectory CSV")->required();

    auto* perturb = app.add_subcommand("perturb", "add heading-phase noise to a path");
    add_common(perturb, false, true);
    perturb->add_option("--degrees", degrees, "noise bound in degrees")->required();
    perturb->add_option("--out-path", out_path_file, "output path JSON")->required();

    auto* report = app.add_subcommand("report", "summarize metrics JSON files");
    report->add_option("files", report_files, "metrics files")->required();

    auto* gen = app.add_subcommand("gen-bench", "write the built-in benchmark files");
    gen->add_option("--out", bench_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plan->parsed()) return cmd_plan(opts, indicator_file, false);
        if (dense->parsed()) return cmd_plan(opts, "", true);
        if (train->parsed()) return cmd_train(opts, compare_random, verify_samples);
        if (verify->parsed()) return cmd_verify(opts, traj_file);
        if (perturb->parsed()) return cmd_perturb(opts, degrees, out_path_file);
        if (report->parsed()) return cmd_report(report_files);
        if (gen->parsed()) return cmd_gen_bench(bench_dir);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const InvalidInputError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const PathTooShortError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const DegenerateTrainingError& e) {
        std::cerr << "training failed: " << e.what() << "\n";
        return kExitPlanningFailure;
    } catch (const EmptySampleSetError& e) {
        std::cerr << "training failed: " << e.what() << "\n";
        return kExitPlanningFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }
    return kExitOk;
}
