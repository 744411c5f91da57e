#include "jerkplan/benchmarks.hpp"
#include "jerkplan/io.hpp"
#include "jerkplan/pipeline.hpp"

#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <random>

using namespace jerkplan;

namespace {

struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        dir = std::filesystem::temp_directory_path() /
              ("jerkplan_io_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("scene files round-trip") {
    const Benchmark bench = benchmark_corridor();
    TempDir tmp;
    save_scene(tmp.file("scene.json"), bench.model, bench.scene);

    RobotModel model;
    Scene scene;
    load_scene(tmp.file("scene.json"), model, scene);
    CHECK(model.link_lengths == bench.model.link_lengths);
    CHECK(model.base == bench.model.base);
    CHECK(model.link_radius == bench.model.link_radius);
    CHECK(model.v_max == bench.model.v_max);
    CHECK(model.j_max == bench.model.j_max);
    REQUIRE(scene.obstacles.size() == bench.scene.obstacles.size());
    for (std::size_t i = 0; i < scene.obstacles.size(); ++i)
        for (std::size_t v = 0; v < scene.obstacles[i].size(); ++v)
            CHECK(scene.obstacles[i][v] == bench.scene.obstacles[i][v]);
    REQUIRE(scene.surface.size() == bench.scene.surface.size());

    // Bit-stable: saving the loaded scene reproduces the same bytes.
    save_scene(tmp.file("scene2.json"), model, scene);
    std::ifstream a(tmp.file("scene.json")), b(tmp.file("scene2.json"));
    const std::string sa((std::istreambuf_iterator<char>(a)), {});
    const std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
}

TEST_CASE("path files round-trip, including heading phases") {
    Benchmark bench = benchmark_wave();
    bench.path.waypoints[3].heading_phase = 0.0123;
    TempDir tmp;
    save_path(tmp.file("path.json"), bench.path);
    const PathTask loaded = load_path(tmp.file("path.json"));
    REQUIRE(loaded.size() == bench.path.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded.waypoints[i].t == bench.path.waypoints[i].t);
        CHECK(loaded.waypoints[i].p == bench.path.waypoints[i].p);
        CHECK(loaded.waypoints[i].heading_phase == bench.path.waypoints[i].heading_phase);
    }
}

TEST_CASE("trajectory CSV round-trips exactly") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    Trajectory traj;
    for (int i = 0; i < 30; ++i) {
        traj.times.push_back(0.1 * i + 1e-3 * u(rng));
        traj.configs.push_back(JointConfig(u(rng), u(rng), u(rng)));
    }
    TempDir tmp;
    save_trajectory(tmp.file("traj.csv"), traj);
    const Trajectory loaded = load_trajectory(tmp.file("traj.csv"));
    REQUIRE(loaded.size() == traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(loaded.times[i] == traj.times[i]);
        CHECK(loaded.configs[i].q == traj.configs[i].q);
    }
}

TEST_CASE("indicator files round-trip exactly") {
    std::mt19937_64 rng(72);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    IndicatorModel ind;
    ind.gamma = 0.7;
    ind.bias = u(rng);
    for (int i = 0; i < 25; ++i) ind.kernels.push_back({Vec3(u(rng), u(rng), u(rng)), u(rng)});
    TempDir tmp;
    save_indicator(tmp.file("ind.json"), ind);
    const IndicatorModel loaded = load_indicator(tmp.file("ind.json"));
    CHECK(loaded.gamma == ind.gamma);
    CHECK(loaded.bias == ind.bias);
    REQUIRE(loaded.kernels.size() == ind.kernels.size());
    for (std::size_t i = 0; i < ind.kernels.size(); ++i) {
        CHECK(loaded.kernels[i].q == ind.kernels[i].q);
        CHECK(loaded.kernels[i].alpha == ind.kernels[i].alpha);
    }
}

TEST_CASE("missing and malformed files raise IoError") {
    CHECK_THROWS_AS(load_path("/nonexistent/path.json"), IoError);
    CHECK_THROWS_AS(load_indicator("/nonexistent/ind.json"), IoError);
    TempDir tmp;
    io_detail::write_text_file(tmp.file("bad.json"), "{not json");
    CHECK_THROWS_AS(load_path(tmp.file("bad.json")), IoError);
    io_detail::write_text_file(tmp.file("wrong.json"), "{\"waypoints\": 7}\n");
    CHECK_THROWS_AS(load_path(tmp.file("wrong.json")), IoError);
    io_detail::write_text_file(tmp.file("bad.csv"), "x,y\n1,2\n");
    CHECK_THROWS_AS(load_trajectory(tmp.file("bad.csv")), IoError);
}

TEST_CASE("config overrides apply and reject unknown keys") {
    PipelineConfig cfg;
    apply_config_json(cfg, json::parse(R"({"gamma":0.5,"d":7,"m":99,"seed":7})"));
    CHECK(cfg.gamma == 0.5);
    CHECK(cfg.d == 7);
    CHECK(cfg.m_init == 99);
    CHECK(cfg.seed == 7);
    CHECK_THROWS_AS(apply_config_json(cfg, json::parse(R"({"bogus":1})")),
                    InvalidInputError);
    CHECK_THROWS_AS(apply_config_json(cfg, json::parse(R"({"tau_alpha":0.01})")),
                    InvalidInputError);  // violates tau_beta < tau_alpha
}

TEST_CASE("perturb_path bounds the phase noise and is reproducible") {
    const Benchmark bench = benchmark_trivial();
    const PathTask zero = perturb_path(bench.path, 0.0, 42);
    for (std::size_t i = 0; i < zero.size(); ++i)
        CHECK(zero.waypoints[i].heading_phase == bench.path.waypoints[i].heading_phase);

    const PathTask five = perturb_path(bench.path, 5.0, 42);
    for (const auto& wp : five.waypoints)
        CHECK(std::abs(wp.heading_phase) <= 5.0 * kPi / 180.0);

    const PathTask again = perturb_path(bench.path, 5.0, 42);
    for (std::size_t i = 0; i < five.size(); ++i)
        CHECK(again.waypoints[i].heading_phase == five.waypoints[i].heading_phase);

    const PathTask other = perturb_path(bench.path, 5.0, 43);
    bool differs = false;
    for (std::size_t i = 0; i < five.size(); ++i)
        if (other.waypoints[i].heading_phase != five.waypoints[i].heading_phase)
            differs = true;
    CHECK(differs);
}
