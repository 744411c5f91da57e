#pragma once

#include "jerkplan/indicator.hpp"
#include "jerkplan/types.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace jerkplan {

using json = nlohmann::ordered_json;

namespace io_detail {

inline json vec2_json(const Vec2& v) { return json::array({v[0], v[1]}); }
inline json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

inline Vec2 json_vec2(const json& j) {
    if (!j.is_array() || j.size() != 2) throw IoError("expected a 2-element array");
    return Vec2(j[0].get<double>(), j[1].get<double>());
}
inline Vec3 json_vec3(const json& j) {
    if (!j.is_array() || j.size() != 3) throw IoError("expected a 3-element array");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw IoError("cannot parse " + path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Scene file: robot model + obstacles + working surface in one JSON object.
// ---------------------------------------------------------------------------

inline json scene_to_json(const RobotModel& model, const Scene& scene) {
    json j;
    j["links"] = io_detail::vec3_json(model.link_lengths);
    j["base"] = io_detail::vec2_json(model.base);
    j["link_radius"] = model.link_radius;
    j["q_min"] = io_detail::vec3_json(model.q_min);
    j["q_max"] = io_detail::vec3_json(model.q_max);
    j["v_max"] = io_detail::vec3_json(model.v_max);
    j["a_max"] = io_detail::vec3_json(model.a_max);
    j["j_max"] = io_detail::vec3_json(model.j_max);
    j["W"] = io_detail::vec3_json(model.weights);
    j["obstacles"] = json::array();
    for (const auto& poly : scene.obstacles) {
        json jp = json::array();
        for (const auto& v : poly) jp.push_back(io_detail::vec2_json(v));
        j["obstacles"].push_back(jp);
    }
    j["surface"] = json::array();
    for (const auto& v : scene.surface) j["surface"].push_back(io_detail::vec2_json(v));
    return j;
}

inline void scene_from_json(const json& j, RobotModel& model, Scene& scene) {
    try {
        model.link_lengths = io_detail::json_vec3(j.at("links"));
        model.base = io_detail::json_vec2(j.at("base"));
        model.link_radius = j.at("link_radius").get<double>();
        model.q_min = io_detail::json_vec3(j.at("q_min"));
        model.q_max = io_detail::json_vec3(j.at("q_max"));
        model.v_max = io_detail::json_vec3(j.at("v_max"));
        model.a_max = io_detail::json_vec3(j.at("a_max"));
        model.j_max = io_detail::json_vec3(j.at("j_max"));
        model.weights = io_detail::json_vec3(j.at("W"));
        scene.obstacles.clear();
        for (const auto& jp : j.at("obstacles")) {
            Polygon poly;
            for (const auto& v : jp) poly.push_back(io_detail::json_vec2(v));
            if (poly.size() < 3) throw IoError("obstacle polygon needs at least 3 vertices");
            scene.obstacles.push_back(poly);
        }
        scene.surface.clear();
        for (const auto& v : j.at("surface")) scene.surface.push_back(io_detail::json_vec2(v));
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed scene file: ") + e.what());
    }
    validate_model(model);
    if (scene.surface.size() == 1) throw IoError("surface needs at least 2 vertices");
}

inline void save_scene(const std::string& path, const RobotModel& model, const Scene& scene) {
    io_detail::write_text_file(path, scene_to_json(model, scene).dump(2) + "\n");
}

inline void load_scene(const std::string& path, RobotModel& model, Scene& scene) {
    scene_from_json(io_detail::load_json_file(path), model, scene);
}

// ---------------------------------------------------------------------------
// Path file.
// ---------------------------------------------------------------------------

inline json path_to_json(const PathTask& path) {
    json j;
    j["waypoints"] = json::array();
    for (const auto& wp : path.waypoints) {
        json jw;
        jw["t"] = wp.t;
        jw["p"] = io_detail::vec2_json(wp.p);
        if (wp.heading_phase != 0.0) jw["phase"] = wp.heading_phase;
        j["waypoints"].push_back(jw);
    }
    return j;
}

inline PathTask path_from_json(const json& j) {
    PathTask path;
    try {
        for (const auto& jw : j.at("waypoints")) {
            Waypoint wp;
            wp.t = jw.at("t").get<double>();
            wp.p = io_detail::json_vec2(jw.at("p"));
            if (jw.contains("phase")) wp.heading_phase = jw.at("phase").get<double>();
            path.waypoints.push_back(wp);
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed path file: ") + e.what());
    }
    return path;
}

inline void save_path(const std::string& path_name, const PathTask& path) {
    io_detail::write_text_file(path_name, path_to_json(path).dump(2) + "\n");
}

inline PathTask load_path(const std::string& path_name) {
    return path_from_json(io_detail::load_json_file(path_name));
}

// ---------------------------------------------------------------------------
// Indicator model file.
// ---------------------------------------------------------------------------

inline json indicator_to_json(const IndicatorModel& ind) {
    json j;
    j["gamma"] = ind.gamma;
    j["bias"] = ind.bias;
    j["kernels"] = json::array();
    for (const auto& k : ind.kernels) {
        json jk;
        jk["q"] = io_detail::vec3_json(k.q);
        jk["alpha"] = k.alpha;
        j["kernels"].push_back(jk);
    }
    return j;
}

inline IndicatorModel indicator_from_json(const json& j) {
    IndicatorModel ind;
    try {
        ind.gamma = j.at("gamma").get<double>();
        ind.bias = j.at("bias").get<double>();
        ind.kernels.clear();
        for (const auto& jk : j.at("kernels"))
            ind.kernels.push_back(
                {io_detail::json_vec3(jk.at("q")), jk.at("alpha").get<double>()});
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed indicator file: ") + e.what());
    }
    if (ind.gamma <= 0.0) throw IoError("indicator gamma must be positive");
    return ind;
}

inline void save_indicator(const std::string& path, const IndicatorModel& ind) {
    io_detail::write_text_file(path, indicator_to_json(ind).dump(2) + "\n");
}

inline IndicatorModel load_indicator(const std::string& path) {
    return indicator_from_json(io_detail::load_json_file(path));
}

// ---------------------------------------------------------------------------
// Trajectory CSV: t,q1,q2,q3 with value-preserving precision.
// ---------------------------------------------------------------------------

inline std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,q1,q2,q3\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << traj.times[i] << ',' << traj.configs[i].q[0] << ',' << traj.configs[i].q[1]
            << ',' << traj.configs[i].q[2] << '\n';
    }
    return out.str();
}

inline Trajectory trajectory_from_csv(const std::string& text) {
    Trajectory traj;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,q1,q2,q3", 0) != 0)
        throw IoError("trajectory CSV must start with header t,q1,q2,q3");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double vals[4];
        char comma;
        row >> vals[0];
        for (int k = 1; k < 4; ++k) {
            row >> comma >> vals[k];
            if (comma != ',') throw IoError("malformed trajectory CSV row: " + line);
        }
        if (!row) throw IoError("malformed trajectory CSV row: " + line);
        traj.times.push_back(vals[0]);
        traj.configs.push_back(JointConfig(vals[1], vals[2], vals[3]));
    }
    return traj;
}

inline void save_trajectory(const std::string& path, const Trajectory& traj) {
    io_detail::write_text_file(path, trajectory_to_csv(traj));
}

inline Trajectory load_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return trajectory_from_csv(buf.str());
}

}  // namespace jerkplan
