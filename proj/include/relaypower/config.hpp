#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "relaypower/numeric.hpp"
#include "relaypower/scenario.hpp"
#include "relaypower/version.hpp"

namespace relaypower {

inline ScenarioConfig default_config(TargetKind kind) {
    ScenarioConfig c;
    c.kind = kind;
    if (kind == TargetKind::scalar) {
        c.prior_mean = Eigen::VectorXd::Constant(1, 1.0);
        c.prior_cov = Eigen::MatrixXd::Constant(1, 1, 1.0);
    } else {
        c.prior_mean = Eigen::Vector3d(30.0, 30.0, 10.0);
        c.prior_cov = Eigen::Vector3d(4.0, 4.0, 1.0).asDiagonal();
    }
    return c;
}

namespace detail {

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& a,
                                        const std::string& key) {
    require(a.is_array() && !a.empty(), "config: " + key + " must be a non-empty array");
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        require(a[i].is_number(), "config: " + key + " entries must be numbers");
        v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    }
    return v;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& a,
                                        const std::string& key) {
    require(a.is_array() && !a.empty(),
            "config: " + key + " must be a non-empty array of rows");
    const std::size_t rows = a.size();
    require(a[0].is_array() && !a[0].empty(),
            "config: " + key + " rows must be non-empty arrays");
    const std::size_t cols = a[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        require(a[i].is_array() && a[i].size() == cols,
                "config: " + key + " rows must have equal length");
        for (std::size_t j = 0; j < cols; ++j) {
            require(a[i][j].is_number(), "config: " + key + " entries must be numbers");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                a[i][j].get<double>();
        }
    }
    return m;
}

}  // namespace detail

inline nlohmann::json config_to_json(const ScenarioConfig& c) {
    nlohmann::json j;
    j["kind"] = c.kind == TargetKind::scalar ? "scalar" : "vector";
    j["sensor_count"] = c.sensor_count;
    j["prior_mean"] = detail::vector_to_json(c.prior_mean);
    j["prior_cov"] = detail::matrix_to_json(c.prior_cov);
    j["wavelength"] = c.wavelength;
    j["snr"] = c.snr;
    j["one_hop_distance"] = c.one_hop_distance;
    j["two_hop_distance"] = c.two_hop_distance;
    j["p_t_grid"] = c.p_t_grid;
    j["p_r"] = c.p_r;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["placement_radius"] = c.placement_radius;
    j["placement_mode"] =
        c.placement_mode == PlacementMode::redraw ? "redraw" : "permute";
    j["sensor_noise"] = c.sensor_noise;
    j["relay_noise"] = c.relay_noise;
    j["fc_noise"] = c.fc_noise;
    j["fading"] = c.fading;
    nlohmann::json methods = nlohmann::json::array();
    for (Method m : c.methods) methods.push_back(method_name(m));
    j["methods"] = methods;
    j["optimizer"] = {{"epsilon", c.optimizer.epsilon},
                      {"max_iterations", c.optimizer.max_iterations},
                      {"bisection_tolerance", c.optimizer.bisection_tolerance},
                      {"max_bisection_steps", c.optimizer.max_bisection_steps},
                      {"floor", c.optimizer.floor}};
    return j;
}

/// Parses a full or partial configuration; absent keys keep the defaults of
/// the parsed target kind.  Unknown keys are rejected by name.
inline ScenarioConfig config_from_json(const nlohmann::json& j) {
    require(j.is_object(), "config: top level must be a JSON object");
    TargetKind kind = TargetKind::scalar;
    if (j.contains("kind")) {
        const std::string k = j["kind"].get<std::string>();
        if (k == "scalar") kind = TargetKind::scalar;
        else if (k == "vector") kind = TargetKind::vector;
        else throw std::invalid_argument("config: unknown kind '" + k + "'");
    }
    ScenarioConfig c = default_config(kind);
    bool prior_given = false;

    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
        } else if (key == "sensor_count") {
            c.sensor_count = value.get<int>();
        } else if (key == "prior_mean") {
            c.prior_mean = detail::vector_from_json(value, key);
            prior_given = true;
        } else if (key == "prior_cov") {
            c.prior_cov = detail::matrix_from_json(value, key);
            prior_given = true;
        } else if (key == "wavelength") {
            c.wavelength = value.get<double>();
        } else if (key == "snr") {
            c.snr = value.get<double>();
        } else if (key == "one_hop_distance") {
            c.one_hop_distance = value.get<double>();
        } else if (key == "two_hop_distance") {
            c.two_hop_distance = value.get<double>();
        } else if (key == "p_t_grid") {
            c.p_t_grid = value.get<std::vector<double>>();
        } else if (key == "p_r") {
            c.p_r = value.get<double>();
        } else if (key == "trials") {
            c.trials = value.get<long>();
        } else if (key == "seed") {
            c.seed = value.get<std::uint64_t>();
        } else if (key == "placement_radius") {
            c.placement_radius = value.get<double>();
        } else if (key == "placement_mode") {
            const std::string m = value.get<std::string>();
            if (m == "redraw") c.placement_mode = PlacementMode::redraw;
            else if (m == "permute") c.placement_mode = PlacementMode::permute;
            else throw std::invalid_argument("config: unknown placement_mode '" + m + "'");
        } else if (key == "sensor_noise") {
            c.sensor_noise = value.get<double>();
        } else if (key == "relay_noise") {
            c.relay_noise = value.get<double>();
        } else if (key == "fc_noise") {
            c.fc_noise = value.get<double>();
        } else if (key == "fading") {
            c.fading = value.get<bool>();
        } else if (key == "methods") {
            c.methods.clear();
            for (const auto& name : value)
                c.methods.push_back(method_from_string(name.get<std::string>()));
        } else if (key == "optimizer") {
            for (const auto& [okey, oval] : value.items()) {
                if (okey == "epsilon") c.optimizer.epsilon = oval.get<double>();
                else if (okey == "max_iterations")
                    c.optimizer.max_iterations = oval.get<int>();
                else if (okey == "bisection_tolerance")
                    c.optimizer.bisection_tolerance = oval.get<double>();
                else if (okey == "max_bisection_steps")
                    c.optimizer.max_bisection_steps = oval.get<int>();
                else if (okey == "floor")
                    c.optimizer.floor = oval.get<double>();
                else
                    throw std::invalid_argument(
                        "config: unknown optimizer key '" + okey + "'");
            }
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    (void)prior_given;
    validate_config(c);
    return c;
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config file '" + path + "': " + e.what());
    }
}

/// Applies one "dotted.path=value" override; the value is parsed as JSON
/// when possible and treated as a bare string otherwise.
inline void apply_override(nlohmann::json& j, const std::string& spec) {
    const auto eq = spec.find('=');
    require(eq != std::string::npos && eq > 0,
            "override '" + spec + "' must look like key=value");
    std::string path = "/" + spec.substr(0, eq);
    for (auto& ch : path)
        if (ch == '.') ch = '/';
    const std::string rhs = spec.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(rhs);
    } catch (const nlohmann::json::parse_error&) {
        value = rhs;
    }
    try {
        j[nlohmann::json::json_pointer(path)] = value;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("override '" + spec + "': " + e.what());
    }
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

/// Hash of the canonical serialization (sorted keys), so key order in the
/// input file does not matter.
inline std::string config_hash(const nlohmann::json& j) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(j.dump());
    return os.str();
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Reproducibility record written next to every CSV.
struct RunManifest {
    nlohmann::json config;
    std::vector<std::string> outputs;
    int workers = 1;
    std::string started_utc;
    std::string finished_utc;
};

inline nlohmann::json manifest_json(const RunManifest& m) {
    nlohmann::json j;
    j["tool_version"] = version_string;
    j["config"] = m.config;
    j["config_hash"] = config_hash(m.config);
    j["workers"] = m.workers;
    j["outputs"] = m.outputs;
    j["started_utc"] = m.started_utc;
    j["finished_utc"] = m.finished_utc;
    return j;
}

}  // namespace relaypower
