#include "mste/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace mste {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& j, const std::string& context,
                    const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.contains(key))
            throw ConfigError(context + ": unknown key '" + key + "'");
    }
}

double get_number(const json& j, const std::string& context, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(context + "." + key + ": must be a number");
    return j[key].get<double>();
}

std::int64_t get_int(const json& j, const std::string& context, const char* key,
                     std::int64_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer())
        throw ConfigError(context + "." + key + ": must be an integer");
    return j[key].get<std::int64_t>();
}

Domain parse_domain(const json& j, const std::string& context) {
    reject_unknown(j, context, {"x_min", "x_max", "y_min", "y_max"});
    Domain d;
    d.x_min = get_number(j, context, "x_min", 0.0);
    d.x_max = get_number(j, context, "x_max", 0.0);
    d.y_min = get_number(j, context, "y_min", 0.0);
    d.y_max = get_number(j, context, "y_max", 0.0);
    if (!d.valid()) throw ConfigError(context + ": domain must have positive width and height");
    return d;
}

json domain_json(const Domain& d) {
    return {{"x_min", d.x_min}, {"x_max", d.x_max}, {"y_min", d.y_min}, {"y_max", d.y_max}};
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    reject_unknown(j, "config",
                   {"domain", "env", "sources", "robots", "robot_count", "sensor", "m_max",
                    "filter", "kernel", "noise", "birth", "gains", "coverage", "stop_threshold",
                    "sample_dwell", "max_time", "gospa_cutoff", "seed", "output_dir", "verbosity",
                    "emit_grid"});

    RunConfig cfg;
    Scenario& s = cfg.scenario;

    if (!j.contains("domain")) throw ConfigError("config.domain: required");
    s.domain = parse_domain(j["domain"], "domain");

    if (j.contains("env")) {
        const auto& e = j["env"];
        reject_unknown(e, "env", {"wind_speed", "wind_dir", "diffusivity", "lifetime"});
        s.env.wind_speed = get_number(e, "env", "wind_speed", s.env.wind_speed);
        s.env.wind_dir = get_number(e, "env", "wind_dir", s.env.wind_dir);
        s.env.diffusivity = get_number(e, "env", "diffusivity", s.env.diffusivity);
        s.env.lifetime = get_number(e, "env", "lifetime", s.env.lifetime);
        if (s.env.wind_speed < 0.0) throw ConfigError("env.wind_speed: must be non-negative");
        if (s.env.diffusivity <= 0.0) throw ConfigError("env.diffusivity: must be positive");
        if (s.env.lifetime <= 0.0) throw ConfigError("env.lifetime: must be positive");
        if (s.env.wind_dir < -M_PI || s.env.wind_dir >= M_PI)
            throw ConfigError("env.wind_dir: must lie in [-pi, pi)");
    }

    if (!j.contains("sources") || !j["sources"].is_array() || j["sources"].empty())
        throw ConfigError("config.sources: at least one source is required");
    for (const auto& src : j["sources"]) {
        reject_unknown(src, "sources[]", {"x", "y", "rate"});
        SourceTerm term;
        term.position.x = get_number(src, "sources[]", "x", 0.0);
        term.position.y = get_number(src, "sources[]", "y", 0.0);
        term.rate = get_number(src, "sources[]", "rate", 0.0);
        if (term.rate <= 0.0) throw ConfigError("sources[].rate: must be positive");
        if (!s.domain.contains(term.position))
            throw ConfigError("sources[]: position must lie inside the domain");
        s.truth.push_back(term);
    }

    if (j.contains("m_max")) {
        s.m_max = static_cast<int>(get_int(j, "config", "m_max", s.m_max));
        if (s.m_max < 1 || s.m_max > 6) throw ConfigError("m_max: must lie in [1, 6]");
    }

    if (j.contains("robots")) {
        if (j.contains("robot_count"))
            throw ConfigError("config: give either robots or robot_count, not both");
        for (const auto& r : j["robots"]) {
            reject_unknown(r, "robots[]", {"x", "y", "heading"});
            RobotState robot;
            robot.position.x = get_number(r, "robots[]", "x", 0.0);
            robot.position.y = get_number(r, "robots[]", "y", 0.0);
            robot.heading = wrap_angle(get_number(r, "robots[]", "heading", M_PI / 2.0));
            if (!s.domain.contains(robot.position))
                throw ConfigError("robots[]: position must lie inside the domain");
            s.robots.push_back(robot);
        }
    } else {
        const int count = static_cast<int>(get_int(j, "config", "robot_count", 6));
        if (count < 1) throw ConfigError("robot_count: must be positive");
        s.robots = corner_start(s.domain, count);
    }
    if (static_cast<int>(s.robots.size()) < s.m_max)
        throw ConfigError("robots: need at least m_max robots");

    if (j.contains("sensor")) {
        const auto& e = j["sensor"];
        reject_unknown(e, "sensor", {"noise_std", "threshold", "detect_prob"});
        s.sensor.noise_std = get_number(e, "sensor", "noise_std", s.sensor.noise_std);
        s.sensor.threshold = get_number(e, "sensor", "threshold", s.sensor.threshold);
        s.sensor.detect_prob = get_number(e, "sensor", "detect_prob", s.sensor.detect_prob);
        if (s.sensor.noise_std <= 0.0) throw ConfigError("sensor.noise_std: must be positive");
        if (s.sensor.threshold <= 0.0) throw ConfigError("sensor.threshold: must be positive");
        if (s.sensor.detect_prob <= 0.0 || s.sensor.detect_prob > 1.0)
            throw ConfigError("sensor.detect_prob: must lie in (0, 1]");
    }

    if (j.contains("filter")) {
        const auto& e = j["filter"];
        reject_unknown(e, "filter", {"particles", "resample_threshold"});
        s.filter.n_particles =
            static_cast<int>(get_int(e, "filter", "particles", s.filter.n_particles));
        if (s.filter.n_particles < 1) throw ConfigError("filter.particles: must be positive");
        s.filter.resample_threshold = static_cast<int>(
            get_int(e, "filter", "resample_threshold", s.filter.n_particles / 2));
        if (s.filter.resample_threshold < 1 ||
            s.filter.resample_threshold > s.filter.n_particles)
            throw ConfigError("filter.resample_threshold: must lie in [1, particles]");
    } else {
        s.filter.resample_threshold = s.filter.n_particles / 2;
    }

    if (j.contains("kernel")) {
        const auto& e = j["kernel"];
        reject_unknown(e, "kernel", {"birth_prob", "death_prob", "merge_dist", "min_rate"});
        s.kernel.birth_prob = get_number(e, "kernel", "birth_prob", s.kernel.birth_prob);
        s.kernel.death_prob = get_number(e, "kernel", "death_prob", s.kernel.death_prob);
        s.kernel.merge_dist = get_number(e, "kernel", "merge_dist", s.kernel.merge_dist);
        s.kernel.min_rate = get_number(e, "kernel", "min_rate", s.kernel.min_rate);
        if (s.kernel.birth_prob < 0.0 || s.kernel.death_prob < 0.0 ||
            s.kernel.birth_prob + s.kernel.death_prob > 1.0)
            throw ConfigError("kernel: birth_prob + death_prob must lie in [0, 1]");
        if (s.kernel.merge_dist <= 0.0) throw ConfigError("kernel.merge_dist: must be positive");
        if (s.kernel.min_rate <= 0.0) throw ConfigError("kernel.min_rate: must be positive");
    }

    if (j.contains("noise")) {
        const auto& e = j["noise"];
        reject_unknown(e, "noise", {"sigma_x", "sigma_y", "sigma_q"});
        s.noise.sigma_x = get_number(e, "noise", "sigma_x", s.noise.sigma_x);
        s.noise.sigma_y = get_number(e, "noise", "sigma_y", s.noise.sigma_y);
        s.noise.sigma_q = get_number(e, "noise", "sigma_q", s.noise.sigma_q);
        if (s.noise.sigma_x <= 0.0 || s.noise.sigma_y <= 0.0 || s.noise.sigma_q <= 0.0)
            throw ConfigError("noise: all sigmas must be positive");
    }

    s.birth.region = s.domain;
    if (j.contains("birth")) {
        const auto& e = j["birth"];
        reject_unknown(e, "birth", {"gamma_shape", "gamma_scale", "region"});
        s.birth.gamma_shape = get_number(e, "birth", "gamma_shape", s.birth.gamma_shape);
        s.birth.gamma_scale = get_number(e, "birth", "gamma_scale", s.birth.gamma_scale);
        if (e.contains("region")) s.birth.region = parse_domain(e["region"], "birth.region");
        if (s.birth.gamma_shape <= 0.0) throw ConfigError("birth.gamma_shape: must be positive");
        if (s.birth.gamma_scale <= 0.0) throw ConfigError("birth.gamma_scale: must be positive");
    }

    if (j.contains("gains")) {
        const auto& e = j["gains"];
        reject_unknown(e, "gains", {"k_v", "k_omega", "v_max", "omega_max", "dt", "conv_eps"});
        s.gains.k_v = get_number(e, "gains", "k_v", s.gains.k_v);
        s.gains.k_omega = get_number(e, "gains", "k_omega", s.gains.k_omega);
        s.gains.v_max = get_number(e, "gains", "v_max", s.gains.v_max);
        s.gains.omega_max = get_number(e, "gains", "omega_max", s.gains.omega_max);
        s.gains.dt = get_number(e, "gains", "dt", s.gains.dt);
        s.gains.conv_eps = get_number(e, "gains", "conv_eps", s.gains.conv_eps);
        if (!s.gains.valid()) throw ConfigError("gains: all control constants must be positive");
    }

    if (j.contains("coverage")) {
        const auto& e = j["coverage"];
        reject_unknown(e, "coverage", {"alpha", "grid_resolution"});
        s.wcc.alpha = get_number(e, "coverage", "alpha", s.wcc.alpha);
        s.wcc.grid_resolution =
            get_number(e, "coverage", "grid_resolution", s.wcc.grid_resolution);
        if (s.wcc.alpha <= -1.0 || s.wcc.alpha > 0.0)
            throw ConfigError("coverage.alpha: alpha must lie in (-1, 0]");
        if (s.wcc.grid_resolution <= 0.0)
            throw ConfigError("coverage.grid_resolution: must be positive");
    }

    s.stop_threshold = get_number(j, "config", "stop_threshold", s.stop_threshold);
    if (s.stop_threshold <= 0.0) throw ConfigError("stop_threshold: must be positive");
    s.sample_dwell = get_number(j, "config", "sample_dwell", s.sample_dwell);
    if (s.sample_dwell <= 0.0) throw ConfigError("sample_dwell: must be positive");
    s.max_time = get_number(j, "config", "max_time", s.max_time);
    if (s.max_time <= 0.0) throw ConfigError("max_time: must be positive");
    s.gospa_cutoff = get_number(j, "config", "gospa_cutoff", s.gospa_cutoff);
    if (s.gospa_cutoff <= 0.0) throw ConfigError("gospa_cutoff: must be positive");

    if (!j.contains("seed")) throw ConfigError("config.seed: required");
    s.seed = static_cast<std::uint64_t>(get_int(j, "config", "seed", 1));

    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw ConfigError("output_dir: must be a string");
        cfg.output_dir = j["output_dir"].get<std::string>();
    }
    cfg.verbosity = static_cast<int>(get_int(j, "config", "verbosity", cfg.verbosity));
    if (j.contains("emit_grid")) {
        if (!j["emit_grid"].is_boolean()) throw ConfigError("emit_grid: must be a boolean");
        cfg.emit_grid = j["emit_grid"].get<bool>();
    }

    if (const auto err = s.validate(); !err.empty()) throw ConfigError(err);
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

std::string serialize_config(const RunConfig& cfg) {
    const Scenario& s = cfg.scenario;
    json j;
    j["domain"] = domain_json(s.domain);
    j["env"] = {{"wind_speed", s.env.wind_speed},
                {"wind_dir", s.env.wind_dir},
                {"diffusivity", s.env.diffusivity},
                {"lifetime", s.env.lifetime}};
    j["sources"] = json::array();
    for (const auto& src : s.truth)
        j["sources"].push_back({{"x", src.position.x}, {"y", src.position.y}, {"rate", src.rate}});
    j["robots"] = json::array();
    for (const auto& r : s.robots)
        j["robots"].push_back(
            {{"x", r.position.x}, {"y", r.position.y}, {"heading", r.heading}});
    j["sensor"] = {{"noise_std", s.sensor.noise_std},
                   {"threshold", s.sensor.threshold},
                   {"detect_prob", s.sensor.detect_prob}};
    j["m_max"] = s.m_max;
    j["filter"] = {{"particles", s.filter.n_particles},
                   {"resample_threshold", s.filter.resample_threshold}};
    j["kernel"] = {{"birth_prob", s.kernel.birth_prob},
                   {"death_prob", s.kernel.death_prob},
                   {"merge_dist", s.kernel.merge_dist},
                   {"min_rate", s.kernel.min_rate}};
    j["noise"] = {{"sigma_x", s.noise.sigma_x},
                  {"sigma_y", s.noise.sigma_y},
                  {"sigma_q", s.noise.sigma_q}};
    j["birth"] = {{"gamma_shape", s.birth.gamma_shape},
                  {"gamma_scale", s.birth.gamma_scale},
                  {"region", domain_json(s.birth.region)}};
    j["gains"] = {{"k_v", s.gains.k_v},     {"k_omega", s.gains.k_omega},
                  {"v_max", s.gains.v_max}, {"omega_max", s.gains.omega_max},
                  {"dt", s.gains.dt},       {"conv_eps", s.gains.conv_eps}};
    j["coverage"] = {{"alpha", s.wcc.alpha}, {"grid_resolution", s.wcc.grid_resolution}};
    j["stop_threshold"] = s.stop_threshold;
    j["sample_dwell"] = s.sample_dwell;
    j["max_time"] = s.max_time;
    j["gospa_cutoff"] = s.gospa_cutoff;
    j["seed"] = s.seed;
    j["output_dir"] = cfg.output_dir;
    j["verbosity"] = cfg.verbosity;
    j["emit_grid"] = cfg.emit_grid;
    return j.dump(2);
}

}  // namespace mste
