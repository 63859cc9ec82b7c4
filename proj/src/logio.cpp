#include "mste/logio.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace mste {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return in;
}

std::string snapshot_name(int k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "belief_%04d.csv", k);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

double to_double(const std::string& s) { return std::stod(s); }

}  // namespace

void write_logs(const MissionLog& log, const RunConfig& config, const fs::path& dir) {
    fs::create_directories(dir);

    {
        auto out = open_out(dir / "trajectory.csv");
        out << "t,robot_id,x,y,gamma,v,omega\n";
        for (const auto& row : log.trajectory)
            out << format_double(row.t) << ',' << row.robot << ',' << format_double(row.position.x)
                << ',' << format_double(row.position.y) << ',' << format_double(row.heading)
                << ',' << format_double(row.v) << ',' << format_double(row.omega) << '\n';
    }
    {
        auto out = open_out(dir / "samples.csv");
        out << "k,t,robot_id,x,y,z,detected\n";
        for (const auto& row : log.samples)
            out << row.k << ',' << format_double(row.t) << ',' << row.measurement.robot_id << ','
                << format_double(row.measurement.position.x) << ','
                << format_double(row.measurement.position.y) << ','
                << format_double(row.measurement.value) << ','
                << (row.measurement.detected ? 1 : 0) << '\n';
    }
    {
        std::map<int, double> sigma_by_event;
        for (const auto& event : log.events) sigma_by_event[event.k] = event.sigma_theta;
        auto out = open_out(dir / "estimates.csv");
        out << "k,label,P_e,x,y,Q,sigma_theta\n";
        for (const auto& row : log.estimates)
            out << row.k << ',' << row.label << ',' << format_double(row.existence) << ','
                << format_double(row.estimate.position.x) << ','
                << format_double(row.estimate.position.y) << ','
                << format_double(row.estimate.rate) << ','
                << format_double(sigma_by_event[row.k]) << '\n';
    }
    {
        auto out = open_out(dir / "metrics.csv");
        out << "k,t,gospa_full,gospa_loc,H_V\n";
        for (const auto& event : log.events)
            out << event.k << ',' << format_double(event.t) << ','
                << format_double(event.gospa_full) << ',' << format_double(event.gospa_loc)
                << ',' << format_double(event.objective) << '\n';
    }
    {
        json j;
        j["version"] = "0.1.0";
        j["planner"] = log.planner;
        j["seed"] = log.seed;
        j["termination"] = log.termination;
        j["mission_time"] = log.mission_time;
        j["sampling_cycles"] = log.sampling_cycles;
        j["gospa_cutoff"] = log.gospa_cutoff;
        j["rate_scaling"] = log.rate_scaling;
        j["truth"] = json::array();
        for (const auto& s : log.truth)
            j["truth"].push_back({{"x", s.position.x}, {"y", s.position.y}, {"rate", s.rate}});
        j["final_estimates"] = json::array();
        for (int label : log.final_estimates.reported) {
            const auto& entry = log.final_estimates.labels[label];
            j["final_estimates"].push_back({{"label", label},
                                            {"P_e", entry.existence},
                                            {"x", entry.estimate.position.x},
                                            {"y", entry.estimate.position.y},
                                            {"rate", entry.estimate.rate}});
        }
        j["final_sigma_theta"] = std::isfinite(log.final_estimates.sigma_theta)
                                     ? json(log.final_estimates.sigma_theta)
                                     : json("inf");
        j["notes"] = log.notes;
        j["config"] = json::parse(serialize_config(config));
        auto out = open_out(dir / "summary.json");
        out << j.dump(2) << '\n';
    }
    if (config.emit_grid) {
        for (std::size_t i = 0; i < log.belief_snapshots.size(); ++i) {
            const int k = log.events[i].k;
            auto out = open_out(dir / snapshot_name(k));
            out << "particle,weight,m,component,x,y,q\n";
            const auto& belief = log.belief_snapshots[i];
            for (int p = 0; p < belief.size(); ++p) {
                const auto& particle = belief.particles[p];
                for (int c = 0; c < particle.cardinality(); ++c)
                    out << p << ',' << format_double(particle.weight) << ','
                        << particle.cardinality() << ',' << c << ','
                        << format_double(particle.components[c].position.x) << ','
                        << format_double(particle.components[c].position.y) << ','
                        << format_double(particle.components[c].rate) << '\n';
            }
        }
    }
}

RunSummary load_summary(const fs::path& dir) {
    auto in = open_in(dir / "summary.json");
    json j = json::parse(in);
    RunSummary summary;
    summary.planner = j.value("planner", "");
    summary.termination = j.value("termination", "");
    summary.mission_time = j.value("mission_time", 0.0);
    summary.sampling_cycles = j.value("sampling_cycles", 0);
    summary.gospa_cutoff = j.value("gospa_cutoff", 10.0);
    summary.rate_scaling = j.value("rate_scaling", 1.0);
    summary.seed = j.value("seed", 0ULL);
    for (const auto& s : j["truth"])
        summary.truth.push_back({{s["x"].get<double>(), s["y"].get<double>()},
                                 s["rate"].get<double>()});
    summary.config = parse_config_text(j["config"].dump());
    return summary;
}

std::vector<EstimateRow> load_estimates(const fs::path& dir) {
    auto in = open_in(dir / "estimates.csv");
    std::string line;
    std::getline(in, line);  // header
    std::vector<EstimateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        rows.push_back({std::stoi(f[0]),
                        std::stoi(f[1]),
                        to_double(f[2]),
                        {{to_double(f[3]), to_double(f[4])}, to_double(f[5])},
                        to_double(f[6])});
    }
    return rows;
}

std::vector<MetricsRow> load_metrics(const fs::path& dir) {
    auto in = open_in(dir / "metrics.csv");
    std::string line;
    std::getline(in, line);
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        rows.push_back({std::stoi(f[0]), to_double(f[1]), to_double(f[2]), to_double(f[3]),
                        to_double(f[4])});
    }
    return rows;
}

std::vector<TickRecord> load_trajectory(const fs::path& dir) {
    auto in = open_in(dir / "trajectory.csv");
    std::string line;
    std::getline(in, line);
    std::vector<TickRecord> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        rows.push_back({to_double(f[0]), std::stoi(f[1]),
                        {to_double(f[2]), to_double(f[3])}, to_double(f[4]), to_double(f[5]),
                        to_double(f[6])});
    }
    return rows;
}

ParticleSet load_belief(const fs::path& dir, int k, int m_max) {
    auto in = open_in(dir / snapshot_name(k));
    std::string line;
    std::getline(in, line);
    ParticleSet belief;
    belief.m_max = m_max;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        const int p = std::stoi(f[0]);
        if (p >= belief.size()) belief.particles.resize(p + 1);
        belief.particles[p].weight = to_double(f[1]);
        belief.particles[p].components.push_back(
            {{to_double(f[4]), to_double(f[5])}, to_double(f[6])});
    }
    return belief;
}

std::vector<fs::path> discover_runs(const fs::path& root) {
    std::vector<fs::path> dirs;
    if (fs::exists(root / "summary.json")) dirs.push_back(root);
    if (fs::is_directory(root)) {
        for (const auto& entry : fs::directory_iterator(root))
            if (entry.is_directory() && fs::exists(entry.path() / "summary.json"))
                dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

}  // namespace mste
