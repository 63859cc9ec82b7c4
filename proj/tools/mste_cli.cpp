// Command-line front end: closed-loop simulations, static-grid baselines,
// Monte Carlo sweeps, and post-hoc evaluation of emitted logs.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mste/config.hpp"
#include "mste/logio.hpp"
#include "mste/sim.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& planner_str, std::optional<std::string> out,
                 bool emit_grid) {
    mste::RunConfig cfg = mste::parse_config(config_path);
    if (seed) cfg.scenario.seed = *seed;
    if (out) cfg.output_dir = *out;
    if (emit_grid) cfg.emit_grid = true;
    const mste::Planner planner =
        planner_str == "tcc" ? mste::Planner::tcc : mste::Planner::wcc;
    const mste::MissionLog log =
        mste::run_mission(cfg.scenario, planner, cfg.emit_grid);
    mste::write_logs(log, cfg, cfg.output_dir);
    std::cout << "planner=" << log.planner << " seed=" << log.seed
              << " termination=" << log.termination << " time=" << log.mission_time
              << " cycles=" << log.sampling_cycles
              << " sources=" << log.final_estimates.source_count() << "\n"
              << "logs written to " << cfg.output_dir << "\n";
    return 0;
}

int run_grid(const std::string& config_path, const std::string& dims,
             std::optional<std::uint64_t> seed, std::optional<std::string> out) {
    mste::RunConfig cfg = mste::parse_config(config_path);
    if (seed) cfg.scenario.seed = *seed;
    if (out) cfg.output_dir = *out;
    const auto sep = dims.find('x');
    if (sep == std::string::npos)
        throw mste::ConfigError("dims: expected RxC, e.g. 5x5");
    const int rows = std::stoi(dims.substr(0, sep));
    const int cols = std::stoi(dims.substr(sep + 1));
    const mste::MissionLog log =
        mste::run_static_grid(cfg.scenario, rows, cols, cfg.emit_grid);
    mste::write_logs(log, cfg, cfg.output_dir);
    std::cout << "static grid " << rows << "x" << cols << " termination=" << log.termination
              << " cycles=" << log.sampling_cycles << "\nlogs written to " << cfg.output_dir
              << "\n";
    return 0;
}

int run_mc(const std::string& config_path, int runs, std::optional<std::string> out,
           const std::string& planners_str, const std::string& winds_str, int threads) {
    mste::RunConfig cfg = mste::parse_config(config_path);
    if (out) cfg.output_dir = *out;

    std::vector<mste::Planner> planners;
    for (std::size_t pos = 0; pos < planners_str.size();) {
        const auto comma = planners_str.find(',', pos);
        const std::string name = planners_str.substr(pos, comma - pos);
        if (name == "wcc")
            planners.push_back(mste::Planner::wcc);
        else if (name == "tcc")
            planners.push_back(mste::Planner::tcc);
        else
            throw mste::ConfigError("planners: expected wcc or tcc, got '" + name + "'");
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    std::vector<double> winds;
    if (winds_str.empty()) {
        winds.push_back(cfg.scenario.env.wind_dir);
    } else {
        for (std::size_t pos = 0; pos < winds_str.size();) {
            const auto comma = winds_str.find(',', pos);
            winds.push_back(std::stod(winds_str.substr(pos, comma - pos)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }

    const std::vector<std::vector<mste::SourceTerm>> configs{cfg.scenario.truth};
    const auto report =
        mste::monte_carlo(cfg.scenario, configs, winds, runs, planners, threads);

    fs::create_directories(cfg.output_dir);
    json aggregate;
    aggregate["runs"] = json::array();
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        const auto& run = report.runs[i];
        char name[32];
        std::snprintf(name, sizeof(name), "run_%03zu", i);
        json entry{{"dir", name},
                   {"planner", mste::planner_name(run.planner)},
                   {"wind_dir", run.wind_dir},
                   {"seed", run.seed},
                   {"failed", run.failed}};
        if (run.failed) {
            entry["error"] = run.error;
        } else {
            entry["termination"] = run.termination;
            entry["mission_time"] = run.mission_time;
            entry["final_gospa_full"] = run.final_gospa_full;
            entry["final_gospa_loc"] = run.final_gospa_loc;
        }
        aggregate["runs"].push_back(entry);

        // Re-run to emit the full per-run logs (runs are deterministic).
        mste::RunConfig run_cfg = cfg;
        run_cfg.scenario.env.wind_dir = run.wind_dir;
        run_cfg.scenario.seed = run.seed;
        if (!run.failed) {
            const auto log = mste::run_mission(run_cfg.scenario, run.planner, cfg.emit_grid);
            mste::write_logs(log, run_cfg, fs::path(cfg.output_dir) / name);
        }
    }
    aggregate["time_grid"] = report.time_grid;
    aggregate["mean_gospa_wcc"] = report.mean_curve_wcc;
    aggregate["mean_gospa_tcc"] = report.mean_curve_tcc;
    aggregate["terminal_mean_wcc"] = report.terminal_mean_wcc;
    aggregate["terminal_mean_tcc"] = report.terminal_mean_tcc;
    std::ofstream outfile(fs::path(cfg.output_dir) / "mc_report.json");
    outfile << aggregate.dump(2) << '\n';
    std::cout << "monte carlo report written to " << cfg.output_dir << "/mc_report.json\n";
    return 0;
}

int run_eval(const std::string& log_dir, double cutoff) {
    const auto dirs = mste::discover_runs(log_dir);
    if (dirs.empty()) {
        std::cerr << "eval: no logs found under " << log_dir << "\n";
        return 1;
    }
    int successes = 0;
    for (const auto& dir : dirs) {
        const auto summary = mste::load_summary(dir);
        const auto rows = mste::load_estimates(dir);
        int last_k = 0;
        for (const auto& row : rows) last_k = std::max(last_k, row.k);
        std::vector<mste::SourceTerm> estimates;
        for (const auto& row : rows)
            if (row.k == last_k) estimates.push_back(row.estimate);
        const double full =
            mste::gospa_full(estimates, summary.truth, cutoff, summary.rate_scaling);
        const double loc = mste::localization_gospa(estimates, summary.truth, cutoff);
        if (loc <= cutoff) ++successes;
        std::cout << dir.string() << ": gospa_full=" << mste::format_double(full)
                  << " gospa_loc=" << mste::format_double(loc)
                  << " termination=" << summary.termination << "\n";
    }
    std::cout << "success_ratio(threshold=" << mste::format_double(cutoff)
              << ") = " << successes << "/" << dirs.size() << "\n";
    return 0;
}

int run_density(const std::string& log_dir, int step) {
    const auto summary = mste::load_summary(log_dir);
    const auto& scenario = summary.config.scenario;
    mste::ParticleSet belief;
    try {
        belief = mste::load_belief(log_dir, step, scenario.m_max);
    } catch (const std::exception&) {
        std::cerr << "density: no belief snapshot for step " << step << " in " << log_dir
                  << " (rerun with emit_grid enabled)\n";
        return 1;
    }
    // Robot positions at the step's sampling time.
    const auto metrics = mste::load_metrics(log_dir);
    double t_event = 0.0;
    for (const auto& row : metrics)
        if (row.k == step) t_event = row.t;
    std::vector<mste::Vec2> positions(scenario.robots.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        positions[i] = scenario.robots[i].position;
    for (const auto& tick : mste::load_trajectory(log_dir))
        if (tick.t <= t_event + 1e-9 && tick.robot < static_cast<int>(positions.size()))
            positions[tick.robot] = tick.position;

    auto field = mste::build_density(belief, scenario.domain, scenario.wcc.grid_resolution);
    mste::assign_partition(field, positions, scenario.wcc.alpha, scenario.env.wind_unit());

    char name[32];
    std::snprintf(name, sizeof(name), "density_%04d.csv", step);
    const fs::path out_path = fs::path(log_dir) / name;
    std::ofstream out(out_path);
    out << "ix,iy,x,y,phi,owner\n";
    for (int iy = 0; iy < field.ny; ++iy)
        for (int ix = 0; ix < field.nx; ++ix) {
            const auto q = field.center(ix, iy);
            const int idx = field.index(ix, iy);
            out << ix << ',' << iy << ',' << mste::format_double(q.x) << ','
                << mste::format_double(q.y) << ',' << mste::format_double(field.phi[idx]) << ','
                << field.owner[idx] << '\n';
        }
    std::cout << "density grid written to " << out_path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-source term estimation with coverage-controlled mobile sensing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "mste 0.1.0");

    std::string config_path;
    std::string planner = "wcc";
    std::string out_dir;
    std::string dims = "5x5";
    std::string log_dir;
    std::string planners = "wcc";
    std::string winds;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool out_given = false;
    bool emit_grid = false;
    int runs = 1;
    int threads = 0;
    int step = 1;
    double cutoff = 10.0;

    auto* sim = app.add_subcommand("simulate", "Run one closed-loop mission");
    sim->add_option("--config", config_path, "JSON scenario config")->required();
    sim->add_option("--seed", seed, "Override the config seed")->each([&](const std::string&) {
        seed_given = true;
    });
    sim->add_option("--planner", planner, "wcc|tcc")
        ->check(CLI::IsMember({"wcc", "tcc"}));
    sim->add_option("--out", out_dir, "Output directory")->each([&](const std::string&) {
        out_given = true;
    });
    sim->add_flag("--emit-grid", emit_grid, "Also write per-event belief snapshots");

    auto* grid = app.add_subcommand("grid", "Run a static sensor grid baseline");
    grid->add_option("--config", config_path, "JSON scenario config")->required();
    grid->add_option("--dims", dims, "Grid dimensions RxC");
    grid->add_option("--seed", seed, "Override the config seed")->each([&](const std::string&) {
        seed_given = true;
    });
    grid->add_option("--out", out_dir, "Output directory")->each([&](const std::string&) {
        out_given = true;
    });

    auto* mc = app.add_subcommand("mc", "Monte Carlo sweep of the config scenario");
    mc->add_option("--config", config_path, "JSON scenario config")->required();
    mc->add_option("--runs", runs, "Runs per (wind, planner) cell")->required();
    mc->add_option("--out", out_dir, "Output directory")->each([&](const std::string&) {
        out_given = true;
    });
    mc->add_option("--planners", planners, "Comma list of wcc,tcc");
    mc->add_option("--winds", winds, "Comma list of wind directions (rad)");
    mc->add_option("--threads", threads, "Worker threads (0 = auto)");

    auto* eval = app.add_subcommand("eval", "Recompute GOSPA/SR from emitted logs");
    eval->add_option("--log", log_dir, "Run directory or directory of runs")->required();
    eval->add_option("--cutoff", cutoff, "GOSPA cutoff = success threshold");

    auto* density = app.add_subcommand("density", "Dump phi and partition grids for a step");
    density->add_option("--log", log_dir, "Run directory")->required();
    density->add_option("--step", step, "Sampling event index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion")
            return app.exit(e);
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 2;
    }

    const auto opt_seed =
        seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt;
    const auto opt_out = out_given ? std::optional<std::string>(out_dir) : std::nullopt;
    try {
        if (sim->parsed()) return run_simulate(config_path, opt_seed, planner, opt_out, emit_grid);
        if (grid->parsed()) return run_grid(config_path, dims, opt_seed, opt_out);
        if (mc->parsed()) return run_mc(config_path, runs, opt_out, planners, winds, threads);
        if (eval->parsed()) return run_eval(log_dir, cutoff);
        if (density->parsed()) return run_density(log_dir, step);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
