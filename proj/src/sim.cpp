#include "mste/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

namespace mste {

const char* planner_name(Planner p) { return p == Planner::wcc ? "wcc" : "tcc"; }

std::string Scenario::validate() const {
    if (!domain.valid()) return "domain must have positive area";
    if (!env.valid()) return "env: wind_speed >= 0, diffusivity > 0, lifetime > 0 required";
    if (env.wind_dir < -M_PI || env.wind_dir >= M_PI) return "env.wind_dir must lie in [-pi, pi)";
    for (const auto& s : truth) {
        if (s.rate <= 0.0) return "source rates must be positive";
        if (!domain.contains(s.position)) return "sources must lie inside the domain";
    }
    for (const auto& r : robots)
        if (!domain.contains(r.position)) return "robots must start inside the domain";
    if (!sensor.valid()) return "sensor: noise_std > 0, threshold > 0, detect_prob in (0,1]";
    if (m_max < 1 || m_max > 6) return "m_max must lie in [1, 6]";
    if (!robots.empty() && static_cast<int>(robots.size()) < m_max)
        return "robot count must be at least m_max";
    if (!filter.valid()) return "filter: 0 < resample_threshold <= n_particles required";
    if (!kernel.valid()) return "kernel: probabilities must be non-negative with sum <= 1";
    if (!noise.valid()) return "noise: all sigmas must be positive";
    if (!birth.valid()) return "birth: positive gamma shape/scale and a valid region required";
    if (!gains.valid()) return "gains: all control constants must be positive";
    if (!wcc.valid()) return "wcc: alpha must lie in (-1, 0] and grid_resolution > 0";
    if (stop_threshold <= 0.0) return "stop_threshold must be positive";
    if (sample_dwell <= 0.0) return "sample_dwell must be positive";
    if (max_time <= 0.0) return "max_time must be positive";
    if (gospa_cutoff <= 0.0) return "gospa_cutoff must be positive";
    return {};
}

std::vector<RobotState> corner_start(const Domain& domain, int n) {
    std::vector<RobotState> robots(n);
    const double pitch = std::min(domain.width(), domain.height()) / 12.0;
    const int per_row = std::max(1, static_cast<int>(std::ceil(std::sqrt(n))));
    for (int i = 0; i < n; ++i) {
        const int row = i / per_row;
        const int col = i % per_row;
        robots[i].position = domain.clamp({domain.x_min + pitch * (1.0 + col),
                                           domain.y_min + pitch * (1.0 + row)});
        robots[i].heading = M_PI / 2.0;
    }
    return robots;
}

namespace {

struct MissionState {
    const Scenario& scenario;
    double alpha;
    Vec2 wind_unit;
    double rate_scaling;
    MissionLog log;
    ParticleSet belief;
    std::vector<RobotState> robots;
    double t = 0.0;
    int k = 0;
    EstimateSet estimates;
    bool keep_beliefs = false;

    MissionState(const Scenario& s, double a, bool keep)
        : scenario(s),
          alpha(a),
          wind_unit(s.env.wind_unit()),
          rate_scaling(rate_scale(s.domain, s.birth)),
          keep_beliefs(keep) {}

    std::vector<Vec2> positions() const {
        std::vector<Vec2> p;
        p.reserve(robots.size());
        for (const auto& r : robots) p.push_back(r.position);
        return p;
    }

    std::vector<Measurement> sample_at(std::span<const Vec2> points) {
        std::vector<Measurement> readings;
        readings.reserve(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            Rng rng = Rng::stream(scenario.seed, RngPurpose::measurement,
                                  static_cast<std::uint64_t>(k), i);
            readings.push_back(sample_measurement(scenario.truth, scenario.env, scenario.sensor,
                                                  points[i], static_cast<int>(i), rng));
            log.samples.push_back({k, t, readings.back()});
        }
        return readings;
    }

    /// Belief update with the degeneracy recovery policy: retry with the
    /// likelihood noise inflated tenfold, at most three times.
    bool update_belief(std::span<const Measurement> readings) {
        SensorModel sensor = scenario.sensor;
        for (int attempt = 0; attempt <= 3; ++attempt) {
            try {
                belief = pf_step(belief, readings, scenario.kernel, scenario.noise,
                                 scenario.birth, scenario.env, sensor, scenario.filter,
                                 scenario.domain, scenario.seed,
                                 static_cast<std::uint64_t>(k));
                if (attempt > 0)
                    log.notes.push_back("k=" + std::to_string(k) + ": recovered with noise_std=" +
                                        std::to_string(sensor.noise_std));
                return true;
            } catch (const DegenerateBeliefError&) {
                sensor.noise_std *= 10.0;
            }
        }
        log.notes.push_back("k=" + std::to_string(k) + ": belief degenerate beyond recovery");
        return false;
    }

    /// Extraction, metrics, and the event record for the current step.
    void record_event(const SensingField& field) {
        estimates = extract_estimates(belief, rate_scaling, scenario.seed,
                                      static_cast<std::uint64_t>(k));
        const auto reported = estimates.reported_terms();
        EventRecord event;
        event.k = k;
        event.t = t;
        event.source_count = estimates.source_count();
        event.sigma_theta = estimates.sigma_theta;
        event.gospa_full =
            gospa_full(reported, scenario.truth, scenario.gospa_cutoff, rate_scaling);
        event.gospa_loc = localization_gospa(reported, scenario.truth, scenario.gospa_cutoff);
        event.objective = objective(positions(), field, alpha, wind_unit);
        log.events.push_back(event);
        for (int j : estimates.reported)
            log.estimates.push_back({k, j, estimates.labels[j].existence,
                                     estimates.labels[j].estimate});
        if (keep_beliefs) log.belief_snapshots.push_back(belief);
    }

    void finish(const std::string& termination) {
        log.termination = termination;
        log.mission_time = t;
        log.sampling_cycles = k;
        log.final_estimates = estimates;
        log.truth = scenario.truth;
        log.gospa_cutoff = scenario.gospa_cutoff;
        log.rate_scaling = rate_scaling;
        log.seed = scenario.seed;
    }
};

}  // namespace

MissionLog run_mission(const Scenario& scenario, Planner planner, bool keep_beliefs) {
    if (const auto err = scenario.validate(); !err.empty())
        throw std::invalid_argument("scenario: " + err);
    if (scenario.robots.empty()) throw std::invalid_argument("scenario: no robots configured");

    MissionState st(scenario, planner == Planner::tcc ? 0.0 : scenario.wcc.alpha, keep_beliefs);
    st.log.planner = planner_name(planner);
    st.robots = scenario.robots;
    st.belief = sample_prior_belief(scenario.filter.n_particles, scenario.m_max, scenario.birth,
                                    scenario.seed);

    // Initial sample at the start formation.
    st.k = 1;
    const auto first = st.sample_at(st.positions());
    if (!st.update_belief(first)) {
        SensingField field = build_density(st.belief, scenario.domain, scenario.wcc.grid_resolution);
        assign_partition(field, st.positions(), st.alpha, st.wind_unit);
        st.record_event(field);
        st.finish("degenerate");
        return st.log;
    }
    SensingField field = build_density(st.belief, scenario.domain, scenario.wcc.grid_resolution);
    assign_partition(field, st.positions(), st.alpha, st.wind_unit);
    st.record_event(field);

    const double dt = scenario.gains.dt;
    while (st.estimates.sigma_theta >= scenario.stop_threshold && st.t < scenario.max_time) {
        // Drive to the critical points of the current density; sample after the
        // team has stayed converged for the full dwell interval.
        double dwell = 0.0;
        bool sampled_due = false;
        while (st.t < scenario.max_time) {
            const auto positions = st.positions();
            assign_partition(field, positions, st.alpha, st.wind_unit);
            std::vector<Vec2> targets(st.robots.size());
            for (std::size_t i = 0; i < st.robots.size(); ++i) {
                const auto moments = cell_moments(static_cast<int>(i), positions, field, st.alpha,
                                                  st.wind_unit);
                targets[i] = critical_point(moments, st.alpha, st.wind_unit, scenario.domain);
            }
            double residual = 0.0;
            std::vector<ControlCommand> commands(st.robots.size());
            for (std::size_t i = 0; i < st.robots.size(); ++i) {
                commands[i] = control(st.robots[i], targets[i], scenario.gains);
                residual += commands[i].v + std::fabs(commands[i].omega);
            }
            st.log.objective_trace.emplace_back(st.t,
                                                objective(positions, field, st.alpha, st.wind_unit));
            for (std::size_t i = 0; i < st.robots.size(); ++i)
                st.log.trajectory.push_back({st.t, static_cast<int>(i), st.robots[i].position,
                                             st.robots[i].heading, commands[i].v,
                                             commands[i].omega});
            dwell = residual < scenario.gains.conv_eps ? dwell + dt : 0.0;
            for (std::size_t i = 0; i < st.robots.size(); ++i)
                st.robots[i] = step(st.robots[i], commands[i], dt, scenario.domain);
            st.t += dt;
            if (dwell >= scenario.sample_dwell - 1e-9) {
                sampled_due = true;
                break;
            }
        }
        if (!sampled_due) break;  // timed out mid-drive

        ++st.k;
        const auto readings = st.sample_at(st.positions());
        if (!st.update_belief(readings)) {
            st.finish("degenerate");
            return st.log;
        }
        field = build_density(st.belief, scenario.domain, scenario.wcc.grid_resolution);
        assign_partition(field, st.positions(), st.alpha, st.wind_unit);
        st.record_event(field);
    }

    st.finish(st.estimates.sigma_theta < scenario.stop_threshold ? "converged" : "timeout");
    return st.log;
}

MissionLog run_static_grid(const Scenario& scenario, int rows, int cols, bool keep_beliefs) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("static grid dims must be positive");
    Scenario fixed = scenario;
    fixed.robots.clear();  // the n >= m_max rule applies to mobile teams only
    if (const auto err = fixed.validate(); !err.empty())
        throw std::invalid_argument("scenario: " + err);
    const double pitch_x = fixed.domain.width() / cols;
    const double pitch_y = fixed.domain.height() / rows;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            fixed.robots.push_back({{fixed.domain.x_min + pitch_x * (c + 0.5),
                                     fixed.domain.y_min + pitch_y * (r + 0.5)},
                                    0.0});

    MissionState st(fixed, fixed.wcc.alpha, keep_beliefs);
    st.log.planner = "static";
    st.robots = fixed.robots;
    st.belief =
        sample_prior_belief(fixed.filter.n_particles, fixed.m_max, fixed.birth, fixed.seed);

    const auto positions = st.positions();
    for (std::size_t i = 0; i < st.robots.size(); ++i)
        st.log.trajectory.push_back({0.0, static_cast<int>(i), st.robots[i].position,
                                     st.robots[i].heading, 0.0, 0.0});
    st.k = 0;
    while (st.t < fixed.max_time) {
        ++st.k;
        const auto readings = st.sample_at(positions);
        if (!st.update_belief(readings)) {
            st.finish("degenerate");
            return st.log;
        }
        SensingField field = build_density(st.belief, fixed.domain, fixed.wcc.grid_resolution);
        assign_partition(field, positions, st.alpha, st.wind_unit);
        st.record_event(field);
        if (st.estimates.sigma_theta < fixed.stop_threshold) {
            st.finish("converged");
            return st.log;
        }
        st.t += fixed.sample_dwell;
    }
    st.finish("timeout");
    return st.log;
}

double curve_value_at(const std::vector<std::pair<double, double>>& curve, double t) {
    if (curve.empty()) return std::numeric_limits<double>::quiet_NaN();
    double value = curve.front().second;
    for (const auto& [time, v] : curve) {
        if (time > t) break;
        value = v;
    }
    return value;
}

MonteCarloReport monte_carlo(const Scenario& base,
                             const std::vector<std::vector<SourceTerm>>& configs,
                             const std::vector<double>& wind_dirs, int runs_per_cell,
                             const std::vector<Planner>& planners, int threads) {
    if (configs.empty()) throw std::invalid_argument("monte_carlo: no source configurations");
    struct Job {
        Scenario scenario;
        Planner planner;
        int config_index;
    };
    std::vector<Job> jobs;
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        for (std::size_t wi = 0; wi < wind_dirs.size(); ++wi) {
            for (int rep = 0; rep < runs_per_cell; ++rep) {
                for (Planner planner : planners) {
                    Job job;
                    job.scenario = base;
                    job.scenario.truth = configs[ci];
                    job.scenario.env.wind_dir = wind_dirs[wi];
                    // Seeds pair planners: identical across the planner axis.
                    job.scenario.seed = base.seed + 10000 * ci + 1000 * wi + rep;
                    job.planner = planner;
                    job.config_index = static_cast<int>(ci);
                    jobs.push_back(std::move(job));
                }
            }
        }
    }

    std::vector<MonteCarloRun> runs(jobs.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            MonteCarloRun& run = runs[i];
            run.config_index = job.config_index;
            run.wind_dir = job.scenario.env.wind_dir;
            run.planner = job.planner;
            run.seed = job.scenario.seed;
            try {
                const MissionLog log = run_mission(job.scenario, job.planner);
                run.termination = log.termination;
                run.mission_time = log.mission_time;
                run.source_count = log.final_estimates.source_count();
                run.final_gospa_full = log.events.back().gospa_full;
                run.final_gospa_loc = log.events.back().gospa_loc;
                for (const auto& event : log.events)
                    run.gospa_curve.emplace_back(event.t, event.gospa_full);
            } catch (const std::exception& e) {
                run.failed = true;
                run.error = e.what();
            }
        }
    };
    int n_threads = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    MonteCarloReport report;
    report.runs = std::move(runs);
    for (double t = 0.0; t <= base.max_time + 1e-9; t += 1.0) report.time_grid.push_back(t);
    auto mean_curve = [&](Planner planner) {
        std::vector<double> mean(report.time_grid.size(), 0.0);
        int count = 0;
        for (const auto& run : report.runs) {
            if (run.planner != planner || run.failed || run.gospa_curve.empty()) continue;
            ++count;
            for (std::size_t i = 0; i < report.time_grid.size(); ++i)
                mean[i] += curve_value_at(run.gospa_curve, report.time_grid[i]);
        }
        if (count > 0)
            for (double& v : mean) v /= count;
        return mean;
    };
    report.mean_curve_wcc = mean_curve(Planner::wcc);
    report.mean_curve_tcc = mean_curve(Planner::tcc);

    auto terminal_mean = [&](Planner planner) {
        double total = 0.0;
        int count = 0;
        for (const auto& run : report.runs) {
            if (run.planner != planner || run.failed || run.gospa_curve.empty()) continue;
            double acc = 0.0;
            int samples = 0;
            for (double t = base.max_time - report.terminal_window; t <= base.max_time + 1e-9;
                 t += 1.0) {
                acc += curve_value_at(run.gospa_curve, t);
                ++samples;
            }
            total += acc / samples;
            ++count;
        }
        return count > 0 ? total / count : 0.0;
    };
    report.terminal_mean_wcc = terminal_mean(Planner::wcc);
    report.terminal_mean_tcc = terminal_mean(Planner::tcc);
    return report;
}

double success_ratio(std::span<const MissionLog> logs, double threshold) {
    if (logs.empty()) throw std::invalid_argument("success_ratio: no logs");
    int passed = 0;
    for (const auto& log : logs) {
        const auto reported = log.final_estimates.reported_terms();
        if (localization_gospa(reported, log.truth, threshold) <= threshold) ++passed;
    }
    return static_cast<double>(passed) / static_cast<double>(logs.size());
}

}  // namespace mste
