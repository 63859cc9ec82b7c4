#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mste/belief.hpp"
#include "mste/drive.hpp"
#include "mste/extract.hpp"
#include "mste/gospa.hpp"
#include "mste/plume.hpp"
#include "mste/wcc.hpp"

namespace mste {

enum class Planner { wcc, tcc };

const char* planner_name(Planner p);

/// Everything one closed-loop run needs, including its seed.
struct Scenario {
    Domain domain{0.0, 50.0, 0.0, 50.0};
    EnvParams env;
    std::vector<SourceTerm> truth;
    std::vector<RobotState> robots;
    SensorModel sensor;
    int m_max = 4;
    FilterParams filter;
    CardinalityKernel kernel;
    DiffusionNoise noise;
    BirthPrior birth;
    ControlGains gains;
    WccParams wcc;
    double stop_threshold = 4.0;  // sigma_th
    double sample_dwell = 5.0;    // s of sustained convergence before sampling
    double max_time = 200.0;      // s
    double gospa_cutoff = 10.0;
    std::uint64_t seed = 1;

    /// Empty string when valid, otherwise the first violated constraint.
    std::string validate() const;
};

/// Compact start formation in the lower-left corner of the domain.
std::vector<RobotState> corner_start(const Domain& domain, int n);

struct TickRecord {
    double t = 0.0;
    int robot = 0;
    Vec2 position;
    double heading = 0.0;
    double v = 0.0;
    double omega = 0.0;
    bool operator==(const TickRecord&) const = default;
};

struct SampleRecord {
    int k = 0;
    double t = 0.0;
    Measurement measurement;
    bool operator==(const SampleRecord&) const = default;
};

struct EstimateRecord {
    int k = 0;
    int label = 0;
    double existence = 0.0;
    SourceTerm estimate;
    bool operator==(const EstimateRecord&) const = default;
};

struct EventRecord {
    int k = 0;
    double t = 0.0;
    int source_count = 0;
    double sigma_theta = 0.0;
    double gospa_full = 0.0;
    double gospa_loc = 0.0;
    double objective = 0.0;
    bool operator==(const EventRecord&) const = default;
};

struct MissionLog {
    std::vector<TickRecord> trajectory;
    std::vector<SampleRecord> samples;
    std::vector<EstimateRecord> estimates;  // reported labels per event
    std::vector<EventRecord> events;
    std::vector<std::pair<double, double>> objective_trace;  // (t, H_V) per control tick
    std::vector<std::string> notes;         // e.g. degeneracy recoveries
    std::string termination;                // converged | timeout | degenerate
    double mission_time = 0.0;
    int sampling_cycles = 0;
    EstimateSet final_estimates;
    std::vector<SourceTerm> truth;
    double gospa_cutoff = 10.0;
    double rate_scaling = 1.0;
    std::uint64_t seed = 0;
    std::string planner;
    std::vector<ParticleSet> belief_snapshots;  // one per event when requested
};

/// Closed-loop mission: sample, update, then alternate coverage-driven motion
/// with stop-and-sample belief updates until the normed uncertainty drops
/// below the stop threshold or time runs out. The traditional planner is the
/// wind-aware one at alpha = 0.
MissionLog run_mission(const Scenario& scenario, Planner planner, bool keep_beliefs = false);

/// Filter-only baseline: a fixed grid of sensors (inset half a pitch from the
/// boundary) sampling jointly every sample_dwell seconds.
MissionLog run_static_grid(const Scenario& scenario, int rows, int cols,
                           bool keep_beliefs = false);

struct MonteCarloRun {
    int config_index = 0;
    double wind_dir = 0.0;
    Planner planner = Planner::wcc;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    std::string termination;
    double mission_time = 0.0;
    int source_count = 0;
    double final_gospa_full = 0.0;
    double final_gospa_loc = 0.0;
    std::vector<std::pair<double, double>> gospa_curve;  // (t, gospa_full) per event
};

struct MonteCarloReport {
    std::vector<MonteCarloRun> runs;
    std::vector<double> time_grid;  // 1 s steps up to max_time
    std::vector<double> mean_curve_wcc;
    std::vector<double> mean_curve_tcc;
    double terminal_window = 10.0;  // s
    double terminal_mean_wcc = 0.0;
    double terminal_mean_tcc = 0.0;
};

/// Sweep of source configurations x wind directions x repeats x planners.
/// Runs execute concurrently; seeds pair WCC and TCC runs. Failed runs are
/// recorded, not fatal.
MonteCarloReport monte_carlo(const Scenario& base,
                             const std::vector<std::vector<SourceTerm>>& configs,
                             const std::vector<double>& wind_dirs, int runs_per_cell,
                             const std::vector<Planner>& planners, int threads = 0);

/// Step-function value of a (t, value) event curve at time t (last event at or
/// before t; the first value before any event).
double curve_value_at(const std::vector<std::pair<double, double>>& curve, double t);

/// Fraction of runs whose final localization GOSPA at cutoff = threshold is
/// within the threshold. Throws std::invalid_argument on an empty set.
double success_ratio(std::span<const MissionLog> logs, double threshold);

}  // namespace mste
