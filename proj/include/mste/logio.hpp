#pragma once
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mste/config.hpp"
#include "mste/sim.hpp"

namespace mste {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Emit the run artifacts into dir: trajectory.csv, samples.csv,
/// estimates.csv, metrics.csv, and summary.json. With emit_grid also one
/// belief_%04d.csv snapshot per sampling event (requires a log recorded with
/// belief snapshots). I/O failures raise std::runtime_error naming the path.
void write_logs(const MissionLog& log, const RunConfig& config,
                const std::filesystem::path& dir);

/// Round-trip readers for eval/density.
struct RunSummary {
    std::string planner;
    std::string termination;
    double mission_time = 0.0;
    int sampling_cycles = 0;
    double gospa_cutoff = 10.0;
    double rate_scaling = 1.0;
    std::uint64_t seed = 0;
    std::vector<SourceTerm> truth;
    RunConfig config;  // effective configuration echo
};

RunSummary load_summary(const std::filesystem::path& dir);

struct EstimateRow {
    int k = 0;
    int label = 0;
    double existence = 0.0;
    SourceTerm estimate;
    double sigma_theta = 0.0;
};

std::vector<EstimateRow> load_estimates(const std::filesystem::path& dir);

struct MetricsRow {
    int k = 0;
    double t = 0.0;
    double gospa_full = 0.0;
    double gospa_loc = 0.0;
    double objective = 0.0;
};

std::vector<MetricsRow> load_metrics(const std::filesystem::path& dir);

std::vector<TickRecord> load_trajectory(const std::filesystem::path& dir);

/// Belief snapshot for sampling event k (requires emit_grid at write time).
ParticleSet load_belief(const std::filesystem::path& dir, int k, int m_max);

/// Directories under root (or root itself) containing a summary.json.
std::vector<std::filesystem::path> discover_runs(const std::filesystem::path& root);

}  // namespace mste
