#pragma once
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mste/belief.hpp"

namespace mste {

using Point3 = std::array<double, 3>;  // (x, y, scaled rate)

/// Pooled source component with a back-reference to its particle.
struct PooledComponent {
    SourceTerm term;
    int particle = 0;
    int component = 0;
};

/// Rate scaling used whenever positions and rates share a metric: balances
/// meters against g/s as (domain diagonal) / (prior mean rate).
double rate_scale(const Domain& domain, const BirthPrior& birth);

/// Flatten all components of all particles, keeping back-references.
std::vector<PooledComponent> pool_components(const ParticleSet& belief);

/// Lloyd's algorithm from a k-means++ seeding; deterministic given the rng.
/// Fewer points than clusters are padded by jittered duplicates. Empty
/// clusters re-seed to the point farthest from its assigned centroid.
std::vector<Point3> kmeans(std::span<const Point3> points, int k, Rng& rng);

/// Injective map from components to centroid labels minimizing the summed
/// Euclidean distances; exhaustive over all injective assignments (k <= 6).
/// Ties break toward the lexicographically smallest label vector.
std::vector<int> canonical_assign(std::span<const Point3> components,
                                  std::span<const Point3> centroids);

/// Per-particle canonical label of every component.
struct CanonicalAssignments {
    std::vector<std::vector<int>> label_of;  // [particle][component] -> label
};

CanonicalAssignments assign_all(const ParticleSet& belief, std::span<const Point3> centroids,
                                double rate_scaling);

/// P_e per label: total weight of particles that populate it.
std::vector<double> existence_probabilities(const ParticleSet& belief,
                                            const CanonicalAssignments& assignments, int n_labels);

struct LabelEstimate {
    Point3 centroid{};           // cluster anchor, rate unscaled back to g/s
    double existence = 0.0;      // P_e
    SourceTerm estimate;         // posterior weighted mean over covering particles
    bool covered = false;        // any particle populates this label
};

/// Point estimates of the multi-source state plus the stop-criterion
/// uncertainty. Labels are re-derived from scratch at every call.
struct EstimateSet {
    std::vector<LabelEstimate> labels;  // size m_max
    std::vector<int> reported;          // labels with P_e >= 0.5
    double sigma_theta = 0.0;           // +inf when nothing is reported
    double rate_scaling = 1.0;

    int source_count() const { return static_cast<int>(reported.size()); }
    std::vector<SourceTerm> reported_terms() const;
};

/// Full extraction pipeline: pool, cluster with a seed derived from
/// (mission seed, step), assign, threshold existence at 0.5, average.
EstimateSet extract_estimates(const ParticleSet& belief, double rate_scaling, std::uint64_t seed,
                              std::uint64_t step);

/// sqrt of the total weighted squared deviation of assigned components from
/// their label means, summed over reported labels. +inf when no label is
/// reported, so the stop criterion keeps the search alive.
double normed_uncertainty(const ParticleSet& belief, const CanonicalAssignments& assignments,
                          const EstimateSet& estimates);

}  // namespace mste
