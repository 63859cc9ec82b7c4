#pragma once
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mste/geometry.hpp"
#include "mste/plume.hpp"
#include "mste/rng.hpp"

namespace mste {

/// One weighted hypothesis over the joint multi-source state: a variable-size
/// set of source terms plus its cardinality (the component count).
struct HybridParticle {
    std::vector<SourceTerm> components;
    double weight = 0.0;

    int cardinality() const { return static_cast<int>(components.size()); }
    bool operator==(const HybridParticle&) const = default;
};

struct ParticleSet {
    std::vector<HybridParticle> particles;
    int m_max = 1;

    int size() const { return static_cast<int>(particles.size()); }
    std::vector<double> weights() const;
    bool operator==(const ParticleSet&) const = default;
};

enum class CardinalityEvent { merge, removal, birth, death, survive };

/// State-dependent cardinality transition: deterministic merge and removal
/// rules take priority over the stochastic birth/death Markov jump.
struct CardinalityKernel {
    double birth_prob = 0.08;
    double death_prob = 0.08;
    double merge_dist = 2.0;  // m
    double min_rate = 0.5;    // g/s

    bool valid() const {
        return birth_prob >= 0.0 && death_prob >= 0.0 && birth_prob + death_prob <= 1.0 &&
               merge_dist > 0.0 && min_rate > 0.0;
    }

    /// Row of the tri-diagonal jump matrix for current cardinality m:
    /// probabilities of {m-1, m, m+1}, clipped to [1, m_max].
    std::array<double, 3> transition_row(int m, int m_max) const;
};

/// Per-step Gaussian diffusion applied to every surviving component.
struct DiffusionNoise {
    double sigma_x = 0.3;  // m
    double sigma_y = 0.3;  // m
    double sigma_q = 0.15; // g/s

    bool valid() const { return sigma_x > 0.0 && sigma_y > 0.0 && sigma_q > 0.0; }
};

/// Prior for newborn components: uniform position over a region, Gamma rate.
struct BirthPrior {
    Domain region;
    double gamma_shape = 2.0;
    double gamma_scale = 5.0;

    bool valid() const { return region.valid() && gamma_shape > 0.0 && gamma_scale > 0.0; }
    double mean_rate() const { return gamma_shape * gamma_scale; }
    SourceTerm sample(Rng& rng) const;
};

struct FilterParams {
    int n_particles = 25000;
    int resample_threshold = 12500;  // N_eff below this triggers resampling

    bool valid() const { return n_particles > 0 && resample_threshold > 0 &&
                                resample_threshold <= n_particles; }
};

struct DegenerateBeliefError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CardinalityPrediction {
    int new_m = 1;
    CardinalityEvent event = CardinalityEvent::survive;
};

/// Smallest pairwise component distance; +inf for fewer than two components.
double min_pairwise_distance(std::span<const SourceTerm> components);

/// Predict the next cardinality. Deterministic merge/removal consume no
/// randomness; the stochastic branch consumes exactly one categorical draw.
CardinalityPrediction predict_cardinality(const HybridParticle& particle,
                                          const CardinalityKernel& kernel, int m_max, Rng& rng);

/// Replace the closest pair by its mass-weighted centroid carrying the summed
/// rate. Ties on distance break by lexicographic index pair; the merged
/// component takes the lower index.
std::vector<SourceTerm> merge_reduce(std::vector<SourceTerm> components);

/// Drop the component with the smallest rate (ties: lowest index).
std::vector<SourceTerm> removal_reduce(std::vector<SourceTerm> components);

/// Apply the continuous transition for the given event: reduce if required,
/// diffuse survivors, append a newborn on birth. Components are reflected
/// back into the domain and rates are kept strictly positive.
HybridParticle propagate_continuous(const HybridParticle& particle,
                                    const CardinalityPrediction& prediction,
                                    const DiffusionNoise& noise, const BirthPrior& birth,
                                    const Domain& domain, Rng& rng);

/// Likelihood of one reading given a hypothesized source set. Readings at or
/// above the sensor threshold use the Gaussian density of the residual;
/// sub-threshold readings use the miss/erf branch.
double single_sensor_likelihood(const Measurement& z, std::span<const SourceTerm> components,
                                const EnvParams& env, const SensorModel& sensor);
double log_single_sensor_likelihood(const Measurement& z, std::span<const SourceTerm> components,
                                    const EnvParams& env, const SensorModel& sensor);

/// Product of per-sensor likelihoods over a measurement set (log space).
double joint_log_likelihood(std::span<const Measurement> readings, const HybridParticle& particle,
                            const EnvParams& env, const SensorModel& sensor);
double joint_likelihood(std::span<const Measurement> readings, const HybridParticle& particle,
                        const EnvParams& env, const SensorModel& sensor);

/// 1 / sum(w^2) for normalized weights.
double effective_sample_size(std::span<const double> weights);

/// Systematic (single-offset stratified) resampling to uniform weights.
ParticleSet systematic_resample(const ParticleSet& belief, Rng& rng);

/// One bootstrap SIR update: propagate every particle through the hybrid
/// transition, reweight by the joint likelihood, normalize, and resample when
/// the effective sample size falls below the threshold. Per-particle
/// randomness is drawn from substreams of (seed, step) so the result is
/// independent of evaluation order. Throws DegenerateBeliefError when every
/// particle has zero likelihood.
ParticleSet pf_step(const ParticleSet& belief, std::span<const Measurement> readings,
                    const CardinalityKernel& kernel, const DiffusionNoise& noise,
                    const BirthPrior& birth, const EnvParams& env, const SensorModel& sensor,
                    const FilterParams& params, const Domain& domain, std::uint64_t seed,
                    std::uint64_t step);

/// Draw the initial belief: cardinality uniform on {1..m_max}, components from
/// the birth prior.
ParticleSet sample_prior_belief(int n_particles, int m_max, const BirthPrior& birth,
                                std::uint64_t seed);

}  // namespace mste
