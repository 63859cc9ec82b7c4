#include "mste/belief.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace mste {

std::vector<double> ParticleSet::weights() const {
    std::vector<double> w;
    w.reserve(particles.size());
    for (const auto& p : particles) w.push_back(p.weight);
    return w;
}

std::array<double, 3> CardinalityKernel::transition_row(int m, int m_max) const {
    // Probabilities of m-1, m, m+1 with the boundary rows absorbing the
    // impossible moves.
    double down = (m > 1) ? death_prob : 0.0;
    double up = (m < m_max) ? birth_prob : 0.0;
    return {down, 1.0 - down - up, up};
}

SourceTerm BirthPrior::sample(Rng& rng) const {
    SourceTerm s;
    s.position.x = rng.uniform(region.x_min, region.x_max);
    s.position.y = rng.uniform(region.y_min, region.y_max);
    s.rate = rng.gamma(gamma_shape, gamma_scale);
    return s;
}

double min_pairwise_distance(std::span<const SourceTerm> components) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < components.size(); ++i)
        for (std::size_t j = i + 1; j < components.size(); ++j)
            best = std::min(best, norm(components[i].position - components[j].position));
    return best;
}

CardinalityPrediction predict_cardinality(const HybridParticle& particle,
                                          const CardinalityKernel& kernel, int m_max, Rng& rng) {
    const int m = particle.cardinality();
    if (m >= 2 && min_pairwise_distance(particle.components) < kernel.merge_dist)
        return {m - 1, CardinalityEvent::merge};
    if (m > 1) {
        double min_rate = std::numeric_limits<double>::infinity();
        for (const auto& c : particle.components) min_rate = std::min(min_rate, c.rate);
        if (min_rate < kernel.min_rate) return {m - 1, CardinalityEvent::removal};
    }
    const auto row = kernel.transition_row(m, m_max);
    const int move = rng.categorical(row);
    if (move == 0) return {m - 1, CardinalityEvent::death};
    if (move == 2) return {m + 1, CardinalityEvent::birth};
    return {m, CardinalityEvent::survive};
}

std::vector<SourceTerm> merge_reduce(std::vector<SourceTerm> components) {
    std::size_t best_i = 0;
    std::size_t best_j = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < components.size(); ++i) {
        for (std::size_t j = i + 1; j < components.size(); ++j) {
            const double d = norm(components[i].position - components[j].position);
            if (d < best) {
                best = d;
                best_i = i;
                best_j = j;
            }
        }
    }
    const SourceTerm& a = components[best_i];
    const SourceTerm& b = components[best_j];
    const double total = a.rate + b.rate;
    SourceTerm merged;
    merged.position = (a.rate * a.position + b.rate * b.position) * (1.0 / total);
    merged.rate = total;
    components[best_i] = merged;
    components.erase(components.begin() + static_cast<std::ptrdiff_t>(best_j));
    return components;
}

std::vector<SourceTerm> removal_reduce(std::vector<SourceTerm> components) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < components.size(); ++i)
        if (components[i].rate < components[worst].rate) worst = i;
    components.erase(components.begin() + static_cast<std::ptrdiff_t>(worst));
    return components;
}

namespace {

void diffuse_component(SourceTerm& c, const DiffusionNoise& noise, const Domain& domain,
                       Rng& rng) {
    c.position.x += noise.sigma_x * rng.normal();
    c.position.y += noise.sigma_y * rng.normal();
    c.position = domain.reflect(c.position);
    const double base = c.rate;
    double q = base + noise.sigma_q * rng.normal();
    for (int tries = 1; q <= 0.0 && tries < 100; ++tries)
        q = base + noise.sigma_q * rng.normal();
    c.rate = (q > 0.0) ? q : 0.5;  // last-resort floor; practically unreachable
}

}  // namespace

HybridParticle propagate_continuous(const HybridParticle& particle,
                                    const CardinalityPrediction& prediction,
                                    const DiffusionNoise& noise, const BirthPrior& birth,
                                    const Domain& domain, Rng& rng) {
    HybridParticle out;
    out.weight = particle.weight;
    switch (prediction.event) {
        case CardinalityEvent::merge:
            out.components = merge_reduce(particle.components);
            break;
        case CardinalityEvent::removal:
        case CardinalityEvent::death:
            // A stochastic death can only fire when the merge trigger is off,
            // so the reduction is always removal of the weakest component.
            out.components = removal_reduce(particle.components);
            break;
        case CardinalityEvent::birth:
        case CardinalityEvent::survive:
            out.components = particle.components;
            break;
    }
    for (auto& c : out.components) diffuse_component(c, noise, domain, rng);
    if (prediction.event == CardinalityEvent::birth) out.components.push_back(birth.sample(rng));
    return out;
}

double log_single_sensor_likelihood(const Measurement& z, std::span<const SourceTerm> components,
                                    const EnvParams& env, const SensorModel& sensor) {
    const double c = concentration(components, env, z.position);
    if (z.value >= sensor.threshold) {
        const double t = (z.value - c) / sensor.noise_std;
        return -0.5 * t * t - std::log(sensor.noise_std * std::sqrt(2.0 * M_PI));
    }
    const double a = (sensor.threshold - c) / (std::sqrt(2.0) * sensor.noise_std);
    // 1 - Pd/2 + (Pd/2) erf(a), written with erfc for stability at a << 0.
    return std::log1p(-0.5 * sensor.detect_prob * std::erfc(a));
}

double single_sensor_likelihood(const Measurement& z, std::span<const SourceTerm> components,
                                const EnvParams& env, const SensorModel& sensor) {
    return std::exp(log_single_sensor_likelihood(z, components, env, sensor));
}

double joint_log_likelihood(std::span<const Measurement> readings, const HybridParticle& particle,
                            const EnvParams& env, const SensorModel& sensor) {
    double total = 0.0;
    for (const Measurement& z : readings)
        total += log_single_sensor_likelihood(z, particle.components, env, sensor);
    return total;
}

double joint_likelihood(std::span<const Measurement> readings, const HybridParticle& particle,
                        const EnvParams& env, const SensorModel& sensor) {
    return std::exp(joint_log_likelihood(readings, particle, env, sensor));
}

double effective_sample_size(std::span<const double> weights) {
    double sum_sq = 0.0;
    for (double w : weights) sum_sq += w * w;
    return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

ParticleSet systematic_resample(const ParticleSet& belief, Rng& rng) {
    const int n = belief.size();
    ParticleSet out;
    out.m_max = belief.m_max;
    out.particles.reserve(n);
    const double step = 1.0 / n;
    double pointer = rng.uniform() * step;
    double cumulative = 0.0;
    int idx = -1;
    for (int i = 0; i < n; ++i) {
        while (cumulative <= pointer && idx + 1 < n) {
            ++idx;
            cumulative += belief.particles[idx].weight;
        }
        out.particles.push_back(belief.particles[idx]);
        out.particles.back().weight = step;
        pointer += step;
    }
    return out;
}

ParticleSet pf_step(const ParticleSet& belief, std::span<const Measurement> readings,
                    const CardinalityKernel& kernel, const DiffusionNoise& noise,
                    const BirthPrior& birth, const EnvParams& env, const SensorModel& sensor,
                    const FilterParams& params, const Domain& domain, std::uint64_t seed,
                    std::uint64_t step) {
    const int n = belief.size();
    ParticleSet next;
    next.m_max = belief.m_max;
    next.particles.resize(n);
    std::vector<double> log_w(n);
    for (int p = 0; p < n; ++p) {
        Rng rng = Rng::stream(seed, RngPurpose::transition, step, static_cast<std::uint64_t>(p));
        const auto prediction = predict_cardinality(belief.particles[p], kernel, belief.m_max, rng);
        next.particles[p] =
            propagate_continuous(belief.particles[p], prediction, noise, birth, domain, rng);
        const double prev = belief.particles[p].weight;
        log_w[p] = (prev > 0.0 ? std::log(prev) : -std::numeric_limits<double>::infinity()) +
                   joint_log_likelihood(readings, next.particles[p], env, sensor);
    }
    const double max_log = *std::max_element(log_w.begin(), log_w.end());
    if (!std::isfinite(max_log))
        throw DegenerateBeliefError("pf_step: all particle likelihoods vanished");
    double total = 0.0;
    for (int p = 0; p < n; ++p) {
        next.particles[p].weight = std::exp(log_w[p] - max_log);
        total += next.particles[p].weight;
    }
    for (auto& particle : next.particles) particle.weight /= total;
    const auto w = next.weights();
    if (effective_sample_size(w) < static_cast<double>(params.resample_threshold)) {
        Rng rng = Rng::stream(seed, RngPurpose::resample, step, 0);
        next = systematic_resample(next, rng);
    }
    return next;
}

ParticleSet sample_prior_belief(int n_particles, int m_max, const BirthPrior& birth,
                                std::uint64_t seed) {
    ParticleSet belief;
    belief.m_max = m_max;
    belief.particles.resize(n_particles);
    for (int p = 0; p < n_particles; ++p) {
        Rng rng = Rng::stream(seed, RngPurpose::belief_init, 0, static_cast<std::uint64_t>(p));
        auto& particle = belief.particles[p];
        particle.weight = 1.0 / n_particles;
        particle.components.reserve(m_max);
        // Start at the cardinality ceiling: death, removal, and merge prune
        // unsupported components far faster than births rediscover missed
        // sources, and reported-label coverage keeps the stop rule honest
        // while part of the domain is still unexplored.
        for (int i = 0; i < m_max; ++i) particle.components.push_back(birth.sample(rng));
    }
    return belief;
}

}  // namespace mste
