#include "mste/plume.hpp"

#include <algorithm>
#include <cmath>

#include "mste/bessel.hpp"

namespace mste {

namespace {
constexpr double kMinSourceDistance = 1e-3;  // m
}

double plume_length_scale(const EnvParams& env) {
    const double d = env.diffusivity;
    const double tau = env.lifetime;
    const double vw = env.wind_speed;
    return 2.0 * d * std::sqrt(tau / (4.0 * d + vw * vw * tau));
}

double concentration(std::span<const SourceTerm> sources, const EnvParams& env, Vec2 query) {
    if (sources.empty()) return 0.0;
    const double lambda = plume_length_scale(env);
    const Vec2 wind = env.wind_vector();
    const double inv_two_d = 1.0 / (2.0 * env.diffusivity);
    double total = 0.0;
    for (const SourceTerm& src : sources) {
        const Vec2 offset = query - src.position;
        const double r = std::max(norm(offset), kMinSourceDistance);
        total += src.rate * inv_two_d / M_PI * std::exp(dot(wind, offset) * inv_two_d) *
                 bessel_k0(r / lambda);
    }
    return total;
}

Measurement sample_measurement(std::span<const SourceTerm> sources, const EnvParams& env,
                               const SensorModel& sensor, Vec2 query, int robot_id, Rng& rng) {
    Measurement m;
    m.robot_id = robot_id;
    m.position = query;
    if (rng.bernoulli(sensor.detect_prob)) {
        m.detected = true;
        const double z = concentration(sources, env, query) + rng.normal(0.0, sensor.noise_std);
        m.value = std::max(0.0, z);
    }
    return m;
}

}  // namespace mste
