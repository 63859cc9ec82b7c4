#pragma once
#include <span>
#include <vector>

#include "mste/geometry.hpp"
#include "mste/rng.hpp"

namespace mste {

/// Environmental conditions driving gas transport. Assumed known and constant
/// over a mission.
struct EnvParams {
    double wind_speed = 4.0;   // m/s, >= 0
    double wind_dir = -M_PI / 2.0;  // rad in [-pi, pi)
    double diffusivity = 1.2;  // m^2/s, > 0
    double lifetime = 5.0;     // s, > 0

    Vec2 wind_unit() const { return heading_vector(wind_dir); }
    Vec2 wind_vector() const { return wind_speed * wind_unit(); }
    bool valid() const { return wind_speed >= 0.0 && diffusivity > 0.0 && lifetime > 0.0; }
};

/// One gas release: planar position and emission rate.
struct SourceTerm {
    Vec2 position;
    double rate = 0.0;  // g/s, > 0

    bool operator==(const SourceTerm&) const = default;
};

/// Concentration sensor: additive Gaussian noise, detection threshold, and
/// per-sample detection probability.
struct SensorModel {
    double noise_std = 0.2;    // mg/m^3, > 0
    double threshold = 0.5;    // mg/m^3, > 0
    double detect_prob = 0.95; // (0, 1]

    bool valid() const {
        return noise_std > 0.0 && threshold > 0.0 && detect_prob > 0.0 && detect_prob <= 1.0;
    }
};

struct Measurement {
    int robot_id = 0;
    Vec2 position;
    double value = 0.0;  // mg/m^3, >= 0; exactly 0 on a miss
    bool detected = false;
};

/// Decay length scale of the quasi-steady plume.
double plume_length_scale(const EnvParams& env);

/// Superposed steady-state concentration of all sources at a query point.
/// Distances are clamped below at 1e-3 m to avoid the K0 log singularity.
double concentration(std::span<const SourceTerm> sources, const EnvParams& env, Vec2 query);

/// Draw one noisy sensor reading at the query point. With probability
/// detect_prob the reading is max(0, C + noise); otherwise it is exactly 0.
Measurement sample_measurement(std::span<const SourceTerm> sources, const EnvParams& env,
                               const SensorModel& sensor, Vec2 query, int robot_id, Rng& rng);

}  // namespace mste
