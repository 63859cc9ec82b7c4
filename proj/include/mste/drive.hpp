#pragma once
#include <span>

#include "mste/geometry.hpp"

namespace mste {

/// Differential-drive pose.
struct RobotState {
    Vec2 position;
    double heading = 0.0;  // rad in [-pi, pi)

    bool operator==(const RobotState&) const = default;
};

struct ControlGains {
    double k_v = 1.0;       // 1/s
    double k_omega = 2.0;   // 1/s
    double v_max = 4.0;     // m/s
    double omega_max = 2.25;  // rad/s
    double dt = 0.05;       // s
    double conv_eps = 1e-2;  // summed residual command magnitude

    bool valid() const {
        return k_v > 0.0 && k_omega > 0.0 && v_max > 0.0 && omega_max > 0.0 && dt > 0.0 &&
               conv_eps > 0.0;
    }
};

struct ControlCommand {
    double v = 0.0;
    double omega = 0.0;
};

/// Saturating proportional law steering the robot toward a target: no forward
/// motion while the target is behind the heading axis, turn-to-face otherwise.
ControlCommand control(const RobotState& robot, Vec2 target, const ControlGains& gains);

/// Forward-Euler integration of the drive kinematics; heading wrapped, the
/// position clamped to the domain as a numerical guard.
RobotState step(const RobotState& robot, const ControlCommand& command, double dt,
                const Domain& domain);

/// True when the summed residual motion of the team is below conv_eps
/// (strict inequality).
bool converged(std::span<const RobotState> robots, std::span<const Vec2> targets,
               const ControlGains& gains);

}  // namespace mste
