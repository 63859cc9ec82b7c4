#include "mste/drive.hpp"

#include <algorithm>
#include <cmath>

namespace mste {

ControlCommand control(const RobotState& robot, Vec2 target, const ControlGains& gains) {
    const Vec2 offset = robot.position - target;
    // The zero-distance branch, taken with a small radius so the bearing
    // term cannot chatter once the target is reached to numerical precision.
    if (norm(offset) < 1e-2) return {0.0, 0.0};
    const Vec2 forward = heading_vector(robot.heading);
    const Vec2 left{-forward.y, forward.x};
    const double v_par = dot(forward, offset);
    const double v_perp = dot(left, offset);

    ControlCommand cmd;
    if (v_par <= 0.0) cmd.v = std::min(-gains.k_v * v_par, gains.v_max);
    cmd.omega = std::clamp(gains.k_omega * std::atan2(-v_perp, -v_par), -gains.omega_max,
                           gains.omega_max);
    return cmd;
}

RobotState step(const RobotState& robot, const ControlCommand& command, double dt,
                const Domain& domain) {
    RobotState next;
    next.position =
        domain.clamp(robot.position + command.v * dt * heading_vector(robot.heading));
    next.heading = wrap_angle(robot.heading + command.omega * dt);
    return next;
}

bool converged(std::span<const RobotState> robots, std::span<const Vec2> targets,
               const ControlGains& gains) {
    double residual = 0.0;
    for (std::size_t i = 0; i < robots.size(); ++i) {
        const ControlCommand cmd = control(robots[i], targets[i], gains);
        residual += cmd.v + std::fabs(cmd.omega);
    }
    return residual < gains.conv_eps;
}

}  // namespace mste
