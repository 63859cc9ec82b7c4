#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mste/drive.hpp"
#include "mste/rng.hpp"

using namespace mste;

namespace {
const Domain kDomain{0.0, 50.0, 0.0, 50.0};
const ControlGains kGains{};
}  // namespace

TEST_CASE("control") {
    SUBCASE("at the target: zero commands") {
        const RobotState robot{{10.0, 10.0}, 0.7};
        const auto cmd = control(robot, {10.0, 10.0}, kGains);
        CHECK(cmd.v == 0.0);
        CHECK(cmd.omega == 0.0);
    }
    SUBCASE("target dead ahead within the speed limit: proportional drive, no turn") {
        const RobotState robot{{10.0, 10.0}, 0.0};
        const auto cmd = control(robot, {12.5, 10.0}, kGains);
        CHECK(cmd.v == doctest::Approx(kGains.k_v * 2.5));
        CHECK(cmd.omega == doctest::Approx(0.0));
    }
    SUBCASE("target dead ahead beyond the limit saturates at v_max") {
        const RobotState robot{{10.0, 10.0}, 0.0};
        const auto cmd = control(robot, {40.0, 10.0}, kGains);
        CHECK(cmd.v == doctest::Approx(kGains.v_max));
        CHECK(cmd.omega == doctest::Approx(0.0));
    }
    SUBCASE("target directly behind: stop and turn at the rate limit") {
        const RobotState robot{{10.0, 10.0}, 0.0};
        const auto cmd = control(robot, {4.0, 10.0}, kGains);
        CHECK(cmd.v == 0.0);
        CHECK(std::fabs(cmd.omega) ==
              doctest::Approx(std::min(kGains.k_omega * M_PI, kGains.omega_max)));
    }
    SUBCASE("turn direction points toward the target") {
        const RobotState robot{{10.0, 10.0}, 0.0};
        const auto left = control(robot, {10.0, 14.0}, kGains);   // target to the left
        const auto right = control(robot, {10.0, 6.0}, kGains);   // target to the right
        CHECK(left.omega > 0.0);
        CHECK(right.omega < 0.0);
    }
}

TEST_CASE("step") {
    SUBCASE("zero commands leave the state unchanged") {
        const RobotState robot{{10.0, 10.0}, 0.7};
        CHECK(step(robot, {0.0, 0.0}, 0.05, kDomain) == robot);
    }
    SUBCASE("axis-aligned integration") {
        const RobotState robot{{10.0, 10.0}, 0.0};
        const auto next = step(robot, {1.0, 0.0}, 0.1, kDomain);
        CHECK(next.position.x == doctest::Approx(10.1));
        CHECK(next.position.y == doctest::Approx(10.0));
    }
    SUBCASE("heading wraps into [-pi, pi)") {
        const RobotState robot{{10.0, 10.0}, -M_PI / 2};
        const auto next = step(robot, {0.0, M_PI / 0.1}, 0.1, kDomain);
        CHECK(next.heading == doctest::Approx(M_PI / 2).epsilon(1e-12));
        // and the wrap stays inside the interval for arbitrary spins
        RobotState r = robot;
        Rng rng(3);
        for (int i = 0; i < 2000; ++i) {
            r = step(r, {0.0, rng.uniform(-2.25, 2.25)}, 0.05, kDomain);
            CHECK(r.heading >= -M_PI);
            CHECK(r.heading < M_PI);
        }
    }
    SUBCASE("position clamps at the boundary") {
        const RobotState robot{{49.99, 10.0}, 0.0};
        const auto next = step(robot, {4.0, 0.0}, 0.1, kDomain);
        CHECK(next.position.x == 50.0);
    }
}

TEST_CASE("converged") {
    const std::vector<RobotState> robots{{{10.0, 10.0}, 0.0}, {{20.0, 20.0}, 1.0}};
    SUBCASE("true at the targets") {
        const std::vector<Vec2> targets{{10.0, 10.0}, {20.0, 20.0}};
        CHECK(converged(robots, targets, kGains));
    }
    SUBCASE("false with one robot far away") {
        const std::vector<Vec2> targets{{10.0, 10.0}, {30.0, 20.0}};
        CHECK_FALSE(converged(robots, targets, kGains));
    }
    SUBCASE("strict inequality at the threshold") {
        // single robot facing its target exactly conv_eps / k_v ahead; powers
        // of two keep the arithmetic exact
        ControlGains gains = kGains;
        gains.conv_eps = 0.015625;
        gains.k_v = 1.0;
        const std::vector<RobotState> one{{{16.0, 16.0}, 0.0}};
        const std::vector<Vec2> at_eps{{16.0 + 0.015625, 16.0}};
        CHECK_FALSE(converged(one, at_eps, gains));  // sum == conv_eps exactly
        const std::vector<Vec2> inside{{16.0 + 0.0078125, 16.0}};
        CHECK(converged(one, inside, gains));
    }
}

TEST_CASE("closed-loop convergence to a fixed target") {
    Rng rng(11);
    int reached = 0;
    for (int trial = 0; trial < 100; ++trial) {
        RobotState robot{{rng.uniform(1.0, 49.0), rng.uniform(1.0, 49.0)},
                         rng.uniform(-M_PI, M_PI)};
        const Vec2 target{rng.uniform(5.0, 45.0), rng.uniform(5.0, 45.0)};
        double t = 0.0;
        while (t < 60.0) {
            const auto cmd = control(robot, target, kGains);
            robot = step(robot, cmd, kGains.dt, kDomain);
            t += kGains.dt;
            CHECK(kDomain.contains(robot.position));
        }
        if (norm(robot.position - target) < 0.05) ++reached;
    }
    CHECK(reached == 100);
}

TEST_CASE("domain invariance from the boundary") {
    // Start on the boundary heading outward: the forward branch keeps v = 0
    // until the heading turns back inside, so the robot never exits.
    const std::vector<Vec2> targets{{25.0, 25.0}};
    RobotState robot{{50.0, 25.0}, 0.0};  // on the right edge, facing out
    for (int i = 0; i < 4000; ++i) {
        const auto cmd = control(robot, targets[0], kGains);
        robot = step(robot, cmd, kGains.dt, kDomain);
        REQUIRE(kDomain.contains(robot.position));
    }
    CHECK(norm(robot.position - targets[0]) < 0.05);
}
