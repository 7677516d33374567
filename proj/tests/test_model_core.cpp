#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "artic/model.hpp"
#include "artic/types.hpp"
#include "test_support.hpp"

using namespace artic;
using namespace artic::testing;
using Catch::Approx;

TEST_CASE("static loads: symmetric toy configuration", "[model][static]") {
    VehicleParameters p;
    p.m_A1 = 7000.0;
    p.m_A2 = 30000.0;
    p.l_v1 = 2.0;
    p.l_h1 = 2.0;
    p.l_k1 = 0.0;
    p.l_h22 = 4.0;
    p.l_v2 = 4.0;

    const StaticLoads loads = static_loads(p);
    // e = 8, f = 4; both tractor axles carry (7000*2*8 + 30000*4*2)*g/32.
    CHECK(loads.front == Approx(11000.0 * kGravity).epsilon(1e-12));
    CHECK(loads.rear == Approx(11000.0 * kGravity).epsilon(1e-12));
    CHECK(loads.trailer_wheel == Approx(2500.0 * kGravity).epsilon(1e-12));

    const double total = loads.front + loads.rear + 6.0 * loads.trailer_wheel;
    CHECK(total == Approx((p.m_A1 + p.m_A2) * kGravity).epsilon(1e-12));
}

TEST_CASE("static loads: zero trailer mass splits tractor weight by lever ratio", "[model][static]") {
    VehicleParameters p;
    p.m_A2 = 0.0;
    const StaticLoads loads = static_loads(p);
    CHECK(loads.trailer_wheel == 0.0);
    CHECK(loads.front == Approx(p.m_A1 * kGravity * p.l_h1 / p.wheelbase_f()).epsilon(1e-12));
    CHECK(loads.rear == Approx(p.m_A1 * kGravity * p.l_v1 / p.wheelbase_f()).epsilon(1e-12));
}

TEST_CASE("static loads: conservation over random parameter sets", "[model][static][property]") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 300; ++i) {
        const VehicleParameters p = random_params(rng);
        const StaticLoads loads = static_loads(p);
        CHECK(loads.front > 0.0);
        CHECK(loads.rear > 0.0);
        CHECK(loads.trailer_wheel > 0.0);
        const double total = loads.front + loads.rear + 6.0 * loads.trailer_wheel;
        const double expected = (p.m_A1 + p.m_A2) * kGravity;
        CHECK(std::abs(total - expected) <= 1e-12 * expected);
    }
}

TEST_CASE("static loads: degenerate geometry is rejected", "[model][static][errors]") {
    VehicleParameters p;
    p.l_h22 = -10.0;  // e = l_h22 + l_v2 < 0
    CHECK_THROWS_AS(static_loads(p), invalid_parameter_error);
    VehicleParameters q;
    q.l_v1 = -5.0;  // f = l_v1 + l_h1 < 0
    CHECK_THROWS_AS(static_loads(q), invalid_parameter_error);
}

TEST_CASE("suspension forces: static case and frozen roll example", "[model][suspension]") {
    // Sized so that F_stat,2j = 49050 N exactly: m_A2*g*l_v2/(6e) with e = 8.
    VehicleParameters p;
    p.m_A2 = 60000.0;
    p.l_v2 = 4.0;
    p.l_h22 = 4.0;
    p.b2 = 2.0;
    p.k = 4.0e5;
    p.d = 3.0e4;

    const double f_stat = static_loads(p).trailer_wheel;
    REQUIRE(f_stat == Approx(49050.0).epsilon(1e-12));

    const TrailerAxleForces at_rest = suspension_forces(p, 0.0, 0.0);
    for (const auto& axle : at_rest) {
        CHECK(axle.right == Approx(f_stat).epsilon(1e-12));
        CHECK(axle.left == Approx(f_stat).epsilon(1e-12));
    }

    const TrailerAxleForces rolled = suspension_forces(p, 0.01, 0.0);
    for (const auto& axle : rolled) {
        CHECK(axle.right == Approx(53050.0).epsilon(1e-12));
        CHECK(axle.left == Approx(45050.0).epsilon(1e-12));
    }
}

TEST_CASE("suspension forces: left+right invariant under roll state", "[model][suspension][property]") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const VehicleParameters p = random_params(rng);
        const double f_stat = static_loads(p).trailer_wheel;
        const double kappa = uniform(rng, -0.2, 0.2);
        const double kappa_rate = uniform(rng, -1.0, 1.0);
        const TrailerAxleForces f = suspension_forces(p, kappa, kappa_rate);
        for (const auto& axle : f) {
            CHECK(axle.right + axle.left == Approx(2.0 * f_stat).epsilon(1e-12));
        }
    }
}

TEST_CASE("vertical tire forces: wheel weight offset, lift-off unclamped", "[model][vertical]") {
    VehicleParameters p;
    p.m_R2 = 500.0;

    TrailerAxleForces zero{};
    const TrailerAxleForces f_z = vertical_tire_forces(p, zero);
    for (const auto& axle : f_z) {
        CHECK(axle.right == Approx(4905.0).epsilon(1e-12));
        CHECK(axle.left == Approx(4905.0).epsilon(1e-12));
    }

    // Static roll-free case.
    const TrailerAxleForces static_fz = vertical_tire_forces(p, suspension_forces(p, 0.0, 0.0));
    const double expected = static_loads(p).trailer_wheel + p.m_R2 * kGravity;
    for (const auto& axle : static_fz) {
        CHECK(axle.right == Approx(expected).epsilon(1e-12));
        CHECK(axle.left == Approx(expected).epsilon(1e-12));
    }

    // Roll angle large enough to unload the left side: the negative value
    // must be reported as-is.
    const double f_stat = static_loads(p).trailer_wheel;
    const double kappa = 2.0 * (f_stat + p.m_R2 * kGravity) / (p.b2 / 2.0 * p.k);
    const TrailerAxleForces lifted = vertical_tire_forces(p, suspension_forces(p, kappa, 0.0));
    CHECK(lifted[0].left < 0.0);
}

TEST_CASE("tractor vertical loads: static axle load plus wheel weights", "[model][vertical]") {
    VehicleParameters p;
    const StaticLoads loads = static_loads(p);
    const auto f_z = tractor_vertical_loads(p);
    CHECK(f_z[0] == Approx(loads.front + 2.0 * p.m_R1 * kGravity).epsilon(1e-12));
    CHECK(f_z[1] == Approx(loads.rear + 2.0 * p.m_R1 * kGravity).epsilon(1e-12));
    CHECK(f_z[0] > 0.0);
    CHECK(f_z[1] > 0.0);
}

TEST_CASE("tire stiffness factor B", "[model][tire]") {
    TireParams t{0.8, 1.5, 1.0e5, 3.0e4, 0.6};

    // Peak of the load-sensitivity curve at F_z = c2.
    CHECK(mtfm_b(t, t.c2) == Approx(t.c1 / (t.C * t.mu * t.c2)).epsilon(1e-12));
    CHECK(mtfm_b(t, 3.0e4) == Approx(100000.0 / 36000.0).epsilon(1e-12));

    // Large-load asymptote 2*c1*c2/(C*mu*F_z^2), checked at F_z = 100*c2.
    const double f_z = 100.0 * t.c2;
    const double asymptote = 2.0 * t.c1 * t.c2 / (t.C * t.mu * f_z * f_z);
    CHECK(mtfm_b(t, f_z) == Approx(asymptote).epsilon(1e-3));

    CHECK_THROWS_AS(mtfm_b(t, 0.0), invalid_parameter_error);
    CHECK_THROWS_AS(mtfm_b(t, -100.0), invalid_parameter_error);
}

TEST_CASE("lateral tire force: oddness, saturation, origin slope", "[model][tire]") {
    TireParams t{0.8, 1.5, 1.0e5, 3.0e4, 0.6};
    const double f_z = 2.0e4;

    CHECK(lateral_tire_force_static(t, 0.0, f_z).value == 0.0);

    // Saturation limit mu*F_z*sin(C*pi/2) approached at alpha = 1e3 rad.
    const double limit = t.mu * f_z * std::sin(t.C * M_PI / 2.0);
    CHECK(lateral_tire_force_static(t, 1.0e3, f_z).value == Approx(limit).epsilon(1e-3));

    // Origin slope c1*sin(2*atan(F_z/c2)), by central difference.
    const double h = 1e-6;
    const double slope = (lateral_tire_force_static(t, h, f_z).value -
                          lateral_tire_force_static(t, -h, f_z).value) /
                         (2.0 * h);
    const double expected_slope = t.c1 * std::sin(2.0 * std::atan(f_z / t.c2));
    CHECK(slope == Approx(expected_slope).epsilon(1e-4));

    // Lift-off: zero force plus flag, never a throw.
    const LateralForce lifted = lateral_tire_force_static(t, 0.1, -500.0);
    CHECK(lifted.value == 0.0);
    CHECK(lifted.lift_off);
    CHECK_FALSE(lateral_tire_force_static(t, 0.1, f_z).lift_off);
}

TEST_CASE("lateral tire force: randomized properties", "[model][tire][property]") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const TireParams t = random_tire(rng);
        const double f_z = uniform(rng, 5.0e3, 8.0e4);

        for (int j = 0; j < 50; ++j) {
            const double alpha = uniform(rng, -1.0, 1.0);
            const double pos = lateral_tire_force_static(t, alpha, f_z).value;
            const double neg = lateral_tire_force_static(t, -alpha, f_z).value;
            CHECK(pos == -neg);  // trig symmetry holds bitwise
            CHECK(std::abs(pos) <= t.mu * f_z * (1.0 + 1e-14));
        }

        const double h = 1e-6;
        const double slope = (lateral_tire_force_static(t, h, f_z).value -
                              lateral_tire_force_static(t, -h, f_z).value) /
                             (2.0 * h);
        const double expected = t.c1 * std::sin(2.0 * std::atan(f_z / t.c2));
        CHECK(slope == Approx(expected).epsilon(1e-4));
    }
}

TEST_CASE("slip angles: zero state, frozen trailer example, pure steer", "[model][slip]") {
    VehicleParameters p;
    StateVector x;
    InputSample u{0.0, 0.0, 10.0, 0.0};

    const SlipAngleSet zero = slip_angles(x, u, 10.0, p);
    for (double a : {zero.a11, zero.a12, zero.a21R, zero.a21L, zero.a22R, zero.a22L, zero.a23R, zero.a23L}) {
        CHECK(a == 0.0);
    }

    // Trailer yaw-rate example: inner wheel sees the larger angle.
    p.l_h21 = 1.0;
    p.b2 = 2.0;
    x.yawrate_2() = 0.1;
    const SlipAngleSet yawing = slip_angles(x, u, 10.0, p);
    CHECK(yawing.a21R == Approx(std::atan(0.1 / 10.1)).epsilon(1e-12));
    CHECK(yawing.a21L == Approx(std::atan(0.1 / 9.9)).epsilon(1e-12));
    CHECK(yawing.a21R == Approx(0.009901).margin(5e-7));
    CHECK(yawing.a21L == Approx(0.010101).margin(5e-7));
    CHECK(yawing.a21L > yawing.a21R);

    // Pure steer offset in straight travel.
    StateVector straight;
    InputSample steered{0.0, 0.1, 10.0, 0.0};
    const SlipAngleSet s = slip_angles(straight, steered, 10.0, p);
    CHECK(s.a11 == Approx(0.1).epsilon(1e-12));
    CHECK(s.a12 == 0.0);
}

TEST_CASE("slip angles: mirror antisymmetry", "[model][slip][property]") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
        const VehicleParameters p = random_params(rng);
        StateVector x = random_driving_state(rng);
        x.theta() = 0.0;  // theta does not enter the slip equations
        InputSample u = random_input(rng);
        const double v_x1 = std::max(u.v_x2, kMinLongitudinalSpeed);

        StateVector xm = x;
        xm.v_y1() = -x.v_y1();
        xm.v_y2() = -x.v_y2();
        xm.yawrate_1() = -x.yawrate_1();
        xm.yawrate_2() = -x.yawrate_2();
        xm.rollrate_2() = -x.rollrate_2();
        InputSample um = u;
        um.delta = -u.delta;

        const SlipAngleSet a = slip_angles(x, u, v_x1, p);
        const SlipAngleSet m = slip_angles(xm, um, v_x1, p);
        CHECK(m.a11 == Approx(-a.a11).margin(1e-14));
        CHECK(m.a12 == Approx(-a.a12).margin(1e-14));
        CHECK(m.a21R == Approx(-a.a21L).margin(1e-14));
        CHECK(m.a21L == Approx(-a.a21R).margin(1e-14));
        CHECK(m.a22R == Approx(-a.a22L).margin(1e-14));
        CHECK(m.a22L == Approx(-a.a22R).margin(1e-14));
        CHECK(m.a23R == Approx(-a.a23L).margin(1e-14));
        CHECK(m.a23L == Approx(-a.a23R).margin(1e-14));
    }
}

TEST_CASE("slip angles: non-positive denominator is a domain error", "[model][slip][errors]") {
    VehicleParameters p;
    p.b2 = 2.05;
    StateVector x;
    x.yawrate_2() = 2.0;  // yaw track term 2.05 exceeds v_x2 = 1
    InputSample u{0.0, 0.0, 1.0, 0.0};
    CHECK_THROWS_AS(slip_angles(x, u, 1.0, p), simulation_error);
}

TEST_CASE("tractor longitudinal velocity projection", "[model][coupling]") {
    VehicleParameters p;
    p.l_v2 = 6.0;
    StateVector x;

    CHECK(tractor_longitudinal_velocity(x, 10.0, p).value == Approx(10.0).epsilon(1e-12));

    x.theta() = 0.2;
    const ClampedSpeed a = tractor_longitudinal_velocity(x, 10.0, p);
    CHECK(a.value == Approx(10.0 * std::cos(0.2)).epsilon(1e-12));
    CHECK(a.value == Approx(9.8007).margin(5e-5));
    CHECK_FALSE(a.clamped);

    x.v_y2() = 0.5;
    x.yawrate_2() = 0.05;
    const ClampedSpeed b = tractor_longitudinal_velocity(x, 10.0, p);
    CHECK(b.value == Approx(10.0 * std::cos(0.2) - 0.8 * std::sin(0.2)).epsilon(1e-12));
    CHECK(b.value == Approx(9.6417).margin(5e-5));

    // Slow crawl at large articulation clamps up to the floor.
    StateVector slow;
    slow.theta() = 1.2;
    const ClampedSpeed c = tractor_longitudinal_velocity(slow, 0.6, p);
    CHECK(c.value == kMinLongitudinalSpeed);
    CHECK(c.clamped);
}

TEST_CASE("coupling force elimination helper", "[model][coupling]") {
    VehicleParameters p;
    p.m_R1 = 500.0;
    p.m_A1 = 7000.0;  // 4*m_R1 + m_A1 = 9000

    StateVector x;
    CHECK(coupling_force(x, 0.0, 0.0, p) == 0.0);

    x.F_y11() = 5000.0;
    x.F_y12() = 3000.0;
    CHECK(coupling_force(x, 0.5, 0.0, p) == Approx(3500.0).epsilon(1e-12));

    x.theta() = 0.3;
    CHECK(coupling_force(x, 0.5, 0.0, p) == Approx(3500.0 / std::cos(0.3)).epsilon(1e-12));

    x.theta() = M_PI / 2.0;
    CHECK_THROWS_AS(coupling_force(x, 0.5, 0.0, p), simulation_error);
}

TEST_CASE("parameter validation catches out-of-range values", "[model][params][errors]") {
    VehicleParameters good;
    CHECK_NOTHROW(good.validate());

    VehicleParameters p = good;
    p.mu = 2.5;
    CHECK_THROWS_AS(p.validate(), invalid_parameter_error);

    p = good;
    p.tire_front.C = 3.5;
    CHECK_THROWS_AS(p.validate(), invalid_parameter_error);

    p = good;
    p.k = -1.0;
    CHECK_THROWS_AS(p.validate(), invalid_parameter_error);

    p = good;
    p.m_A2 = 0.0;
    CHECK_THROWS_AS(p.validate(), invalid_parameter_error);

    p = good;
    p.tire_trailer.relaxation_length = 0.0;
    CHECK_THROWS_AS(p.validate(), invalid_parameter_error);
}

TEST_CASE("input trajectory: interpolation and horizon guard", "[model][inputs]") {
    InputTrajectory traj({{0.0, 0.0, 10.0, 0.0}, {1.0, 0.2, 12.0, 2.0}});
    const InputSample mid = traj.at(0.5);
    CHECK(mid.delta == Approx(0.1).epsilon(1e-12));
    CHECK(mid.v_x2 == Approx(11.0).epsilon(1e-12));
    CHECK(mid.a_x2 == Approx(1.0).epsilon(1e-12));
    CHECK(traj.at(0.0).v_x2 == 10.0);
    CHECK(traj.at(1.0).v_x2 == 12.0);
    CHECK_THROWS_AS(traj.at(1.5), simulation_error);
    CHECK_THROWS_AS(traj.at(-0.5), simulation_error);

    CHECK_THROWS_AS(InputTrajectory({{0.0, 0.0, 10.0, 0.0}, {0.0, 0.0, 10.0, 0.0}}),
                    invalid_parameter_error);
}
