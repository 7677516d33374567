#pragma once

#include <cmath>
#include <random>

#include "artic/types.hpp"

namespace artic::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random parameter set inside engineering-plausible ranges; always passes
/// VehicleParameters::validate() and is roll-stable.
inline VehicleParameters random_params(std::mt19937_64& rng) {
    VehicleParameters p;
    p.m_A1 = uniform(rng, 4000.0, 10000.0);
    p.m_A2 = uniform(rng, 5000.0, 35000.0);
    p.m_R1 = uniform(rng, 200.0, 600.0);
    p.m_R2 = uniform(rng, 200.0, 600.0);
    p.J_z1 = uniform(rng, 1.0e4, 5.0e4);
    p.J_z2 = uniform(rng, 1.0e5, 8.0e5);
    p.J_x2 = uniform(rng, 2.0e4, 1.2e5);
    p.l_v1 = uniform(rng, 1.0, 2.0);
    p.l_h1 = uniform(rng, 1.5, 3.0);
    p.l_k1 = uniform(rng, 0.1, p.l_h1 - 0.05);
    p.l_v2 = uniform(rng, 3.0, 7.0);
    p.l_h21 = uniform(rng, 0.5, 1.5);
    p.l_h22 = p.l_h21 + uniform(rng, 0.8, 1.6);
    p.l_h23 = p.l_h22 + uniform(rng, 0.8, 1.6);
    p.b2 = uniform(rng, 1.8, 2.3);
    p.h_W2 = uniform(rng, 0.6, 1.8);
    p.h_WK = uniform(rng, 0.3, 1.0);
    p.k = uniform(rng, 2.0e5, 1.0e6);
    p.d = uniform(rng, 1.0e4, 6.0e4);
    p.mu = uniform(rng, 0.4, 1.1);
    // Rear axle carries dual wheels: scale its stiffness up relative to the
    // front so the tractor stays yaw-stable (understeering) at test speeds.
    p.tire_front.C = uniform(rng, 1.2, 1.8);
    p.tire_front.c1 = uniform(rng, 4.0e5, 9.0e5);
    p.tire_front.c2 = uniform(rng, 4.0e4, 8.0e4);
    p.tire_front.relaxation_length = uniform(rng, 0.3, 1.0);
    const double dual_factor = uniform(rng, 1.4, 2.2);
    p.tire_rear.C = uniform(rng, 1.2, 1.8);
    p.tire_rear.c1 = p.tire_front.c1 * dual_factor;
    p.tire_rear.c2 = p.tire_front.c2 * dual_factor;
    p.tire_rear.relaxation_length = uniform(rng, 0.3, 1.0);
    p.tire_trailer.C = uniform(rng, 1.2, 1.8);
    p.tire_trailer.c1 = uniform(rng, 2.5e5, 6.0e5);
    p.tire_trailer.c2 = uniform(rng, 2.5e4, 6.0e4);
    p.tire_trailer.relaxation_length = uniform(rng, 0.3, 1.0);
    return p;
}

inline TireParams random_tire(std::mt19937_64& rng) {
    TireParams t;
    t.mu = uniform(rng, 0.4, 1.1);
    t.C = uniform(rng, 1.1, 1.9);
    t.c1 = uniform(rng, 2.0e5, 1.5e6);
    t.c2 = uniform(rng, 2.0e4, 1.2e5);
    t.relaxation_length = uniform(rng, 0.3, 1.0);
    return t;
}

/// Random state inside moderate driving envelopes (no clamping, no wheel
/// lift-off for typical parameter draws).
inline StateVector random_driving_state(std::mt19937_64& rng) {
    StateVector x;
    x.v_y1() = uniform(rng, -1.5, 1.5);
    x.yawrate_1() = uniform(rng, -0.4, 0.4);
    x.kappa_2() = uniform(rng, -0.04, 0.04);
    x.v_y2() = uniform(rng, -1.5, 1.5);
    x.rollrate_2() = uniform(rng, -0.3, 0.3);
    x.yawrate_2() = uniform(rng, -0.4, 0.4);
    x.theta() = uniform(rng, -0.4, 0.4);
    for (std::size_t i = 7; i < StateVector::kSize; ++i) x.raw[i] = uniform(rng, -2.5e4, 2.5e4);
    return x;
}

inline InputSample random_input(std::mt19937_64& rng) {
    InputSample u;
    u.t = 0.0;
    u.delta = uniform(rng, -0.4, 0.4);
    u.v_x2 = uniform(rng, 3.0, 25.0);
    u.a_x2 = uniform(rng, -1.5, 1.5);
    return u;
}

/// Constant straight-driving input source.
struct ConstantInput {
    double speed = 20.0;
    InputSample at(double t) const { return {t, 0.0, speed, 0.0}; }
};

/// Smooth analytic test maneuver (independent of the maneuvers module).
struct SmoothSlalomInput {
    double steer_amp = 0.05;
    double steer_omega = 0.8;
    double base_speed = 15.0;
    double speed_amp = 0.5;
    double speed_omega = 0.3;
    InputSample at(double t) const {
        return {t, steer_amp * std::sin(steer_omega * t),
                base_speed + speed_amp * std::sin(speed_omega * t),
                speed_amp * speed_omega * std::cos(speed_omega * t)};
    }
};

}  // namespace artic::testing
