#pragma once

#include <array>
#include <cmath>

#include "artic/common.hpp"
#include "artic/types.hpp"

namespace artic {

/// Static axle loads carried by the suspension [N]. `trailer_wheel` is the
/// per-wheel-station value, identical for all six trailer wheels.
struct StaticLoads {
    double front = 0.0;          ///< F_stat,11
    double rear = 0.0;           ///< F_stat,12
    double trailer_wheel = 0.0;  ///< F_stat,2j
};

/// Right/left force pair on one trailer axle [N].
struct AxlePair {
    double right = 0.0;
    double left = 0.0;
};

using TrailerAxleForces = std::array<AxlePair, 3>;

/// Lateral tire force with the wheel-lift flag raised when F_z <= 0 forced
/// the force to zero.
struct LateralForce {
    double value = 0.0;
    bool lift_off = false;
};

/// Longitudinal speed with a flag set when the value had to be clamped up
/// to kMinLongitudinalSpeed.
struct ClampedSpeed {
    double value = 0.0;
    bool clamped = false;
};

/// Slip angles of the eight tire stations [rad].
struct SlipAngleSet {
    double a11 = 0.0;
    double a12 = 0.0;
    double a21R = 0.0, a21L = 0.0;
    double a22R = 0.0, a22L = 0.0;
    double a23R = 0.0, a23L = 0.0;
};

/// Static loads from the even distribution of the trailer weight over its
/// three axles; the kingpin share lands on the tractor axles by lever ratio.
inline StaticLoads static_loads(const VehicleParameters& p) {
    const double e = p.coupling_lever_e();
    const double f = p.wheelbase_f();
    if (!(e > 0.0) || !(f > 0.0))
        throw invalid_parameter_error("static_loads: degenerate geometry (e or f not positive)");
    StaticLoads loads;
    loads.front = (p.m_A1 * p.l_h1 * e + p.m_A2 * p.l_h22 * (p.l_h1 - p.l_k1)) * kGravity / (e * f);
    loads.rear = (p.m_A1 * p.l_v1 * e + p.m_A2 * p.l_h22 * (p.l_v1 + p.l_k1)) * kGravity / (e * f);
    loads.trailer_wheel = p.m_A2 * kGravity * p.l_v2 / (6.0 * e);
    return loads;
}

/// Spring-damper forces per trailer axle and side: static share plus the
/// roll-lever spring and damper terms, sign-opposed left/right.
inline TrailerAxleForces suspension_forces(const VehicleParameters& p, double kappa2,
                                           double kappa2_rate) {
    const double f_stat = static_loads(p).trailer_wheel;
    const double lever = p.b2 / 2.0;
    const double roll_term = kappa2 * lever * p.k + kappa2_rate * lever * p.d;
    AxlePair pair{f_stat + roll_term, f_stat - roll_term};
    return {pair, pair, pair};
}

/// Vertical tire forces: suspension force plus the wheel/axle weight.
/// Negative values (wheel lift-off) are reported as-is, never clamped.
inline TrailerAxleForces vertical_tire_forces(const VehicleParameters& p,
                                              const TrailerAxleForces& f_fd) {
    TrailerAxleForces f_z = f_fd;
    for (auto& axle : f_z) {
        axle.right += p.m_R2 * kGravity;
        axle.left += p.m_R2 * kGravity;
    }
    return f_z;
}

/// Tractor vertical tire loads per axle: static axle load plus the weight
/// of the two wheels on that axle. Constant; the single-track tractor has
/// no modeled load transfer.
inline std::array<double, 2> tractor_vertical_loads(const VehicleParameters& p) {
    const StaticLoads loads = static_loads(p);
    const double wheel_weight = 2.0 * p.m_R1 * kGravity;
    return {loads.front + wheel_weight, loads.rear + wheel_weight};
}

/// Stiffness factor B of the simplified magic formula [1/rad].
inline double mtfm_b(const TireParams& tire, double f_z) {
    if (!(f_z > 0.0)) throw invalid_parameter_error("mtfm_b: F_z must be positive");
    return tire.c1 * std::sin(2.0 * std::atan(f_z / tire.c2)) / (tire.C * tire.mu * f_z);
}

/// Steady-state lateral tire force, odd in alpha, bounded by mu*F_z.
/// F_z <= 0 means the wheel carries no load: zero force, lift-off flag.
inline LateralForce lateral_tire_force_static(const TireParams& tire, double alpha, double f_z) {
    if (!(f_z > 0.0)) return {0.0, true};
    const double b = mtfm_b(tire, f_z);
    return {tire.mu * f_z * std::sin(tire.C * std::atan(b * alpha)), false};
}

/// Longitudinal component of the shared coupling-point velocity expressed
/// in the tractor frame. The raw value may fall below kMinLongitudinalSpeed
/// in extreme articulation; the clamp flag records that.
inline ClampedSpeed tractor_longitudinal_velocity(const StateVector& x, double v_x2,
                                                  const VehicleParameters& p) {
    const double theta = x.theta();
    if (!(std::abs(theta) < M_PI / 2.0))
        throw simulation_error("articulation angle reached +-pi/2");
    const double raw =
        v_x2 * std::cos(theta) - (x.v_y2() + x.yawrate_2() * p.l_v2) * std::sin(theta);
    if (raw < kMinLongitudinalSpeed) return {kMinLongitudinalSpeed, true};
    return {raw, false};
}

/// Slip angles of all eight tire stations. v_x1 and u.v_x2 must already be
/// clamped to kMinLongitudinalSpeed; the trailer denominators additionally
/// carry the track-width yaw correction and must stay positive.
inline SlipAngleSet slip_angles(const StateVector& x, const InputSample& u, double v_x1,
                                const VehicleParameters& p) {
    SlipAngleSet a;
    a.a11 = u.delta - std::atan((x.v_y1() + x.yawrate_1() * p.l_v1) / v_x1);
    a.a12 = -std::atan((x.v_y1() - x.yawrate_1() * p.l_h1) / v_x1);

    const double lateral_base = x.v_y2() + x.rollrate_2() * p.h_W2;
    const double yaw_track = x.yawrate_2() * p.b2 / 2.0;
    const double denom_r = u.v_x2 + yaw_track;
    const double denom_l = u.v_x2 - yaw_track;
    if (!(denom_r > 0.0) || !(denom_l > 0.0))
        throw simulation_error("trailer slip-angle denominator not positive", u.t);

    const std::array<double, 3> axle_dist = {p.l_h21, p.l_h22, p.l_h23};
    std::array<double*, 3> right = {&a.a21R, &a.a22R, &a.a23R};
    std::array<double*, 3> left = {&a.a21L, &a.a22L, &a.a23L};
    for (int j = 0; j < 3; ++j) {
        const double numer = lateral_base - x.yawrate_2() * axle_dist[static_cast<std::size_t>(j)];
        *right[static_cast<std::size_t>(j)] = -std::atan(numer / denom_r);
        *left[static_cast<std::size_t>(j)] = -std::atan(numer / denom_l);
    }
    return a;
}

/// Lateral coupling force at the kingpin, solved from the tractor force
/// balance. Diagnostic helper; the assembled dynamics substitute the same
/// expression algebraically.
inline double coupling_force(const StateVector& x, double a_y1, double delta,
                             const VehicleParameters& p) {
    const double cos_theta = std::cos(x.theta());
    if (!(std::abs(x.theta()) < M_PI / 2.0) || cos_theta == 0.0)
        throw simulation_error("coupling force singular at |theta| >= pi/2");
    const double m1 = 4.0 * p.m_R1 + p.m_A1;
    return (x.F_y11() * std::cos(delta) + x.F_y12() - m1 * a_y1) / cos_theta;
}

}  // namespace artic
