#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "artic/common.hpp"
#include "artic/model.hpp"
#include "artic/types.hpp"

namespace artic {

/// Events and extrema collected while evaluating the model; one instance
/// accumulates over a whole simulation.
struct SimulationDiagnostics {
    std::uint64_t lift_off_events = 0;
    std::array<bool, 6> lift_off_wheels{};  // 21R, 21L, 22R, 22L, 23R, 23L
    std::uint64_t v_x1_clamp_events = 0;
    std::uint64_t v_x2_clamp_events = 0;
    double min_rcond = std::numeric_limits<double>::infinity();
    double max_abs_theta = 0.0;
    double max_constraint_residual = 0.0;
    std::uint64_t derivative_evaluations = 0;

    bool clean() const {
        return lift_off_events == 0 && v_x1_clamp_events == 0 && v_x2_clamp_events == 0;
    }
};

/// The implicit state-space system M(x) xdot = f(x, u) at one evaluation
/// point. Rows 1-5 carry the rigid-body dynamics and the differentiated
/// coupling constraint; rows 6-15 are single-entry integrator/lag rows.
struct AssembledSystem {
    Eigen::Matrix<double, 15, 15> M;
    Eigen::Matrix<double, 15, 1> rhs;
};

/// Raw longitudinal coupling-point velocity in the tractor frame (no clamp).
inline double tractor_longitudinal_velocity_raw(const StateVector& x, double v_x2,
                                                const VehicleParameters& p) {
    return v_x2 * std::cos(x.theta()) -
           (x.v_y2() + x.yawrate_2() * p.l_v2) * std::sin(x.theta());
}

/// Velocity residual of the lateral coupling constraint; zero on the exact
/// solution manifold, drift measures integrator constraint violation.
inline double coupling_velocity_residual(const StateVector& x, double v_x2,
                                         const VehicleParameters& p) {
    return x.v_y1() - x.yawrate_1() * p.l_k1 - v_x2 * std::sin(x.theta()) -
           (x.v_y2() + x.yawrate_2() * p.l_v2) * std::cos(x.theta());
}

/// Builds M and f for the current state and input.
///
/// Row map (see docs/state_space.md for the derivation):
///   0 tractor yaw, 1 trailer lateral, 2 trailer yaw, 3 trailer roll,
///   4 differentiated coupling constraint, 5 articulation rate,
///   6 roll-angle integration, 7-14 tire-force lags
///   (F_y11, F_y12, F_y21R, F_y21L, F_y22R, F_y22L, F_y23R, F_y23L).
/// The kingpin force is eliminated algebraically, which produces the
/// off-diagonal column-0 entries in rows 0-3.
inline AssembledSystem assemble(const StateVector& x, const InputSample& u,
                                const VehicleParameters& p,
                                SimulationDiagnostics* diag = nullptr) {
    const double theta = x.theta();
    if (!(std::abs(theta) < M_PI / 2.0))
        throw simulation_error("articulation angle reached +-pi/2", u.t);

    const double kappa2 = x.kappa_2();
    const double kappa2_rate = x.rollrate_2();
    const double r1 = x.yawrate_1();
    const double r2 = x.yawrate_2();

    const double m1 = 4.0 * p.m_R1 + p.m_A1;
    const double m2 = 6.0 * p.m_R2 + p.m_A2;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double ck = std::cos(kappa2);
    const double sk = std::sin(kappa2);
    const double cd = std::cos(u.delta);

    // Clamps apply to slip-angle and tire-lag denominators only; the
    // rigid-body rows keep the raw kinematic speeds.
    const double v_x2 = u.v_x2;
    double v_x2_c = v_x2;
    if (v_x2_c < kMinLongitudinalSpeed) {
        v_x2_c = kMinLongitudinalSpeed;
        if (diag) ++diag->v_x2_clamp_events;
    }
    const double v_x1 = tractor_longitudinal_velocity_raw(x, v_x2, p);
    double v_x1_c = v_x1;
    if (v_x1_c < kMinLongitudinalSpeed) {
        v_x1_c = kMinLongitudinalSpeed;
        if (diag) ++diag->v_x1_clamp_events;
    }

    // Constituent forces at the current state.
    const TrailerAxleForces f_fd = suspension_forces(p, kappa2, kappa2_rate);
    const TrailerAxleForces f_z = vertical_tire_forces(p, f_fd);
    const std::array<double, 2> f_z_tractor = tractor_vertical_loads(p);

    InputSample u_c = u;
    u_c.v_x2 = v_x2_c;
    const SlipAngleSet alpha = slip_angles(x, u_c, v_x1_c, p);

    const TireParams tire_front = p.front_tire();
    const TireParams tire_rear = p.rear_tire();
    const TireParams tire_trailer = p.trailer_tire();

    const LateralForce fs11 = lateral_tire_force_static(tire_front, alpha.a11, f_z_tractor[0]);
    const LateralForce fs12 = lateral_tire_force_static(tire_rear, alpha.a12, f_z_tractor[1]);
    const std::array<LateralForce, 6> fs2 = {
        lateral_tire_force_static(tire_trailer, alpha.a21R, f_z[0].right),
        lateral_tire_force_static(tire_trailer, alpha.a21L, f_z[0].left),
        lateral_tire_force_static(tire_trailer, alpha.a22R, f_z[1].right),
        lateral_tire_force_static(tire_trailer, alpha.a22L, f_z[1].left),
        lateral_tire_force_static(tire_trailer, alpha.a23R, f_z[2].right),
        lateral_tire_force_static(tire_trailer, alpha.a23L, f_z[2].left)};
    if (diag) {
        for (std::size_t w = 0; w < 6; ++w) {
            if (fs2[w].lift_off) {
                ++diag->lift_off_events;
                diag->lift_off_wheels[w] = true;
            }
        }
    }

    // State-only part of the eliminated kingpin force: F_Ky*cos(theta) =
    // s_force - m1*vdot_y1.
    const double s_force = x.F_y11() * cd + x.F_y12() - m1 * v_x1 * r1;

    const double sum_f_y2 = x.F_y21R() + x.F_y21L() + x.F_y22R() + x.F_y22L() +
                            x.F_y23R() + x.F_y23L();
    const double yaw_moment_trailer = (x.F_y21R() + x.F_y21L()) * p.l_h21 +
                                      (x.F_y22R() + x.F_y22L()) * p.l_h22 +
                                      (x.F_y23R() + x.F_y23L()) * p.l_h23;
    const double roll_moment_fd = (f_fd[0].left - f_fd[0].right) +
                                  (f_fd[1].left - f_fd[1].right) +
                                  (f_fd[2].left - f_fd[2].right);

    AssembledSystem sys;
    sys.M.setZero();
    auto& M = sys.M;
    auto& rhs = sys.rhs;

    // Row 0: tractor yaw balance with the kingpin force eliminated.
    M(0, 0) = m1 * p.l_k1;
    M(0, 1) = p.J_z1;
    rhs(0) = x.F_y11() * cd * p.l_v1 - x.F_y12() * p.l_h1 + p.l_k1 * s_force;

    // Row 1: trailer lateral balance.
    M(1, 0) = m1 / ct;
    M(1, 3) = m2;
    M(1, 4) = p.m_A2 * p.h_W2;
    rhs(1) = sum_f_y2 + s_force / ct - m2 * v_x2 * r2;

    // Row 2: trailer yaw balance.
    M(2, 0) = m1 * p.l_v2 / ct;
    M(2, 5) = p.J_z2;
    rhs(2) = p.l_v2 * s_force / ct - yaw_moment_trailer;

    // Row 3: trailer roll balance.
    M(3, 0) = -m1 * p.h_WK * ck / ct;
    M(3, 3) = -p.m_A2 * p.h_W2 * ck;
    M(3, 4) = p.J_x2;
    rhs(3) = p.m_A2 * p.h_W2 * (v_x2 * r2 * ck + kGravity * sk) +
             (p.b2 / 2.0) * roll_moment_fd - p.h_WK * ck * s_force / ct;

    // Row 4: time derivative of the coupling velocity constraint.
    M(4, 0) = 1.0;
    M(4, 1) = -p.l_k1;
    M(4, 3) = -ct;
    M(4, 5) = -p.l_v2 * ct;
    M(4, 6) = -(v_x2 * ct - (x.v_y2() + r2 * p.l_v2) * st);
    rhs(4) = u.a_x2 * st;

    // Row 5: articulation rate; row 6: roll-angle integration.
    M(5, 6) = 1.0;
    rhs(5) = r2 - r1;
    M(6, 2) = 1.0;
    rhs(6) = kappa2_rate;

    // Rows 7-14: first-order tire-force lags, normalized to unit diagonal.
    const std::array<double, 8> lag_rate = {
        v_x1_c / tire_front.relaxation_length, v_x1_c / tire_rear.relaxation_length,
        v_x2_c / tire_trailer.relaxation_length, v_x2_c / tire_trailer.relaxation_length,
        v_x2_c / tire_trailer.relaxation_length, v_x2_c / tire_trailer.relaxation_length,
        v_x2_c / tire_trailer.relaxation_length, v_x2_c / tire_trailer.relaxation_length};
    const std::array<double, 8> f_y_static = {fs11.value,    fs12.value,    fs2[0].value,
                                              fs2[1].value,  fs2[2].value,  fs2[3].value,
                                              fs2[4].value,  fs2[5].value};
    for (int i = 0; i < 8; ++i) {
        M(7 + i, 7 + i) = 1.0;
        rhs(7 + i) = lag_rate[static_cast<std::size_t>(i)] *
                     (f_y_static[static_cast<std::size_t>(i)] - x.raw[static_cast<std::size_t>(7 + i)]);
    }

    if (diag) {
        diag->max_abs_theta = std::max(diag->max_abs_theta, std::abs(theta));
        ++diag->derivative_evaluations;
    }
    return sys;
}

/// Solves M xdot = f by partial-pivot LU. Aborts on an ill-conditioned M.
inline StateVector state_derivative(const StateVector& x, const InputSample& u,
                                    const VehicleParameters& p,
                                    SimulationDiagnostics* diag = nullptr) {
    const AssembledSystem sys = assemble(x, u, p, diag);
    Eigen::PartialPivLU<Eigen::Matrix<double, 15, 15>> lu(sys.M);
    const double rcond = lu.rcond();
    if (diag) diag->min_rcond = std::min(diag->min_rcond, rcond);
    if (!(rcond > kMinReciprocalCondition))
        throw simulation_error("mass matrix ill-conditioned (rcond=" + std::to_string(rcond) + ")",
                               u.t);
    Eigen::Matrix<double, 15, 1> xdot_vec = lu.solve(sys.rhs);

    StateVector xdot;
    for (std::size_t i = 0; i < StateVector::kSize; ++i) xdot.raw[i] = xdot_vec(static_cast<int>(i));
    // The integrator rows hold exactly, not just to solver precision.
    xdot.theta() = sys.rhs(5);
    xdot.kappa_2() = sys.rhs(6);

#ifndef NDEBUG
    for (std::size_t i = 0; i < StateVector::kSize; ++i) xdot_vec(static_cast<int>(i)) = xdot.raw[i];
    const double residual = (sys.M * xdot_vec - sys.rhs).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-8))
        throw simulation_error("state-space residual above 1e-8: " + std::to_string(residual), u.t);
#endif
    return xdot;
}

/// Output map: kinematic outputs copied from the state, vertical tire
/// forces evaluated from the suspension at the current roll state.
inline OutputVector output(const StateVector& x, const InputSample& /*u*/,
                           const VehicleParameters& p) {
    OutputVector y;
    y.yawrate_1() = x.yawrate_1();
    y.yawrate_2() = x.yawrate_2();
    y.rollrate_2() = x.rollrate_2();
    y.theta() = x.theta();
    y.F_y21R() = x.F_y21R();
    y.F_y21L() = x.F_y21L();
    y.F_y23R() = x.F_y23R();
    y.F_y23L() = x.F_y23L();
    const TrailerAxleForces f_z = vertical_tire_forces(p, suspension_forces(p, x.kappa_2(), x.rollrate_2()));
    y.F_z21R() = f_z[0].right;
    y.F_z21L() = f_z[0].left;
    y.F_z23R() = f_z[2].right;
    y.F_z23L() = f_z[2].left;
    return y;
}

/// Anything that can be evaluated for an input sample at a given time:
/// an InputTrajectory (linear interpolation) or an analytic maneuver.
template <typename T>
concept InputSource = requires(const T& src, double t) {
    { src.at(t) } -> std::convertible_to<InputSample>;
};

namespace detail {

/// Classical RK4 update on a fixed-size array; f(x, t) returns dx/dt.
template <std::size_t N, typename Deriv>
std::array<double, N> rk4_step(const Deriv& f, const std::array<double, N>& x, double t,
                               double dt) {
    const std::array<double, N> k1 = f(x, t);
    std::array<double, N> probe;
    for (std::size_t i = 0; i < N; ++i) probe[i] = x[i] + 0.5 * dt * k1[i];
    const std::array<double, N> k2 = f(probe, t + 0.5 * dt);
    for (std::size_t i = 0; i < N; ++i) probe[i] = x[i] + 0.5 * dt * k2[i];
    const std::array<double, N> k3 = f(probe, t + 0.5 * dt);
    for (std::size_t i = 0; i < N; ++i) probe[i] = x[i] + dt * k3[i];
    const std::array<double, N> k4 = f(probe, t + dt);
    std::array<double, N> next;
    for (std::size_t i = 0; i < N; ++i)
        next[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return next;
}

}  // namespace detail

/// One classical fourth-order Runge-Kutta step from t to t+dt.
template <InputSource Source>
StateVector step_rk4(const StateVector& x, const Source& inputs, double t, double dt,
                     const VehicleParameters& p, SimulationDiagnostics* diag = nullptr) {
    if (!(dt > 0.0)) throw invalid_parameter_error("step_rk4: dt must be positive");
    auto deriv = [&](const std::array<double, StateVector::kSize>& state, double time) {
        StateVector xs;
        xs.raw = state;
        return state_derivative(xs, inputs.at(time), p, diag).raw;
    };
    StateVector next;
    next.raw = detail::rk4_step<StateVector::kSize>(deriv, x.raw, t, dt);
    if (!next.finite()) throw simulation_error("state became non-finite", t + dt);
    return next;
}

/// Time grid, state and output trajectories, and accumulated diagnostics
/// of one simulation run.
struct SimulationResult {
    std::vector<double> time;
    std::vector<StateVector> states;
    std::vector<OutputVector> outputs;
    SimulationDiagnostics diagnostics;

    std::size_t size() const { return time.size(); }
};

/// Fixed-step RK4 over [t0, t1]; states and outputs recorded on the
/// integration grid t0 + k*dt.
template <InputSource Source>
SimulationResult simulate(const StateVector& x0, const Source& inputs, double t0, double t1,
                          const VehicleParameters& params, double dt) {
    params.validate();
    if (!(dt > 0.0)) throw invalid_parameter_error("simulate: dt must be positive");
    if (!(t1 >= t0)) throw invalid_parameter_error("simulate: empty horizon");

    const auto n_steps = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9));
    SimulationResult result;
    result.time.reserve(n_steps + 1);
    result.states.reserve(n_steps + 1);
    result.outputs.reserve(n_steps + 1);

    StateVector x = x0;
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        const InputSample u = inputs.at(t);
        result.time.push_back(t);
        result.states.push_back(x);
        result.outputs.push_back(output(x, u, params));
        result.diagnostics.max_constraint_residual =
            std::max(result.diagnostics.max_constraint_residual,
                     std::abs(coupling_velocity_residual(x, u.v_x2, params)));
        result.diagnostics.max_abs_theta =
            std::max(result.diagnostics.max_abs_theta, std::abs(x.theta()));
        if (k < n_steps) x = step_rk4(x, inputs, t, dt, params, &result.diagnostics);
    }
    return result;
}

/// Convenience overload covering the trajectory's whole horizon.
inline SimulationResult simulate(const StateVector& x0, const InputTrajectory& inputs,
                                 const VehicleParameters& params, double dt) {
    if (inputs.empty()) throw invalid_parameter_error("simulate: empty input trajectory");
    return simulate(x0, inputs, inputs.t_begin(), inputs.t_end(), params, dt);
}

}  // namespace artic
