#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "artic/common.hpp"

namespace artic {

/// Simplified magic-formula lateral tire model coefficients for one tire
/// station (an axle on the tractor, a wheel set on the trailer).
struct TireParams {
    double mu = 0.85;                  ///< friction scaling [-]
    double C = 1.5;                    ///< shape factor [-]
    double c1 = 4.0e5;                 ///< cornering-stiffness scale [N]
    double c2 = 3.5e4;                 ///< load at peak stiffness [N]
    double relaxation_length = 0.6;    ///< lateral-force lag length [m]

    void validate(const std::string& where) const {
        auto fail = [&](const std::string& msg) {
            throw invalid_parameter_error(where + ": " + msg);
        };
        if (!(mu > 0.0) || mu > 2.0) fail("mu must be in (0, 2]");
        if (!(C > 0.0) || C > 3.0) fail("C must be in (0, 3]");
        if (!(c1 > 0.0)) fail("c1 must be positive");
        if (!(c2 > 0.0)) fail("c2 must be positive");
        if (!(relaxation_length > 0.0)) fail("relaxation_length must be positive");
    }
};

/// Per-set tire coefficients without the friction scaling, which is shared
/// across all tires of the combination.
struct TireSet {
    double C = 1.5;
    double c1 = 4.0e5;
    double c2 = 3.5e4;
    double relaxation_length = 0.6;
};

/// All geometric, inertial, suspension, and tire constants of the
/// tractor-semitrailer combination. SI units throughout; derived lengths
/// (e, f) are recomputed on demand and never stored.
struct VehicleParameters {
    // Masses and inertias
    double m_A1 = 7000.0;    ///< tractor body mass [kg]
    double m_A2 = 24000.0;   ///< trailer body mass [kg]
    double m_R1 = 400.0;     ///< tractor lumped wheel+axle mass, per wheel [kg]
    double m_R2 = 350.0;     ///< trailer lumped wheel+axle mass, per wheel [kg]
    double J_z1 = 25000.0;   ///< tractor yaw inertia [kg m^2]
    double J_z2 = 400000.0;  ///< trailer yaw inertia [kg m^2]
    double J_x2 = 50000.0;   ///< trailer roll inertia about the roll axis [kg m^2]

    // Tractor geometry (distances to the tractor CG)
    double l_v1 = 1.4;  ///< front axle [m]
    double l_h1 = 2.2;  ///< rear axle [m]
    double l_k1 = 1.9;  ///< coupling point [m]

    // Trailer geometry
    double l_v2 = 5.5;   ///< kingpin to trailer CG [m]
    double l_h21 = 0.9;  ///< axle 1 behind trailer CG [m]
    double l_h22 = 2.2;  ///< axle 2 behind trailer CG [m]
    double l_h23 = 3.5;  ///< axle 3 behind trailer CG [m]
    double b2 = 2.05;    ///< trailer track width [m]
    double h_W2 = 1.2;   ///< body CG height above roll axis [m]
    double h_WK = 0.55;  ///< coupling point height above roll axis [m]

    // Trailer suspension, per side
    double k = 5.0e5;  ///< spring stiffness [N/m of lever displacement]
    double d = 3.0e4;  ///< damper rate [N s/m]

    /// Friction scaling shared by all tires [-].
    double mu = 0.85;

    TireSet tire_front{1.6, 7.0e5, 5.5e4, 0.6};    ///< tractor front axle
    TireSet tire_rear{1.6, 1.2e6, 9.0e4, 0.7};     ///< tractor rear axle
    TireSet tire_trailer{1.5, 4.0e5, 3.5e4, 0.75}; ///< all six trailer wheels

    TireParams front_tire() const { return {mu, tire_front.C, tire_front.c1, tire_front.c2, tire_front.relaxation_length}; }
    TireParams rear_tire() const { return {mu, tire_rear.C, tire_rear.c1, tire_rear.c2, tire_rear.relaxation_length}; }
    TireParams trailer_tire() const { return {mu, tire_trailer.C, tire_trailer.c1, tire_trailer.c2, tire_trailer.relaxation_length}; }

    /// Trailer lever arm e = l_h22 + l_v2 [m]; recomputed, never cached.
    double coupling_lever_e() const { return l_h22 + l_v2; }
    /// Tractor wheelbase f = l_v1 + l_h1 [m].
    double wheelbase_f() const { return l_v1 + l_h1; }

    void validate() const {
        auto fail = [](const std::string& msg) {
            throw invalid_parameter_error("VehicleParameters: " + msg);
        };
        auto positive = [&](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) fail(std::string(name) + " must be strictly positive");
        };
        positive(m_A1, "m_A1");
        positive(m_A2, "m_A2");
        positive(m_R1, "m_R1");
        positive(m_R2, "m_R2");
        positive(J_z1, "J_z1");
        positive(J_z2, "J_z2");
        positive(J_x2, "J_x2");
        positive(l_v1, "l_v1");
        positive(l_h1, "l_h1");
        positive(l_v2, "l_v2");
        positive(l_h21, "l_h21");
        positive(l_h22, "l_h22");
        positive(l_h23, "l_h23");
        positive(b2, "b2");
        positive(h_W2, "h_W2");
        positive(h_WK, "h_WK");
        positive(k, "k");
        positive(d, "d");
        if (l_k1 < 0.0 || !std::isfinite(l_k1)) fail("l_k1 must be non-negative");
        if (!(coupling_lever_e() > 0.0)) fail("degenerate geometry: e = l_h22 + l_v2 must be positive");
        if (!(wheelbase_f() > 0.0)) fail("degenerate geometry: f = l_v1 + l_h1 must be positive");
        if (!(mu > 0.0) || mu > 2.0) fail("mu must be in (0, 2]");
        front_tire().validate("tire_front");
        rear_tire().validate("tire_rear");
        trailer_tire().validate("tire_trailer");
    }
};

/// The 15 model states, fixed order: lateral/yaw states of both bodies,
/// roll, articulation, then the eight lagged lateral tire forces.
struct StateVector {
    static constexpr std::size_t kSize = 15;

    std::array<double, kSize> raw{};

    double& v_y1() { return raw[0]; }
    double& yawrate_1() { return raw[1]; }
    double& kappa_2() { return raw[2]; }
    double& v_y2() { return raw[3]; }
    double& rollrate_2() { return raw[4]; }
    double& yawrate_2() { return raw[5]; }
    double& theta() { return raw[6]; }
    double& F_y11() { return raw[7]; }
    double& F_y12() { return raw[8]; }
    double& F_y21R() { return raw[9]; }
    double& F_y21L() { return raw[10]; }
    double& F_y22R() { return raw[11]; }
    double& F_y22L() { return raw[12]; }
    double& F_y23R() { return raw[13]; }
    double& F_y23L() { return raw[14]; }

    double v_y1() const { return raw[0]; }
    double yawrate_1() const { return raw[1]; }
    double kappa_2() const { return raw[2]; }
    double v_y2() const { return raw[3]; }
    double rollrate_2() const { return raw[4]; }
    double yawrate_2() const { return raw[5]; }
    double theta() const { return raw[6]; }
    double F_y11() const { return raw[7]; }
    double F_y12() const { return raw[8]; }
    double F_y21R() const { return raw[9]; }
    double F_y21L() const { return raw[10]; }
    double F_y22R() const { return raw[11]; }
    double F_y22L() const { return raw[12]; }
    double F_y23R() const { return raw[13]; }
    double F_y23L() const { return raw[14]; }

    double& operator[](std::size_t i) { return raw[i]; }
    double operator[](std::size_t i) const { return raw[i]; }

    bool finite() const {
        return std::all_of(raw.begin(), raw.end(), [](double v) { return std::isfinite(v); });
    }

    static const std::array<std::string, kSize>& names() {
        static const std::array<std::string, kSize> n = {
            "v_y1",   "yawrate_1", "kappa_2", "v_y2",   "rollrate_2",
            "yawrate_2", "theta",  "F_y11",   "F_y12",  "F_y21R",
            "F_y21L", "F_y22R",    "F_y22L",  "F_y23R", "F_y23L"};
        return n;
    }
};

/// One input sample: steer angle at the road wheels, trailer longitudinal
/// speed and acceleration.
struct InputSample {
    double t = 0.0;     ///< [s]
    double delta = 0.0; ///< road-wheel steer angle [rad]
    double v_x2 = 0.0;  ///< trailer longitudinal speed [m/s]
    double a_x2 = 0.0;  ///< trailer longitudinal acceleration [m/s^2]
};

/// Time-ordered input samples; evaluation between samples is linear, and
/// evaluation outside the horizon is an error (never extrapolated).
class InputTrajectory {
public:
    InputTrajectory() = default;
    explicit InputTrajectory(std::vector<InputSample> samples) : samples_(std::move(samples)) {
        validate();
    }

    const std::vector<InputSample>& samples() const { return samples_; }
    bool empty() const { return samples_.empty(); }
    std::size_t size() const { return samples_.size(); }
    double t_begin() const { return samples_.front().t; }
    double t_end() const { return samples_.back().t; }

    void push_back(const InputSample& s) {
        if (!samples_.empty() && !(s.t > samples_.back().t))
            throw invalid_parameter_error("InputTrajectory: time stamps must be strictly increasing");
        samples_.push_back(s);
    }

    /// Linear interpolation at time t; tolerates ~1 ns of roundoff at the
    /// horizon edges, throws beyond.
    InputSample at(double t) const {
        if (samples_.empty()) throw invalid_parameter_error("InputTrajectory: empty");
        const double edge_tol = 1e-9;
        if (t < t_begin() - edge_tol || t > t_end() + edge_tol)
            throw simulation_error("input requested outside trajectory horizon", t);
        t = std::clamp(t, t_begin(), t_end());
        auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double value, const InputSample& s) { return value < s.t; });
        if (it == samples_.begin()) return samples_.front();
        if (it == samples_.end()) return samples_.back();
        const InputSample& hi = *it;
        const InputSample& lo = *(it - 1);
        const double w = (t - lo.t) / (hi.t - lo.t);
        return {t, lo.delta + w * (hi.delta - lo.delta), lo.v_x2 + w * (hi.v_x2 - lo.v_x2),
                lo.a_x2 + w * (hi.a_x2 - lo.a_x2)};
    }

private:
    void validate() const {
        for (std::size_t i = 1; i < samples_.size(); ++i) {
            if (!(samples_[i].t > samples_[i - 1].t))
                throw invalid_parameter_error("InputTrajectory: time stamps must be strictly increasing");
        }
    }

    std::vector<InputSample> samples_;
};

/// The 12 measured/compared quantities, fixed order.
struct OutputVector {
    static constexpr std::size_t kSize = 12;

    std::array<double, kSize> raw{};

    double& yawrate_1() { return raw[0]; }
    double& yawrate_2() { return raw[1]; }
    double& rollrate_2() { return raw[2]; }
    double& theta() { return raw[3]; }
    double& F_y21R() { return raw[4]; }
    double& F_y21L() { return raw[5]; }
    double& F_y23R() { return raw[6]; }
    double& F_y23L() { return raw[7]; }
    double& F_z21R() { return raw[8]; }
    double& F_z21L() { return raw[9]; }
    double& F_z23R() { return raw[10]; }
    double& F_z23L() { return raw[11]; }

    double yawrate_1() const { return raw[0]; }
    double yawrate_2() const { return raw[1]; }
    double rollrate_2() const { return raw[2]; }
    double theta() const { return raw[3]; }
    double F_y21R() const { return raw[4]; }
    double F_y21L() const { return raw[5]; }
    double F_y23R() const { return raw[6]; }
    double F_y23L() const { return raw[7]; }
    double F_z21R() const { return raw[8]; }
    double F_z21L() const { return raw[9]; }
    double F_z23R() const { return raw[10]; }
    double F_z23L() const { return raw[11]; }

    double operator[](std::size_t i) const { return raw[i]; }
    double& operator[](std::size_t i) { return raw[i]; }

    static const std::array<std::string, kSize>& names() {
        static const std::array<std::string, kSize> n = {
            "yawrate_1", "yawrate_2", "rollrate_2", "theta",  "F_y21R", "F_y21L",
            "F_y23R",    "F_y23L",    "F_z21R",     "F_z21L", "F_z23R", "F_z23L"};
        return n;
    }
};

/// Dataset input channel names, in canonical file order.
inline const std::array<std::string, 3>& input_channel_names() {
    static const std::array<std::string, 3> n = {"delta", "v_x2", "a_x2"};
    return n;
}

}  // namespace artic
