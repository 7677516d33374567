#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "artic/common.hpp"
#include "artic/dataset.hpp"
#include "artic/dynamics.hpp"
#include "artic/identification.hpp"
#include "artic/types.hpp"
#include "artic/validation.hpp"

namespace artic {

enum class ManeuverKind { slalom, double_lane_change, constant_turn, validation_sequence, piecewise };

inline std::string to_string(ManeuverKind kind) {
    switch (kind) {
        case ManeuverKind::slalom: return "slalom";
        case ManeuverKind::double_lane_change: return "double-lane-change";
        case ManeuverKind::constant_turn: return "constant-turn";
        case ManeuverKind::validation_sequence: return "validation-sequence";
        case ManeuverKind::piecewise: return "piecewise";
    }
    return "?";
}

inline ManeuverKind maneuver_kind_from_string(const std::string& name) {
    if (name == "slalom") return ManeuverKind::slalom;
    if (name == "double-lane-change") return ManeuverKind::double_lane_change;
    if (name == "constant-turn") return ManeuverKind::constant_turn;
    if (name == "validation-sequence") return ManeuverKind::validation_sequence;
    if (name == "piecewise") return ManeuverKind::piecewise;
    throw config_error("unknown maneuver '" + name +
                       "' (valid: slalom, double-lane-change, constant-turn, "
                       "validation-sequence, piecewise)");
}

/// Declarative maneuver description. For slalom the frequency is the steer
/// cycle rate; for the double lane change 1/frequency is the full left-right
/// duration. Piecewise maneuvers carry explicit (t, value) knots.
struct ManeuverSpec {
    ManeuverKind kind = ManeuverKind::slalom;
    double duration = 30.0;        ///< [s]
    double sample_rate = 100.0;    ///< [Hz]
    double speed_kmh = 30.0;       ///< plateau speed [km/h]
    double steer_amplitude = 0.05; ///< [rad]
    double frequency = 0.25;       ///< [Hz]
    double rise_time = 1.0;        ///< raised-cosine transition time [s]
    double lead_in = 2.0;          ///< straight driving before steering [s]
    std::vector<std::pair<double, double>> steer_knots;  ///< piecewise (t [s], delta [rad])
    std::vector<std::pair<double, double>> speed_knots;  ///< piecewise (t [s], v [m/s])

    void validate() const {
        if (!(duration > 0.0)) throw config_error("maneuver: duration must be positive");
        if (!(sample_rate > 0.0)) throw config_error("maneuver: sample_rate must be positive");
        if (kind == ManeuverKind::piecewise) {
            if (steer_knots.size() < 2 || speed_knots.size() < 2)
                throw config_error("piecewise maneuver: need at least 2 steer and 2 speed knots");
            for (const auto* knots : {&steer_knots, &speed_knots}) {
                for (std::size_t i = 1; i < knots->size(); ++i) {
                    if (!((*knots)[i].first > (*knots)[i - 1].first))
                        throw config_error("piecewise maneuver: knot times must increase");
                }
            }
            for (const auto& [t, v] : speed_knots) {
                if (v < kMinLongitudinalSpeed)
                    throw config_error("piecewise maneuver: speeds must stay >= v_min");
            }
            return;
        }
        if (speed_kmh / 3.6 < kMinLongitudinalSpeed)
            throw config_error("maneuver: speed must stay >= v_min");
        if (steer_amplitude < 0.0) throw config_error("maneuver: steer amplitude must be >= 0");
        if (!(rise_time > 0.0)) throw config_error("maneuver: rise_time must be positive");
        if (lead_in < 0.0 || lead_in > duration) throw config_error("maneuver: bad lead_in");
        if ((kind == ManeuverKind::slalom || kind == ManeuverKind::double_lane_change) &&
            !(frequency > 0.0))
            throw config_error("maneuver: frequency must be positive");
    }
};

namespace profile {

/// C1 steering primitives, summed to form the steer signal.
struct SteerSegment {
    enum class Type { hann_pulse, sine_burst, ramp_hold };
    Type type = Type::hann_pulse;
    double t0 = 0.0;
    double t1 = 0.0;
    double amplitude = 0.0;
    double frequency = 0.0;  // sine_burst only
    double rise = 1.0;       // fade in/out time
    double fall = 1.0;       // ramp_hold release time; 0 keeps holding to t1

    double eval(double t) const {
        if (t <= t0 || t >= t1) return 0.0;
        const double width = t1 - t0;
        switch (type) {
            case Type::hann_pulse:
                return amplitude * 0.5 * (1.0 - std::cos(2.0 * M_PI * (t - t0) / width));
            case Type::sine_burst: {
                const double fade = std::min(rise, width / 2.0);
                double env = 1.0;
                if (t < t0 + fade) env = 0.5 * (1.0 - std::cos(M_PI * (t - t0) / fade));
                else if (t > t1 - fade) env = 0.5 * (1.0 - std::cos(M_PI * (t1 - t) / fade));
                return amplitude * env * std::sin(2.0 * M_PI * frequency * (t - t0));
            }
            case Type::ramp_hold: {
                const double up = std::min(rise, width);
                if (t < t0 + up) return amplitude * 0.5 * (1.0 - std::cos(M_PI * (t - t0) / up));
                if (fall > 0.0 && t > t1 - fall)
                    return amplitude * 0.5 * (1.0 - std::cos(M_PI * (t1 - t) / fall));
                return amplitude;
            }
        }
        return 0.0;
    }
};

/// Plateau speeds joined by raised-cosine ramps; the derivative is analytic.
class SpeedSchedule {
public:
    explicit SpeedSchedule(double initial_speed = 0.0) : v_init_(initial_speed) {}

    void ramp(double t_start, double ramp_duration, double v_target) {
        if (!(ramp_duration > 0.0)) throw config_error("speed ramp: duration must be positive");
        const double v_from = ramps_.empty() ? v_init_ : ramps_.back().v1;
        if (!ramps_.empty() && t_start < ramps_.back().t1 - 1e-12)
            throw config_error("speed ramp: overlapping ramps");
        ramps_.push_back({t_start, t_start + ramp_duration, v_from, v_target});
    }

    std::pair<double, double> at(double t) const {  // (v, dv/dt)
        double v = v_init_;
        for (const auto& r : ramps_) {
            if (t >= r.t1) {
                v = r.v1;
                continue;
            }
            if (t <= r.t0) break;
            const double s = (t - r.t0) / (r.t1 - r.t0);
            const double value = r.v0 + (r.v1 - r.v0) * 0.5 * (1.0 - std::cos(M_PI * s));
            const double slope = (r.v1 - r.v0) * M_PI / (2.0 * (r.t1 - r.t0)) * std::sin(M_PI * s);
            return {value, slope};
        }
        return {v, 0.0};
    }

    double minimum_speed() const {
        double v = v_init_;
        double lo = v_init_;
        for (const auto& r : ramps_) {
            lo = std::min(lo, std::min(r.v0, r.v1));
            v = r.v1;
        }
        return lo;
    }

private:
    struct Ramp {
        double t0, t1, v0, v1;
    };
    double v_init_;
    std::vector<Ramp> ramps_;
};

/// Piecewise-linear signal with slope lookup.
struct PiecewiseLinear {
    std::vector<std::pair<double, double>> knots;

    std::pair<double, double> at(double t) const {  // (value, slope)
        if (knots.empty()) return {0.0, 0.0};
        if (t <= knots.front().first) return {knots.front().second, 0.0};
        if (t >= knots.back().first) return {knots.back().second, 0.0};
        auto it = std::upper_bound(knots.begin(), knots.end(), t,
                                   [](double v, const auto& k) { return v < k.first; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double slope = (hi.second - lo.second) / (hi.first - lo.first);
        return {lo.second + slope * (t - lo.first), slope};
    }
};

}  // namespace profile

/// Analytic input source over [0, duration]: steer from summed segments (or
/// piecewise knots), speed from the schedule.
class ManeuverProfile {
public:
    InputSample at(double t) const {
        if (t < -1e-9 || t > duration_ + 1e-9)
            throw simulation_error("maneuver evaluated outside its duration", t);
        t = std::clamp(t, 0.0, duration_);
        InputSample u;
        u.t = t;
        if (piecewise_) {
            u.delta = steer_table_.at(t).first;
            const auto [v, vdot] = speed_table_.at(t);
            u.v_x2 = v;
            u.a_x2 = vdot;
        } else {
            double delta = 0.0;
            for (const auto& seg : steer_) delta += seg.eval(t);
            u.delta = delta;
            const auto [v, vdot] = speed_.at(t);
            u.v_x2 = v;
            u.a_x2 = vdot;
        }
        return u;
    }

    double duration() const { return duration_; }

private:
    friend class ManeuverBuilder;
    friend ManeuverProfile input_function(const ManeuverSpec&);

    double duration_ = 0.0;
    bool piecewise_ = false;
    std::vector<profile::SteerSegment> steer_;
    profile::SpeedSchedule speed_{0.0};
    profile::PiecewiseLinear steer_table_;
    profile::PiecewiseLinear speed_table_;
};

/// Sequential composition of maneuver elements along a time cursor.
class ManeuverBuilder {
public:
    explicit ManeuverBuilder(double initial_speed_mps) : speed_(initial_speed_mps) {
        if (initial_speed_mps < kMinLongitudinalSpeed)
            throw config_error("maneuver: initial speed below v_min");
    }

    ManeuverBuilder& straight(double duration) {
        cursor_ += duration;
        return *this;
    }

    ManeuverBuilder& slalom(double duration, double amplitude, double frequency,
                            double fade = 1.0) {
        steer_.push_back({profile::SteerSegment::Type::sine_burst, cursor_, cursor_ + duration,
                          amplitude, frequency, fade, 0.0});
        cursor_ += duration;
        return *this;
    }

    /// Two opposed raised-cosine pulses; net steer integral is exactly zero.
    ManeuverBuilder& double_lane_change(double pulse_width, double amplitude) {
        steer_.push_back({profile::SteerSegment::Type::hann_pulse, cursor_, cursor_ + pulse_width,
                          amplitude, 0.0, 0.0, 0.0});
        steer_.push_back({profile::SteerSegment::Type::hann_pulse, cursor_ + pulse_width,
                          cursor_ + 2.0 * pulse_width, -amplitude, 0.0, 0.0, 0.0});
        cursor_ += 2.0 * pulse_width;
        return *this;
    }

    /// Ramp to a hold steer angle; fall = 0 holds until the segment end.
    ManeuverBuilder& turn(double duration, double amplitude, double rise = 2.0, double fall = 2.0) {
        steer_.push_back({profile::SteerSegment::Type::ramp_hold, cursor_, cursor_ + duration,
                          amplitude, 0.0, rise, fall});
        cursor_ += duration;
        return *this;
    }

    ManeuverBuilder& speed_change(double ramp_duration, double target_mps) {
        if (target_mps < kMinLongitudinalSpeed)
            throw config_error("maneuver: target speed below v_min");
        speed_.ramp(cursor_, ramp_duration, target_mps);
        cursor_ += ramp_duration;
        return *this;
    }

    double cursor() const { return cursor_; }

    ManeuverProfile build(double total_duration = -1.0) const {
        ManeuverProfile p;
        p.duration_ = total_duration > 0.0 ? total_duration : cursor_;
        p.piecewise_ = false;
        p.steer_ = steer_;
        p.speed_ = speed_;
        return p;
    }

private:
    double cursor_ = 0.0;
    std::vector<profile::SteerSegment> steer_;
    profile::SpeedSchedule speed_;
};

/// Steer amplitudes of the validation-sequence preset, chosen so lateral
/// acceleration stays below ~4 m/s^2 at the section speeds.
namespace preset {
inline constexpr double kDlcSlowAmplitude = 0.28;    // 15 km/h lane changes
inline constexpr double kTurnRightAmplitude = -0.13; // 30 km/h right turn
inline constexpr double kTurnBackAmplitude = 0.178;  // 18 km/h 180-deg left turn
inline constexpr double kDlcFastAmplitude = 0.075;   // 40 km/h lane changes
}  // namespace preset

/// Analytic evaluator for a maneuver spec.
inline ManeuverProfile input_function(const ManeuverSpec& spec) {
    spec.validate();
    const double v = spec.speed_kmh / 3.6;
    switch (spec.kind) {
        case ManeuverKind::slalom: {
            ManeuverBuilder b(v);
            b.straight(spec.lead_in)
                .slalom(spec.duration - spec.lead_in, spec.steer_amplitude, spec.frequency,
                        spec.rise_time);
            return b.build(spec.duration);
        }
        case ManeuverKind::double_lane_change: {
            const double width = 0.5 / spec.frequency;
            if (spec.lead_in + 2.0 * width > spec.duration)
                throw config_error("double-lane-change does not fit into the duration");
            ManeuverBuilder b(v);
            b.straight(spec.lead_in).double_lane_change(width, spec.steer_amplitude);
            return b.build(spec.duration);
        }
        case ManeuverKind::constant_turn: {
            ManeuverBuilder b(v);
            b.straight(spec.lead_in)
                .turn(spec.duration - spec.lead_in, spec.steer_amplitude, spec.rise_time, 0.0);
            return b.build(spec.duration);
        }
        case ManeuverKind::validation_sequence: {
            // Four sections: slow lane changes, right turn at 30 km/h,
            // 180-degree turn-back at 18 km/h, fast lane changes at 40 km/h.
            ManeuverBuilder b(15.0 / 3.6);
            b.straight(3.0)
                .double_lane_change(4.0, preset::kDlcSlowAmplitude)
                .straight(3.0)
                .double_lane_change(4.0, preset::kDlcSlowAmplitude)
                .straight(3.0)
                .double_lane_change(4.0, preset::kDlcSlowAmplitude)
                .straight(7.0)  // section I ends at 40 s
                .speed_change(7.0, 30.0 / 3.6)
                .straight(3.0)
                .turn(12.0, preset::kTurnRightAmplitude, 2.0, 2.0)  // section II ends at 62 s
                .speed_change(5.0, 18.0 / 3.6)
                .straight(3.0)
                .turn(14.0, preset::kTurnBackAmplitude, 2.0, 2.0)
                .straight(8.0)  // section III ends at 92 s
                .speed_change(7.0, 40.0 / 3.6)
                .straight(2.0)
                .double_lane_change(3.0, preset::kDlcFastAmplitude)
                .double_lane_change(3.0, preset::kDlcFastAmplitude)
                .straight(2.0);
            return b.build(115.0);
        }
        case ManeuverKind::piecewise: {
            ManeuverProfile p;
            p.duration_ = spec.duration;
            p.piecewise_ = true;
            p.steer_table_.knots = spec.steer_knots;
            p.speed_table_.knots = spec.speed_knots;
            return p;
        }
    }
    throw config_error("unhandled maneuver kind");
}

/// The validation-sequence preset uses its 115 s timeline and fixed section
/// boundaries.
inline ManeuverSpec validation_sequence_spec() {
    ManeuverSpec spec;
    spec.kind = ManeuverKind::validation_sequence;
    spec.duration = 115.0;
    spec.speed_kmh = 15.0;
    return spec;
}

inline std::vector<SectionWindow> validation_sections() {
    return {{"I", 0.0, 40.0}, {"II", 40.0, 62.0}, {"III", 62.0, 92.0}, {"IV", 92.0, 115.0}};
}

/// Sampled input trajectory of a maneuver.
inline InputTrajectory generate(const ManeuverSpec& spec) {
    const ManeuverProfile profile = input_function(spec);
    const auto n = static_cast<std::size_t>(std::floor(spec.duration * spec.sample_rate + 1e-9)) + 1;
    std::vector<InputSample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        samples.push_back(profile.at(static_cast<double>(i) / spec.sample_rate));
    return InputTrajectory(std::move(samples));
}

/// Additive Gaussian measurement noise per output channel (SI units).
struct NoiseSpec {
    std::map<std::string, double> sigma;
    std::uint64_t seed = 0;

    static NoiseSpec none() { return {}; }

    /// Same sigma for all rate channels, the articulation angle, and all
    /// force channels respectively.
    static NoiseSpec typical(double rate_sigma, double angle_sigma, double force_sigma,
                             std::uint64_t seed) {
        NoiseSpec n;
        n.seed = seed;
        for (const auto& name : OutputVector::names()) {
            if (name.rfind("F_", 0) == 0) n.sigma[name] = force_sigma;
            else if (name == "theta") n.sigma[name] = angle_sigma;
            else n.sigma[name] = rate_sigma;
        }
        return n;
    }

    double sigma_for(const std::string& name) const {
        auto it = sigma.find(name);
        return it == sigma.end() ? 0.0 : it->second;
    }

    void validate() const {
        for (const auto& [name, s] : sigma) {
            if (s < 0.0 || !std::isfinite(s))
                throw config_error("noise sigma for '" + name + "' must be >= 0");
        }
    }
};

/// Simulates the truth parameters over the maneuver, samples inputs and the
/// twelve outputs at `sample_rate`, adds per-channel Gaussian noise, and
/// tags the dataset with its provenance.
template <InputSource Source>
MeasurementDataset synthesize_dataset(const VehicleParameters& truth, const Source& inputs,
                                      double duration, double sample_rate, const NoiseSpec& noise,
                                      double dt) {
    noise.validate();
    if (!(sample_rate > 0.0)) throw config_error("synthesize: sample_rate must be positive");
    StateVector x0;
    const SimulationResult sim = simulate(x0, inputs, 0.0, duration, truth, dt);

    const auto n = static_cast<std::size_t>(std::floor(duration * sample_rate + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = std::min(static_cast<double>(i) / sample_rate, sim.time.back());

    // Outputs on the sample grid (exact copies at aligned grid points).
    std::array<std::vector<double>, OutputVector::kSize> outputs;
    for (auto& ch : outputs) ch.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pos = grid[i] / dt;
        const auto k0 = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(k0);
        for (std::size_t l = 0; l < OutputVector::kSize; ++l) {
            if (frac < 1e-6 || k0 + 1 >= sim.size()) outputs[l][i] = sim.outputs[k0][l];
            else if (frac > 1.0 - 1e-6) outputs[l][i] = sim.outputs[k0 + 1][l];
            else
                outputs[l][i] =
                    sim.outputs[k0][l] + frac * (sim.outputs[k0 + 1][l] - sim.outputs[k0][l]);
        }
    }

    MeasurementDataset ds;
    {
        Channel ch;
        ch.t = grid;
        ch.values.resize(n);
        Channel v = ch, a = ch;
        for (std::size_t i = 0; i < n; ++i) {
            const InputSample u = inputs.at(grid[i]);
            ch.values[i] = u.delta;
            v.values[i] = u.v_x2;
            a.values[i] = u.a_x2;
        }
        ds.add("delta", std::move(ch));
        ds.add("v_x2", std::move(v));
        ds.add("a_x2", std::move(a));
    }

    std::mt19937_64 rng(noise.seed);
    const auto& names = OutputVector::names();
    for (std::size_t l = 0; l < names.size(); ++l) {
        Channel ch;
        ch.t = grid;
        ch.values = std::move(outputs[l]);
        const double s = noise.sigma_for(names[l]);
        if (s > 0.0) {
            std::normal_distribution<double> gauss(0.0, s);
            for (double& v : ch.values) v += gauss(rng);
        }
        ds.add(names[l], std::move(ch));
    }

    ds.metadata = nlohmann::json::object();
    ds.metadata["source"] = "synthetic";
    ds.metadata["seed"] = noise.seed;
    ds.metadata["dt"] = dt;
    ds.metadata["sample_rate"] = sample_rate;
    nlohmann::json sigma_json = nlohmann::json::object();
    for (const auto& [name, s] : noise.sigma) sigma_json[name] = s;
    ds.metadata["noise_sigma"] = sigma_json;
    nlohmann::json truth_json = nlohmann::json::object();
    const ParamSpace space = ParamSpace::default_space();
    const std::vector<double> p = space.extract(truth);
    for (std::size_t i = 0; i < space.size(); ++i) truth_json[space.names[i]] = p[i];
    ds.metadata["truth_identifiable"] = truth_json;
    return ds;
}

inline MeasurementDataset synthesize_dataset(const VehicleParameters& truth,
                                             const ManeuverSpec& spec, const NoiseSpec& noise,
                                             double dt) {
    const ManeuverProfile profile = input_function(spec);
    return synthesize_dataset(truth, profile, spec.duration, spec.sample_rate, noise, dt);
}

}  // namespace artic
