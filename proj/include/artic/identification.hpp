#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "artic/common.hpp"
#include "artic/dataset.hpp"
#include "artic/dynamics.hpp"
#include "artic/pso.hpp"
#include "artic/types.hpp"

namespace artic {

/// Resolves an identifiable-parameter name to its storage inside
/// VehicleParameters. Names follow the JSON parameter file layout.
inline double* identifiable_field(VehicleParameters& p, const std::string& name) {
    if (name == "mu") return &p.mu;
    if (name == "k") return &p.k;
    if (name == "d") return &p.d;
    if (name == "h_WK") return &p.h_WK;
    if (name == "h_W2") return &p.h_W2;
    auto set_field = [](TireSet& set, const std::string& field) -> double* {
        if (field == "C") return &set.C;
        if (field == "c1") return &set.c1;
        if (field == "c2") return &set.c2;
        if (field == "relaxation_length") return &set.relaxation_length;
        return nullptr;
    };
    const auto dot = name.find('.');
    if (dot != std::string::npos) {
        const std::string group = name.substr(0, dot);
        const std::string field = name.substr(dot + 1);
        if (group == "tire_front") return set_field(p.tire_front, field);
        if (group == "tire_rear") return set_field(p.tire_rear, field);
        if (group == "tire_trailer") return set_field(p.tire_trailer, field);
    }
    return nullptr;
}

/// Ordered identifiable-parameter names with box bounds (SI units).
struct ParamSpace {
    std::vector<std::string> names;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t size() const { return names.size(); }

    void validate() const {
        if (names.size() != lower.size() || names.size() != upper.size())
            throw invalid_parameter_error("ParamSpace: names/bounds length mismatch");
        VehicleParameters probe;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (identifiable_field(probe, names[i]) == nullptr)
                throw invalid_parameter_error("ParamSpace: unknown parameter '" + names[i] + "'");
            if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i]))
                throw invalid_parameter_error("ParamSpace: bad bounds for '" + names[i] + "'");
            for (std::size_t j = 0; j < i; ++j) {
                if (names[j] == names[i])
                    throw invalid_parameter_error("ParamSpace: duplicate parameter '" + names[i] + "'");
            }
        }
    }

    /// The full identifiable tuple: friction scaling, the three tire sets,
    /// the suspension pair, and the two roll-geometry heights (17 entries).
    static ParamSpace default_space() {
        ParamSpace s;
        auto add = [&s](const std::string& name, double lo, double hi) {
            s.names.push_back(name);
            s.lower.push_back(lo);
            s.upper.push_back(hi);
        };
        add("mu", 0.3, 1.2);
        add("tire_front.C", 1.0, 2.5);
        add("tire_rear.C", 1.0, 2.5);
        add("tire_trailer.C", 1.0, 2.5);
        add("tire_front.c1", 2.0e5, 2.0e6);
        add("tire_rear.c1", 2.0e5, 3.0e6);
        add("tire_trailer.c1", 1.0e5, 1.5e6);
        add("tire_front.c2", 2.0e4, 1.5e5);
        add("tire_rear.c2", 3.0e4, 2.5e5);
        add("tire_trailer.c2", 1.0e4, 1.0e5);
        add("tire_front.relaxation_length", 0.2, 1.5);
        add("tire_rear.relaxation_length", 0.2, 1.5);
        add("tire_trailer.relaxation_length", 0.2, 1.5);
        add("k", 1.0e5, 1.0e7);
        add("d", 5.0e3, 2.0e5);
        add("h_WK", 0.1, 1.2);
        add("h_W2", 0.4, 2.0);
        return s;
    }

    VehicleParameters apply(VehicleParameters base, std::span<const double> p) const {
        if (p.size() != names.size())
            throw invalid_parameter_error("ParamSpace: candidate dimension mismatch");
        for (std::size_t i = 0; i < names.size(); ++i) *identifiable_field(base, names[i]) = p[i];
        return base;
    }

    std::vector<double> extract(const VehicleParameters& params) const {
        VehicleParameters copy = params;
        std::vector<double> p(names.size());
        for (std::size_t i = 0; i < names.size(); ++i) p[i] = *identifiable_field(copy, names[i]);
        return p;
    }

    bool contains(std::span<const double> p) const {
        if (p.size() != names.size()) return false;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] < lower[i] || p[i] > upper[i]) return false;
        return true;
    }
};

/// Mean of a series.
inline double channel_mean(std::span<const double> values) {
    if (values.empty()) throw invalid_parameter_error("channel_mean: empty series");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

/// One channel's normalized squared error: ||sim - meas||^2 over
/// ||meas - mean(meas)||^2. The constant-mean predictor scores exactly 1.
inline double channel_error_ratio(std::span<const double> sim, std::span<const double> meas) {
    if (sim.size() != meas.size() || sim.empty())
        throw invalid_parameter_error("channel_error_ratio: series length mismatch");
    const double mean = channel_mean(meas);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < sim.size(); ++i) {
        const double e = sim[i] - meas[i];
        num += e * e;
        const double d = mean - meas[i];
        den += d * d;
    }
    if (den == 0.0) throw invalid_parameter_error("channel_error_ratio: zero-variance channel");
    return num / den;
}

struct CostOptions {
    double dt = 1e-3;          ///< integration step for candidate simulation [s]
    double grid_rate = 100.0;  ///< common analysis grid for multi-rate data [Hz]
    double penalty = kFailedSimulationCost;
};

/// Normalized output-error cost over a measurement dataset. Construction
/// resamples multi-rate data onto a common grid and freezes the per-channel
/// normalization; evaluation is pure and safe to call concurrently.
class CostEvaluator {
public:
    CostEvaluator(const MeasurementDataset& dataset, VehicleParameters fixed, ParamSpace space,
                  CostOptions opts = {})
        : space_(std::move(space)), fixed_(fixed), opts_(opts) {
        space_.validate();
        dataset.require_identification_channels();
        const MeasurementDataset grid_ds =
            dataset.uniform_grid() ? dataset : dataset.resampled(opts_.grid_rate);
        inputs_ = grid_ds.input_trajectory();
        grid_ = grid_ds.channel("delta").t;

        const auto& names = OutputVector::names();
        for (std::size_t l = 0; l < names.size(); ++l) {
            const Channel& ch = grid_ds.channel(names[l]);
            if (ch.size() != grid_.size())
                throw invalid_parameter_error("cost: channel '" + names[l] + "' grid mismatch");
            measured_[l] = ch.values;
            mean_[l] = channel_mean(measured_[l]);
            double den = 0.0;
            for (double v : measured_[l]) {
                const double d = mean_[l] - v;
                den += d * d;
            }
            denom_[l] = den;
            const double scale = 1.0 + mean_[l] * mean_[l];
            if (den <= 1e-20 * static_cast<double>(measured_[l].size()) * scale) {
                excluded_.push_back(names[l]);
            } else {
                active_.push_back(l);
            }
        }
        if (active_.empty()) throw invalid_parameter_error("cost: no channel carries signal");
    }

    const ParamSpace& space() const { return space_; }
    const VehicleParameters& fixed() const { return fixed_; }
    const CostOptions& options() const { return opts_; }
    const std::vector<double>& grid() const { return grid_; }

    /// Channels excluded for zero variance (warned once, at construction).
    const std::vector<std::string>& excluded_channels() const { return excluded_; }

    double operator()(std::span<const double> p) const {
        return evaluate(space_.apply(fixed_, p));
    }

    /// J for a full parameter set; failures map to the penalty value.
    double evaluate(const VehicleParameters& candidate) const {
        std::array<std::vector<double>, OutputVector::kSize> sim;
        try {
            simulate_outputs(candidate, sim);
        } catch (const error&) {
            return opts_.penalty;
        }
        double j = 0.0;
        for (std::size_t l : active_) {
            double num = 0.0;
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                const double e = sim[l][i] - measured_[l][i];
                num += e * e;
            }
            j += num / denom_[l];
        }
        return std::isfinite(j) ? j : opts_.penalty;
    }

    struct Breakdown {
        double total = 0.0;
        std::vector<std::pair<std::string, double>> per_channel;
        std::vector<std::string> excluded;
    };

    Breakdown breakdown(const VehicleParameters& candidate) const {
        std::array<std::vector<double>, OutputVector::kSize> sim;
        simulate_outputs(candidate, sim);
        Breakdown b;
        b.excluded = excluded_;
        for (std::size_t l : active_) {
            double num = 0.0;
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                const double e = sim[l][i] - measured_[l][i];
                num += e * e;
            }
            b.per_channel.emplace_back(OutputVector::names()[l], num / denom_[l]);
            b.total += num / denom_[l];
        }
        return b;
    }

    /// Measured and simulated series on the analysis grid (all 12 channels;
    /// simulation failures propagate).
    struct GriddedChannels {
        std::vector<double> grid;
        std::array<std::vector<double>, OutputVector::kSize> measured;
        std::array<std::vector<double>, OutputVector::kSize> simulated;
    };

    GriddedChannels gridded_channels(const VehicleParameters& candidate) const {
        GriddedChannels g;
        g.grid = grid_;
        g.measured = measured_;
        simulate_outputs(candidate, g.simulated);
        return g;
    }

private:
    void simulate_outputs(const VehicleParameters& candidate,
                          std::array<std::vector<double>, OutputVector::kSize>& sim) const {
        candidate.validate();
        StateVector x0;  // lateral rest; datasets open with straight driving
        const SimulationResult res = simulate(x0, inputs_, fixed_params_horizon_start(),
                                              fixed_params_horizon_end(), candidate, opts_.dt);
        const double t0 = res.time.front();
        const double sim_end = res.time.back();
        const double dt = opts_.dt;
        for (std::size_t l = 0; l < OutputVector::kSize; ++l) {
            sim[l].resize(grid_.size());
        }
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double t = std::min(grid_[i], sim_end);
            const double pos = (t - t0) / dt;
            const auto k0 = static_cast<std::size_t>(std::floor(pos));
            const double frac = pos - static_cast<double>(k0);
            if (frac < 1e-6 || k0 + 1 >= res.size()) {
                const std::size_t k = (frac > 0.5 && k0 + 1 < res.size()) ? k0 + 1 : k0;
                for (std::size_t l = 0; l < OutputVector::kSize; ++l)
                    sim[l][i] = res.outputs[k][l];
            } else if (frac > 1.0 - 1e-6) {
                for (std::size_t l = 0; l < OutputVector::kSize; ++l)
                    sim[l][i] = res.outputs[k0 + 1][l];
            } else {
                for (std::size_t l = 0; l < OutputVector::kSize; ++l)
                    sim[l][i] = res.outputs[k0][l] +
                                frac * (res.outputs[k0 + 1][l] - res.outputs[k0][l]);
            }
        }
    }

    double fixed_params_horizon_start() const { return grid_.front(); }
    double fixed_params_horizon_end() const { return grid_.back(); }

    ParamSpace space_;
    VehicleParameters fixed_;
    CostOptions opts_;
    InputTrajectory inputs_;
    std::vector<double> grid_;
    std::array<std::vector<double>, OutputVector::kSize> measured_;
    std::array<double, OutputVector::kSize> mean_{};
    std::array<double, OutputVector::kSize> denom_{};
    std::vector<std::size_t> active_;
    std::vector<std::string> excluded_;
};

struct IdentifyOptions {
    int restarts = 60;
    std::uint64_t master_seed = 0;
    int threads = 1;
    bool run_refine = true;
    RefineOptions refine;
};

struct RestartRecord {
    std::uint64_t seed = 0;
    double pso_cost = std::numeric_limits<double>::infinity();
    double refined_cost = std::numeric_limits<double>::infinity();
    std::vector<double> history;
    bool refine_no_progress = false;
    bool failed = false;
    std::size_t evaluations = 0;
};

struct IdentificationResult {
    std::vector<double> best_params;
    double best_cost = std::numeric_limits<double>::infinity();
    int best_restart = -1;
    std::vector<double> restart_costs;
    std::vector<double> history;            ///< swarm-best history of the winning restart
    double refinement_improvement = 0.0;    ///< (J_pso - J_refined)/J_pso, winning restart
    std::vector<RestartRecord> restarts;
    std::size_t evaluations = 0;
};

/// Multi-restart PSO + local refinement over any cost functor. Restarts run
/// on the worker pool with per-restart seeds split off the master seed; the
/// reduction is ordered, so results are identical for any thread count.
template <typename CostFn>
IdentificationResult identify_costfn(const CostFn& cost, const ParamSpace& space,
                                     const PsoConfig& config, const IdentifyOptions& opts) {
    space.validate();
    config.validate();
    if (opts.restarts < 1) throw invalid_parameter_error("identify: restarts must be >= 1");

    IdentificationResult result;
    result.restarts.resize(static_cast<std::size_t>(opts.restarts));
    std::vector<std::vector<double>> positions(static_cast<std::size_t>(opts.restarts));

    parallel_for(static_cast<std::size_t>(opts.restarts), opts.threads, [&](std::size_t r) {
        RestartRecord& rec = result.restarts[r];
        rec.seed = split_seed(opts.master_seed, r);
        try {
            PsoConfig cfg = config;
            cfg.seed = rec.seed;
            const PsoResult swarm = pso(cost, space.lower, space.upper, cfg);
            rec.pso_cost = swarm.best_cost;
            rec.history = swarm.history;
            rec.evaluations = swarm.evaluations;
            if (opts.run_refine) {
                const RefineResult fine =
                    refine(cost, swarm.best_position, space.lower, space.upper, opts.refine);
                rec.refined_cost = fine.cost;
                rec.refine_no_progress = fine.no_progress;
                rec.evaluations += fine.evaluations;
                positions[r] = fine.position;
            } else {
                rec.refined_cost = swarm.best_cost;
                positions[r] = swarm.best_position;
            }
        } catch (const error&) {
            rec.failed = true;
        }
    });

    bool any_ok = false;
    for (int r = 0; r < opts.restarts; ++r) {
        const RestartRecord& rec = result.restarts[static_cast<std::size_t>(r)];
        result.restart_costs.push_back(rec.refined_cost);
        result.evaluations += rec.evaluations;
        if (rec.failed) continue;
        any_ok = true;
        if (rec.refined_cost < result.best_cost) {
            result.best_cost = rec.refined_cost;
            result.best_restart = r;
        }
    }
    if (!any_ok) throw error("identify: every restart failed");

    const auto best = static_cast<std::size_t>(result.best_restart);
    result.best_params = positions[best];
    result.history = result.restarts[best].history;
    const double pso_cost = result.restarts[best].pso_cost;
    if (pso_cost > 0.0 && std::isfinite(pso_cost))
        result.refinement_improvement = (pso_cost - result.best_cost) / pso_cost;
    return result;
}

/// Identification over a measurement dataset: builds the cost evaluator and
/// runs the restart protocol.
inline IdentificationResult identify(const MeasurementDataset& dataset,
                                     const VehicleParameters& fixed, const ParamSpace& space,
                                     const PsoConfig& config, int restarts,
                                     const CostOptions& cost_opts = {},
                                     const IdentifyOptions& extra = {}) {
    CostEvaluator cost(dataset, fixed, space, cost_opts);
    IdentifyOptions opts = extra;
    opts.restarts = restarts;
    return identify_costfn(cost, space, config, opts);
}

}  // namespace artic
