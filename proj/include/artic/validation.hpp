#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "artic/common.hpp"
#include "artic/identification.hpp"

namespace artic {

/// Root-mean-square error of two series on the same grid.
inline double rmse(std::span<const double> sim, std::span<const double> meas) {
    if (sim.size() != meas.size())
        throw invalid_parameter_error("rmse: series length mismatch");
    if (sim.empty()) throw invalid_parameter_error("rmse: empty series");
    double sum = 0.0;
    for (std::size_t i = 0; i < sim.size(); ++i) {
        const double e = sim[i] - meas[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(sim.size()));
}

/// Labeled time window for sectioned reporting.
struct SectionWindow {
    std::string label;
    double t_start = 0.0;
    double t_end = 0.0;
};

struct ChannelValidation {
    std::string name;
    double rmse_si = 0.0;
    double rmse_display = 0.0;
    std::string display_unit;
    std::vector<std::pair<std::string, double>> section_rmse_si;
    std::vector<std::pair<std::string, double>> section_rmse_display;
};

struct ValidationReport {
    std::vector<ChannelValidation> channels;
    double cost_j = 0.0;
    std::vector<std::string> excluded_channels;
    double grid_rate = 0.0;
    double dt = 0.0;
    // Plot-ready series on the analysis grid.
    std::vector<double> grid;
    std::vector<std::vector<double>> measured;
    std::vector<std::vector<double>> simulated;
};

namespace detail {

/// Display conversion per canonical output channel: rates in deg/s, the
/// articulation angle in deg, forces in kN.
inline std::pair<double, std::string> display_conversion(const std::string& name) {
    if (name.rfind("F_", 0) == 0) return {1e-3, "kN"};
    if (name == "theta") return {180.0 / M_PI, "deg"};
    return {180.0 / M_PI, "deg/s"};
}

}  // namespace detail

/// Simulates the dataset's inputs with the given parameters and reports
/// per-channel and per-section RMSE plus the identification cost J. The J
/// value is computed through the identical evaluator used by identify().
inline ValidationReport validate(const MeasurementDataset& dataset,
                                 const VehicleParameters& params,
                                 std::span<const SectionWindow> sections, double dt,
                                 double grid_rate = 100.0) {
    const CostEvaluator evaluator(dataset, params, ParamSpace{}, CostOptions{dt, grid_rate});
    const CostEvaluator::GriddedChannels series = evaluator.gridded_channels(params);

    ValidationReport report;
    report.dt = dt;
    report.grid_rate = grid_rate;
    report.excluded_channels = evaluator.excluded_channels();
    report.grid = series.grid;
    report.cost_j = evaluator.evaluate(params);

    for (const SectionWindow& w : sections) {
        if (!(w.t_end > w.t_start) || w.t_start < series.grid.front() - 1e-9 ||
            w.t_end > series.grid.back() + 1e-9)
            throw invalid_parameter_error("validate: section '" + w.label +
                                          "' outside the dataset span");
    }

    const auto& names = OutputVector::names();
    for (std::size_t l = 0; l < names.size(); ++l) {
        ChannelValidation cv;
        cv.name = names[l];
        const auto [factor, unit] = detail::display_conversion(names[l]);
        cv.display_unit = unit;
        cv.rmse_si = rmse(series.simulated[l], series.measured[l]);
        cv.rmse_display = cv.rmse_si * factor;
        for (const SectionWindow& w : sections) {
            std::vector<double> sim_w, meas_w;
            for (std::size_t i = 0; i < series.grid.size(); ++i) {
                if (series.grid[i] >= w.t_start - 1e-9 && series.grid[i] <= w.t_end + 1e-9) {
                    sim_w.push_back(series.simulated[l][i]);
                    meas_w.push_back(series.measured[l][i]);
                }
            }
            if (sim_w.empty())
                throw invalid_parameter_error("validate: section '" + w.label + "' contains no samples");
            const double value = rmse(sim_w, meas_w);
            cv.section_rmse_si.emplace_back(w.label, value);
            cv.section_rmse_display.emplace_back(w.label, value * factor);
        }
        report.channels.push_back(std::move(cv));
        report.measured.push_back(series.measured[l]);
        report.simulated.push_back(series.simulated[l]);
    }
    return report;
}

}  // namespace artic
