#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "artic/common.hpp"

namespace artic {

/// Global-best particle swarm settings. Defaults follow the constriction
/// constants; the iteration cap is the protocol's 150.
struct PsoConfig {
    int swarm_size = 50;
    int max_iterations = 150;
    double inertia = 0.729;
    double cognitive = 1.49445;
    double social = 1.49445;
    double velocity_clamp = 0.2;  ///< max |v| as a fraction of each range
    std::uint64_t seed = 0;

    void validate() const {
        if (swarm_size < 2) throw invalid_parameter_error("PsoConfig: swarm_size must be >= 2");
        if (max_iterations < 1) throw invalid_parameter_error("PsoConfig: max_iterations must be >= 1");
        if (!(inertia > 0.0) || !(cognitive > 0.0) || !(social > 0.0))
            throw invalid_parameter_error("PsoConfig: coefficients must be positive");
        if (!(velocity_clamp > 0.0) || velocity_clamp > 1.0)
            throw invalid_parameter_error("PsoConfig: velocity_clamp must be in (0, 1]");
    }
};

struct PsoResult {
    std::vector<double> best_position;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<double> history;  ///< swarm-best cost after init and each iteration
    std::size_t evaluations = 0;
};

namespace detail {

inline void check_bounds(std::span<const double> lower, std::span<const double> upper) {
    if (lower.size() != upper.size() || lower.empty())
        throw invalid_parameter_error("bounds: dimension mismatch or empty");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i]))
            throw invalid_parameter_error("bounds: need finite lower < upper per dimension");
    }
}

}  // namespace detail

/// Standard global-best PSO over box bounds. Deterministic for a fixed
/// seed regardless of `threads`: all random draws happen serially, only
/// the pure cost evaluations run on the worker pool.
template <typename CostFn>
PsoResult pso(const CostFn& cost, std::span<const double> lower, std::span<const double> upper,
              const PsoConfig& cfg, int threads = 1) {
    cfg.validate();
    detail::check_bounds(lower, upper);
    const std::size_t dim = lower.size();
    const auto swarm = static_cast<std::size_t>(cfg.swarm_size);

    std::vector<double> range(dim), v_max(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        range[j] = upper[j] - lower[j];
        v_max[j] = cfg.velocity_clamp * range[j];
    }

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::vector<double>> pos(swarm, std::vector<double>(dim));
    std::vector<std::vector<double>> vel(swarm, std::vector<double>(dim));
    std::vector<std::vector<double>> best_pos(swarm, std::vector<double>(dim));
    std::vector<double> best_cost(swarm, std::numeric_limits<double>::infinity());
    std::vector<double> current_cost(swarm);

    for (std::size_t i = 0; i < swarm; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            pos[i][j] = lower[j] + unit(rng) * range[j];
            vel[i][j] = (unit(rng) * 2.0 - 1.0) * v_max[j];
        }
    }

    PsoResult result;
    auto evaluate_swarm = [&]() {
        parallel_for(swarm, threads, [&](std::size_t i) {
            const double c = cost(std::span<const double>(pos[i]));
            current_cost[i] = std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
        });
        result.evaluations += swarm;
    };

    evaluate_swarm();
    bool any_finite = false;
    for (std::size_t i = 0; i < swarm; ++i) {
        any_finite = any_finite || std::isfinite(current_cost[i]);
        best_cost[i] = current_cost[i];
        best_pos[i] = pos[i];
        if (current_cost[i] < result.best_cost) {
            result.best_cost = current_cost[i];
            result.best_position = pos[i];
        }
    }
    if (!any_finite)
        throw error("pso: cost is non-finite for the entire initial swarm");
    result.history.push_back(result.best_cost);

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        for (std::size_t i = 0; i < swarm; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                const double r_cog = unit(rng);
                const double r_soc = unit(rng);
                double v = cfg.inertia * vel[i][j] +
                           cfg.cognitive * r_cog * (best_pos[i][j] - pos[i][j]) +
                           cfg.social * r_soc * (result.best_position[j] - pos[i][j]);
                v = std::clamp(v, -v_max[j], v_max[j]);
                vel[i][j] = v;
                pos[i][j] = std::clamp(pos[i][j] + v, lower[j], upper[j]);
            }
        }
        evaluate_swarm();
        for (std::size_t i = 0; i < swarm; ++i) {
            if (current_cost[i] < best_cost[i]) {
                best_cost[i] = current_cost[i];
                best_pos[i] = pos[i];
            }
            if (current_cost[i] < result.best_cost) {
                result.best_cost = current_cost[i];
                result.best_position = pos[i];
            }
        }
        result.history.push_back(result.best_cost);
    }
    return result;
}

/// Local refinement settings; the finite-difference step is relative per
/// parameter, floored by a small fraction of the bound range.
struct RefineOptions {
    int max_iterations = 60;
    double relative_step = 1e-4;
    double gradient_tolerance = 1e-10;
    int max_line_search_halvings = 30;
};

struct RefineResult {
    std::vector<double> position;
    double cost = std::numeric_limits<double>::infinity();
    bool no_progress = false;  ///< no step improved on the start point
    int iterations = 0;
    std::size_t evaluations = 0;
};

/// Bound-constrained quasi-Newton descent (projected BFGS with Armijo
/// backtracking, central-difference gradients). Never returns a point
/// worse than p0.
template <typename CostFn>
RefineResult refine(const CostFn& cost, std::span<const double> p0,
                    std::span<const double> lower, std::span<const double> upper,
                    const RefineOptions& opts = {}) {
    detail::check_bounds(lower, upper);
    if (p0.size() != lower.size())
        throw invalid_parameter_error("refine: start point dimension mismatch");
    const std::size_t dim = p0.size();

    RefineResult res;
    Eigen::VectorXd x(dim);
    for (std::size_t j = 0; j < dim; ++j) x(static_cast<int>(j)) = std::clamp(p0[j], lower[j], upper[j]);

    auto eval = [&](const Eigen::VectorXd& v) {
        std::vector<double> tmp(v.data(), v.data() + dim);
        ++res.evaluations;
        const double c = cost(std::span<const double>(tmp));
        return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
    };

    double f = eval(x);
    const double f0 = f;

    auto gradient = [&](const Eigen::VectorXd& at) {
        Eigen::VectorXd g(dim);
        Eigen::VectorXd probe = at;
        for (std::size_t j = 0; j < dim; ++j) {
            const auto jj = static_cast<int>(j);
            const double h = opts.relative_step *
                             std::max(std::abs(at(jj)), 1e-3 * (upper[j] - lower[j]));
            const double hi = std::min(at(jj) + h, upper[j]);
            const double lo = std::max(at(jj) - h, lower[j]);
            if (!(hi > lo)) {
                g(jj) = 0.0;
                continue;
            }
            probe(jj) = hi;
            const double f_hi = eval(probe);
            probe(jj) = lo;
            const double f_lo = eval(probe);
            probe(jj) = at(jj);
            g(jj) = (f_hi - f_lo) / (hi - lo);
        }
        return g;
    };

    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(static_cast<int>(dim), static_cast<int>(dim));
    Eigen::VectorXd g = gradient(x);

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance * (1.0 + std::abs(f))) break;

        Eigen::VectorXd dir = -(h_inv * g);
        if (dir.dot(g) >= 0.0) {  // curvature estimate unusable, reset
            h_inv.setIdentity();
            dir = -g;
        }

        bool accepted = false;
        Eigen::VectorXd x_new = x;
        double f_new = f;
        for (int pass = 0; pass < 2 && !accepted; ++pass) {
            if (pass == 1) dir = -g;
            double alpha = 1.0;
            for (int ls = 0; ls < opts.max_line_search_halvings; ++ls, alpha *= 0.5) {
                Eigen::VectorXd candidate = x + alpha * dir;
                for (std::size_t j = 0; j < dim; ++j) {
                    const auto jj = static_cast<int>(j);
                    candidate(jj) = std::clamp(candidate(jj), lower[j], upper[j]);
                }
                const Eigen::VectorXd step = candidate - x;
                if (step.lpNorm<Eigen::Infinity>() == 0.0) continue;
                const double fc = eval(candidate);
                if (fc <= f + 1e-4 * g.dot(step)) {
                    x_new = candidate;
                    f_new = fc;
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) break;

        const Eigen::VectorXd g_new = gradient(x_new);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            // Sherman-Morrison BFGS update of the inverse Hessian.
            const Eigen::VectorXd hy = h_inv * y;
            const double yhy = y.dot(hy);
            h_inv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
                     (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        x = x_new;
        f = f_new;
        g = g_new;
        res.iterations = iter + 1;
    }

    res.position.assign(x.data(), x.data() + dim);
    res.cost = f;
    res.no_progress = !(f < f0);
    if (res.no_progress) {
        // Line search never improved on the start point: hand it back as-is.
        res.position.assign(p0.begin(), p0.end());
        res.cost = f0;
    }
    return res;
}

}  // namespace artic
