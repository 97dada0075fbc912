#include "sigflow/integrate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sigflow {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Rk: return "rk";
        case Method::SfRk: return "sfrk";
        case Method::SfpRk: return "sfprk";
        case Method::Tr: return "tr";
        case Method::SfTr: return "sftr";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "rk" || name == "rk4") return Method::Rk;
    if (name == "sfrk" || name == "sfrk4") return Method::SfRk;
    if (name == "sfprk" || name == "sfprk4") return Method::SfpRk;
    if (name == "tr") return Method::Tr;
    if (name == "sftr") return Method::SfTr;
    throw std::invalid_argument("unknown method: " + std::string(name));
}

SkipOrder parse_skip_order(std::string_view name) {
    if (name == "practical") return SkipOrder::Practical;
    if (name == "exact") return SkipOrder::Exact;
    throw std::invalid_argument("unknown skip order: " + std::string(name));
}

std::string_view to_string(SkipOrder order) {
    return order == SkipOrder::Exact ? "exact" : "practical";
}

std::uint64_t step_count(double t0, double t_end, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size must be positive");
    if (!std::isfinite(t0) || !std::isfinite(t_end) || t_end < t0) {
        throw std::invalid_argument("integration interval must satisfy t0 <= t_end");
    }
    const double span = t_end - t0;
    const double steps = std::round(span / h);
    if (steps > 1e15) throw std::invalid_argument("too many steps");
    if (std::abs(steps * h - span) > 1e-9 * std::max(1.0, span)) {
        throw std::invalid_argument("interval length is not a multiple of the step size");
    }
    return static_cast<std::uint64_t>(steps);
}

std::unique_ptr<Stepper> make_stepper(const TdOde& ode, const DependencyGraph& graph,
                                      const IntegrationConfig& config) {
    switch (config.method) {
        case Method::Rk:
            return std::make_unique<ExplicitRkStepper>(ode, tableaus::by_name(config.tableau));
        case Method::SfRk:
        case Method::SfpRk: {
            SignalFlowOptions opts{
                .mode = config.method == Method::SfpRk ? ActivityMode::Periodicity : ActivityMode::Latency,
                .epsilon = config.epsilon,
                .period_steps = config.period_steps,
                .skip_order = config.skip_order,
            };
            return std::make_unique<SignalFlowRkStepper>(ode, graph, tableaus::by_name(config.tableau), opts);
        }
        case Method::Tr:
            return std::make_unique<TrapezoidalStepper>(ode, config.newton);
        case Method::SfTr:
            return std::make_unique<TrapezoidalStepper>(ode, graph, config.newton, config.epsilon);
    }
    throw std::invalid_argument("unknown method");
}

RunResult integrate(const TdOde& ode, const DependencyGraph& graph, std::span<const double> x0,
                    const IntegrationConfig& config) {
    if (x0.size() != ode.size()) throw std::invalid_argument("initial state has wrong size");
    if (graph.n_vertices != ode.size()) throw std::invalid_argument("graph does not match ode");
    const std::uint64_t steps = step_count(config.t0, config.t_end, config.h);
    const Index every = std::max<Index>(config.record_every, 1);

    auto stepper = make_stepper(ode, graph, config);
    const ActivityTracker* tracker = stepper->tracker();
    const bool own_states = tracker != nullptr && config.trace_epsilon < 0.0;
    const double display_eps = config.trace_epsilon >= 0.0 ? config.trace_epsilon : config.epsilon;

    RunResult result;
    result.report.method = stepper->name();
    result.activity.mode = own_states ? tracker->mode() : ActivityMode::Latency;

    StepContext ctx;
    ctx.h = config.h;
    ctx.x.assign(x0.begin(), x0.end());
    ctx.t = config.t0;

    if (config.record_trajectory) {
        result.trajectory.t.push_back(ctx.t);
        result.trajectory.x.push_back(ctx.x);
    }

    const Index ne = ode.n_external();
    const Index n = ode.size();
    std::vector<double> previous(n), increments(n, std::numeric_limits<double>::infinity());
    std::array<std::uint64_t, 3> occupied{0, 0, 0};

    const auto started = std::chrono::steady_clock::now();
    for (std::uint64_t m = 0; m < steps; ++m) {
        ctx.step_index = m;
        ctx.t = config.t0 + static_cast<double>(m) * config.h;
        previous = ctx.x;
        try {
            stepper->step(ctx);
        } catch (const IntegrationError&) {
            throw;
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << stepper->name() << ": step " << m << " at t=" << ctx.t << " failed: " << e.what();
            throw IntegrationError(msg.str(), m, ctx.t);
        }

        if (tracker) {
            for (Index v = ne; v < n; ++v) ++occupied[static_cast<std::size_t>(tracker->states()[v].kind)];
        } else {
            occupied[0] += n - ne;
        }

        if (config.record_activity) {
            result.activity.t.push_back(ctx.t);
            if (own_states) {
                result.activity.rows.push_back(tracker->states());
            } else if (m == 0) {
                result.activity.rows.emplace_back(n);
            } else {
                result.activity.rows.push_back(classify_changes(graph, increments, display_eps, 1));
            }
            for (Index v = 0; v < n; ++v) increments[v] = std::abs(ctx.x[v] - previous[v]);
        }

        if (config.record_trajectory && ((m + 1) % every == 0 || m + 1 == steps)) {
            result.trajectory.t.push_back(config.t0 + static_cast<double>(m + 1) * config.h);
            result.trajectory.x.push_back(ctx.x);
        }
    }
    const auto finished = std::chrono::steady_clock::now();

    result.report.steps = steps;
    result.report.counters = std::move(ctx.counters);
    result.report.wall_seconds = std::chrono::duration<double>(finished - started).count();
    const double total = static_cast<double>(occupied[0] + occupied[1] + occupied[2]);
    if (total > 0) {
        for (std::size_t k = 0; k < 3; ++k) result.report.occupancy[k] = static_cast<double>(occupied[k]) / total;
    }
    result.report.final_state = std::move(ctx.x);
    return result;
}

DeviationStats compare_trajectories(const Trajectory& a, const Trajectory& b) {
    if (a.t.size() != b.t.size()) throw std::invalid_argument("trajectories have different lengths");
    DeviationStats stats;
    double sum = 0.0;
    for (std::size_t r = 0; r < a.t.size(); ++r) {
        if (a.t[r] != b.t[r]) throw std::invalid_argument("trajectories are on different time grids");
        if (a.x[r].size() != b.x[r].size()) throw std::invalid_argument("trajectory state sizes differ");
        double d = 0.0;
        for (std::size_t v = 0; v < a.x[r].size(); ++v) d = std::max(d, std::abs(a.x[r][v] - b.x[r][v]));
        stats.maximum = std::max(stats.maximum, d);
        if (r > 0) {
            sum += d;
            ++stats.steps;
        }
    }
    if (stats.steps > 0) stats.average = sum / static_cast<double>(stats.steps);
    return stats;
}

}  // namespace sigflow
