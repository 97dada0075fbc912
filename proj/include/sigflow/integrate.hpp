#pragma once

// =============================================================================
// sigflow - Fixed-step integration driver
// =============================================================================

#include "sigflow/activity.hpp"
#include "sigflow/integrators.hpp"
#include "sigflow/tdode.hpp"

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace sigflow {

enum class Method { Rk, SfRk, SfpRk, Tr, SfTr };

[[nodiscard]] std::string_view to_string(Method method);
/// Accepts "rk", "sfrk", "sfprk", "tr", "sftr", optionally followed by "4"
/// for the RK family (e.g. "sfrk4").
[[nodiscard]] Method parse_method(std::string_view name);
[[nodiscard]] SkipOrder parse_skip_order(std::string_view name);
[[nodiscard]] std::string_view to_string(SkipOrder order);

struct IntegrationConfig {
    Method method = Method::Rk;
    double t0 = 0.0;
    double t_end = 1.0;
    double h = 0.01;
    std::string tableau = "rk4";
    double epsilon = 1e-6;
    SkipOrder skip_order = SkipOrder::Practical;
    Index period_steps = 1;  ///< p for Method::SfpRk
    NewtonConfig newton;

    bool record_trajectory = true;
    Index record_every = 1;  ///< keep every k-th step (the final state is always kept)
    bool record_activity = false;
    /// Threshold for the exported activity trace. Negative: show the states
    /// the stepper itself used (plain methods then fall back to `epsilon`).
    double trace_epsilon = -1.0;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> x;  ///< full state (x_E, x_I) per row
};

struct ActivityTrace {
    ActivityMode mode = ActivityMode::Latency;
    std::vector<double> t;                          ///< t^m of the step the row classified
    std::vector<std::vector<ActivityState>> rows;   ///< one state per variable
};

struct RunReport {
    std::string method;
    std::uint64_t steps = 0;
    EvalCounters counters;
    double wall_seconds = 0.0;
    /// Fractions of internal variable-steps classified active, semi, inactive.
    std::array<double, 3> occupancy{1.0, 0.0, 0.0};
    std::vector<double> final_state;
};

struct RunResult {
    Trajectory trajectory;
    ActivityTrace activity;
    RunReport report;
};

/// Number of steps M with t0 + M h = t_end. Throws std::invalid_argument when
/// h <= 0, t_end < t0 or the interval is not an integer multiple of h.
[[nodiscard]] std::uint64_t step_count(double t0, double t_end, double h);

[[nodiscard]] std::unique_ptr<Stepper> make_stepper(const TdOde& ode, const DependencyGraph& graph,
                                                    const IntegrationConfig& config);

/// Marches from x0 at t0 to t_end with t^m = t0 + m h. Step failures are
/// rethrown as IntegrationError carrying the step index and time.
[[nodiscard]] RunResult integrate(const TdOde& ode, const DependencyGraph& graph,
                                  std::span<const double> x0, const IntegrationConfig& config);

struct DeviationStats {
    double average = 0.0;  ///< mean over steps of ||a - b||_inf
    double maximum = 0.0;
    std::uint64_t steps = 0;
};

/// Per-step max-norm deviation between two trajectories on the same grid.
/// The shared initial row is excluded from the average.
[[nodiscard]] DeviationStats compare_trajectories(const Trajectory& a, const Trajectory& b);

}  // namespace sigflow
