#pragma once

// =============================================================================
// sigflow - One-step methods for time-driven ODEs
// =============================================================================
//   ExplicitRkStepper     classical explicit RK on (x_E, x_I)
//   SignalFlowRkStepper   RK that skips latent (latency mode) or periodic
//                         (periodicity mode) internal components
//   TrapezoidalStepper    trapezoidal rule with Newton-Raphson; with a
//                         tracker it solves only the active block
// All steppers advance StepContext::x from t^m to t^m + h and account their
// work in StepContext::counters.
// =============================================================================

#include "sigflow/activity.hpp"
#include "sigflow/tableau.hpp"
#include "sigflow/tdode.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigflow {

struct EvalCounters {
    std::uint64_t steps = 0;
    std::uint64_t f_internal_component_evals = 0;
    std::uint64_t skipped_component_steps = 0;
    std::uint64_t newton_iterations = 0;
    std::uint64_t newton_nonmonotone = 0;  ///< iterations where the residual grew
    std::uint64_t lu_factorizations = 0;
    std::map<std::size_t, std::uint64_t> lu_dim_histogram;
    ModelTally model;

    [[nodiscard]] std::uint64_t device_evals() const { return model.device_evals; }
};

struct StepContext {
    std::uint64_t step_index = 0;  ///< m
    double t = 0.0;                ///< t^m
    double h = 0.0;
    std::vector<double> x;         ///< (x_E, x_I)
    EvalCounters counters;
};

/// A step could not be completed; carries the step index and time.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, std::uint64_t step, double t)
        : std::runtime_error(what), step_(step), t_(t) {}
    [[nodiscard]] std::uint64_t step() const { return step_; }
    [[nodiscard]] double time() const { return t_; }

private:
    std::uint64_t step_;
    double t_;
};

class NewtonError : public std::runtime_error {
public:
    NewtonError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    [[nodiscard]] double residual() const { return residual_; }

private:
    double residual_;
};

class FactorizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct NewtonConfig {
    double step_tolerance = 1e-8;      ///< on ||dz||_inf
    double residual_tolerance = 1e-8;  ///< on ||F(z)||_inf
    int max_iterations = 25;
};

/// Which classification depth licenses a skip.
enum class SkipOrder {
    Practical,  ///< latent / periodic of order >= 1
    Exact,      ///< order >= s; reproduces the non-skipping method bitwise
};

// =============================================================================
// Stepper interface
// =============================================================================

class Stepper {
public:
    virtual ~Stepper() = default;
    virtual void step(StepContext& ctx) = 0;
    [[nodiscard]] virtual std::string name() const = 0;
    /// Tracker driving the skips, if any.
    [[nodiscard]] virtual const ActivityTracker* tracker() const { return nullptr; }
};

class ExplicitRkStepper final : public Stepper {
public:
    ExplicitRkStepper(const TdOde& ode, ButcherTableau tableau);
    void step(StepContext& ctx) override;
    [[nodiscard]] std::string name() const override { return tableau_.name(); }

private:
    const TdOde& ode_;
    ButcherTableau tableau_;
    IndexList all_;
    std::vector<std::vector<double>> stages_;  // s x n_I
    std::vector<double> ke_, ke_now_, ke_next_, y_;
};

struct SignalFlowOptions {
    ActivityMode mode = ActivityMode::Latency;
    double epsilon = 1e-6;
    Index period_steps = 1;  ///< p, periodicity mode
    SkipOrder skip_order = SkipOrder::Practical;
};

class SignalFlowRkStepper final : public Stepper {
public:
    SignalFlowRkStepper(const TdOde& ode, const DependencyGraph& graph, ButcherTableau tableau,
                        SignalFlowOptions options);
    void step(StepContext& ctx) override;
    [[nodiscard]] std::string name() const override;
    [[nodiscard]] const ActivityTracker* tracker() const override { return &tracker_; }

private:
    const TdOde& ode_;
    const DependencyGraph& graph_;
    ButcherTableau tableau_;
    SignalFlowOptions opts_;
    ActivityTracker tracker_;
    bool retain_stages_;
    Index ring_;
    // stage ring: slot m % ring_ holds s x n_I stage values
    std::vector<std::vector<std::vector<double>>> stages_;
    std::vector<double> ke_now_, ke_prev_, ke_next_, ke_, y_, increments_, next_x_;
    std::vector<char> skip_;
    IndexList rows_;
    bool have_prev_ = false;
};

class TrapezoidalStepper final : public Stepper {
public:
    /// Plain trapezoidal rule.
    TrapezoidalStepper(const TdOde& ode, NewtonConfig newton);
    /// Signal-flow trapezoidal rule: latent components are frozen and the
    /// Newton system is assembled, factorized and solved on the active block.
    TrapezoidalStepper(const TdOde& ode, const DependencyGraph& graph, NewtonConfig newton,
                       double epsilon);

    void step(StepContext& ctx) override;
    [[nodiscard]] std::string name() const override { return tracker_ ? "sftr" : "tr"; }
    [[nodiscard]] const ActivityTracker* tracker() const override {
        return tracker_ ? &*tracker_ : nullptr;
    }

private:
    const TdOde& ode_;
    const DependencyGraph* graph_ = nullptr;
    NewtonConfig newton_;
    std::optional<ActivityTracker> tracker_;
    IndexList all_, rows_, stale_;
    std::vector<double> f_explicit_, f_next_, z_, xe_next_, ke_, increments_;
    std::vector<char> cache_valid_;
    bool have_prev_ = false;
};

struct NewtonResult {
    int iterations = 0;      ///< Newton updates performed
    double residual = 0.0;   ///< ||F||_inf at the accepted iterate
};

/// Solves the trapezoidal system restricted to `rows`:
///   F_i(z) = z_i - x_i - h/2 (f_explicit_i + f_I,i(x_e_next, z)) = 0,  i in rows,
/// with z_j = x_j frozen for j not in rows. On entry `z` must equal `x_i` (the
/// Newton start z_0 = x_I^m). On return z holds the solution and `f_at_z[rows]`
/// the right-hand side at it. Jacobian, LU and solve are |rows|-dimensional.
NewtonResult solve_trapezoidal_block(const TdOde& ode, std::span<const double> x_e_next,
                                     std::span<const double> x_i,
                                     std::span<const double> f_explicit,
                                     std::span<const Index> rows, double h,
                                     const NewtonConfig& config, EvalCounters& counters,
                                     std::span<double> z, std::span<double> f_at_z);

}  // namespace sigflow
