#include "sigflow/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sigflow {

namespace {

using StageBlock = std::vector<std::vector<double>>;  // s x n_I

// Both the plain and the signal-flow stepper go through these two helpers so
// that their arithmetic is identical operation for operation.
inline double stage_argument(double x, double h, const ButcherTableau& tab, int q,
                             const StageBlock& k, Index i) {
    double acc = 0.0;
    for (int r = 0; r < q; ++r) acc += tab.a(q, r) * k[static_cast<std::size_t>(r)][i];
    return x + h * acc;
}

inline double combine_stages(double x, double h, const ButcherTableau& tab, const StageBlock& k,
                             Index i) {
    double acc = 0.0;
    for (int q = 0; q < tab.stages(); ++q) acc += tab.b(q) * k[static_cast<std::size_t>(q)][i];
    return x + h * acc;
}

void check_finite(std::span<const double> values, std::span<const Index> rows, const char* what) {
    for (Index i : rows) {
        if (!std::isfinite(values[i])) {
            throw NumericError(std::string(what) + ": non-finite value in component " + std::to_string(i));
        }
    }
}

IndexList iota_list(Index n) {
    IndexList l(n);
    std::iota(l.begin(), l.end(), Index{0});
    return l;
}

}  // namespace

// =============================================================================
// ExplicitRkStepper
// =============================================================================

ExplicitRkStepper::ExplicitRkStepper(const TdOde& ode, ButcherTableau tableau)
    : ode_(ode), tableau_(std::move(tableau)), all_(iota_list(ode.n_internal())) {
    const auto s = static_cast<std::size_t>(tableau_.stages());
    stages_.assign(s, std::vector<double>(ode.n_internal(), 0.0));
    ke_.resize(ode.n_external());
    ke_now_.resize(ode.n_external());
    ke_next_.resize(ode.n_external());
    y_.resize(ode.n_internal());
}

void ExplicitRkStepper::step(StepContext& ctx) {
    const Index ne = ode_.n_external();
    const Index ni = ode_.n_internal();
    std::span<double> x(ctx.x);
    auto xe = x.first(ne);
    auto xi = x.subspan(ne);

    for (int q = 0; q < tableau_.stages(); ++q) {
        auto& kq = stages_[static_cast<std::size_t>(q)];
        ode_.eval_external(ctx.t + tableau_.c(q) * ctx.h, ke_);
        for (Index i = 0; i < ni; ++i) y_[i] = stage_argument(xi[i], ctx.h, tableau_, q, stages_, i);
        ode_.eval_internal(ke_, y_, kq, all_, ctx.counters.model);
        ctx.counters.f_internal_component_evals += ni;
        check_finite(kq, all_, "rk stage");
    }
    for (Index i = 0; i < ni; ++i) xi[i] = combine_stages(xi[i], ctx.h, tableau_, stages_, i);

    ode_.eval_external(ctx.t, ke_now_);
    ode_.eval_external(ctx.t + ctx.h, ke_next_);
    for (Index e = 0; e < ne; ++e) xe[e] += ke_next_[e] - ke_now_[e];
    ++ctx.counters.steps;
}

// =============================================================================
// SignalFlowRkStepper
// =============================================================================

SignalFlowRkStepper::SignalFlowRkStepper(const TdOde& ode, const DependencyGraph& graph,
                                         ButcherTableau tableau, SignalFlowOptions options)
    : ode_(ode),
      graph_(graph),
      tableau_(std::move(tableau)),
      opts_(options),
      tracker_(graph, TrackerOptions{
                          .mode = options.mode,
                          .epsilon = options.epsilon,
                          .period_steps = options.mode == ActivityMode::Periodicity ? options.period_steps : 1,
                          .max_order = options.skip_order == SkipOrder::Exact ? tableau_.stages() : 1,
                      }),
      retain_stages_(options.mode == ActivityMode::Periodicity || options.skip_order == SkipOrder::Exact),
      ring_(options.mode == ActivityMode::Periodicity ? options.period_steps : 1) {
    if (graph.n_vertices != ode.size()) throw std::invalid_argument("sfrk: graph does not match ode");
    const Index ne = ode.n_external();
    const Index ni = ode.n_internal();
    const auto s = static_cast<std::size_t>(tableau_.stages());
    stages_.assign(ring_, StageBlock(s, std::vector<double>(ni, 0.0)));
    ke_now_.resize(ne);
    ke_next_.resize(ne);
    ke_.resize(ne);
    ke_prev_.assign(ne * s, 0.0);
    y_.resize(ni);
    increments_.assign(ode.size(), 0.0);
    next_x_.resize(ode.size());
    skip_.assign(ni, 0);
    rows_.reserve(ni);
}

std::string SignalFlowRkStepper::name() const {
    return (opts_.mode == ActivityMode::Periodicity ? "sfp" : "sf") + tableau_.name();
}

void SignalFlowRkStepper::step(StepContext& ctx) {
    const Index ne = ode_.n_external();
    const Index ni = ode_.n_internal();
    const int s = tableau_.stages();
    const bool exact = opts_.skip_order == SkipOrder::Exact;
    std::span<double> x(ctx.x);
    auto xe = x.first(ne);
    auto xi = x.subspan(ne);

    // External samples f_E(t^m + c_q h), stored variable-major.
    std::vector<double> samples;
    if (exact) {
        samples.resize(ne * static_cast<std::size_t>(s));
        for (int q = 0; q < s; ++q) {
            ode_.eval_external(ctx.t + tableau_.c(q) * ctx.h, ke_);
            for (Index e = 0; e < ne; ++e) samples[e * static_cast<std::size_t>(s) + static_cast<std::size_t>(q)] = ke_[e];
        }
    }

    if (opts_.mode == ActivityMode::Latency) {
        if (have_prev_) {
            if (exact) {
                for (Index e = 0; e < ne; ++e) {
                    double d = 0.0;
                    for (int q = 0; q < s; ++q) {
                        const Index k = e * static_cast<std::size_t>(s) + static_cast<std::size_t>(q);
                        d = std::max(d, std::abs(samples[k] - ke_prev_[k]));
                    }
                    increments_[e] = d;
                }
            }
            tracker_.record_increments(increments_);
        }
        classify_latency(tracker_, graph_);
        if (exact) ke_prev_ = samples;
    } else {
        tracker_.observe_state(x, samples);
        classify_periodicity(tracker_, graph_);
    }

    rows_.clear();
    Index skipped = 0;
    for (Index i = 0; i < ni; ++i) {
        skip_[i] = tracker_.skips(ne + i) ? 1 : 0;
        if (skip_[i]) {
            ++skipped;
        } else {
            rows_.push_back(i);
        }
    }

    auto& k = stages_[ctx.step_index % ring_];
    for (int q = 0; q < s; ++q) {
        ode_.eval_external(ctx.t + tableau_.c(q) * ctx.h, ke_);
        for (Index i = 0; i < ni; ++i) {
            y_[i] = (skip_[i] && !retain_stages_) ? xi[i] : stage_argument(xi[i], ctx.h, tableau_, q, k, i);
        }
        if (!rows_.empty()) {
            auto& kq = k[static_cast<std::size_t>(q)];
            ode_.eval_internal(ke_, y_, kq, rows_, ctx.counters.model);
            ctx.counters.f_internal_component_evals += rows_.size();
            check_finite(kq, rows_, "sfrk stage");
        }
    }

    std::span<const double> period_ago;
    if (opts_.mode == ActivityMode::Periodicity && skipped > 0) period_ago = tracker_.state_from_period_ago();
    for (Index i = 0; i < ni; ++i) {
        double next;
        if (!skip_[i]) {
            next = combine_stages(xi[i], ctx.h, tableau_, k, i);
        } else if (opts_.mode == ActivityMode::Periodicity) {
            next = period_ago[ne + i];
        } else {
            next = xi[i];
        }
        next_x_[ne + i] = next;
    }
    ode_.eval_external(ctx.t, ke_now_);
    ode_.eval_external(ctx.t + ctx.h, ke_next_);
    for (Index e = 0; e < ne; ++e) next_x_[e] = xe[e] + (ke_next_[e] - ke_now_[e]);

    for (Index v = 0; v < x.size(); ++v) {
        increments_[v] = std::abs(next_x_[v] - x[v]);
        x[v] = next_x_[v];
    }
    have_prev_ = true;
    ctx.counters.skipped_component_steps += skipped;
    ++ctx.counters.steps;
}

// =============================================================================
// Trapezoidal rule
// =============================================================================

NewtonResult solve_trapezoidal_block(const TdOde& ode, std::span<const double> x_e_next,
                                     std::span<const double> x_i,
                                     std::span<const double> f_explicit,
                                     std::span<const Index> rows, double h,
                                     const NewtonConfig& config, EvalCounters& counters,
                                     std::span<double> z, std::span<double> f_at_z) {
    const auto k = static_cast<Eigen::Index>(rows.size());
    if (k == 0) return {};

    Eigen::MatrixXd jac;
    Eigen::MatrixXd system(k, k);
    Eigen::VectorXd residual(k);
    double prev_res = std::numeric_limits<double>::infinity();
    double last_step = std::numeric_limits<double>::infinity();

    for (int it = 0;; ++it) {
        ode.eval_internal_jacobian(x_e_next, z, f_at_z, jac, rows, counters.model);
        counters.f_internal_component_evals += rows.size();
        check_finite(f_at_z, rows, "trapezoidal residual");

        double res = 0.0;
        for (Eigen::Index a = 0; a < k; ++a) {
            const Index i = rows[static_cast<std::size_t>(a)];
            residual(a) = z[i] - x_i[i] - 0.5 * h * (f_explicit[i] + f_at_z[i]);
            res = std::max(res, std::abs(residual(a)));
        }
        if (it > 0 && res > prev_res) ++counters.newton_nonmonotone;
        if (res <= config.residual_tolerance || (it > 0 && last_step <= config.step_tolerance)) {
            return {it, res};
        }
        if (it >= config.max_iterations) {
            throw NewtonError("newton: no convergence after " + std::to_string(it) +
                                  " iterations, residual " + std::to_string(res),
                              res);
        }

        system = -0.5 * h * jac;
        system.diagonal().array() += 1.0;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
        ++counters.lu_factorizations;
        ++counters.lu_dim_histogram[rows.size()];
        const auto diag = lu.matrixLU().diagonal();
        for (Eigen::Index a = 0; a < k; ++a) {
            if (diag(a) == 0.0 || !std::isfinite(diag(a))) {
                throw FactorizationError("newton: singular iteration matrix of dimension " +
                                         std::to_string(k));
            }
        }
        const Eigen::VectorXd dz = lu.solve(-residual);
        last_step = 0.0;
        for (Eigen::Index a = 0; a < k; ++a) {
            z[rows[static_cast<std::size_t>(a)]] += dz(a);
            last_step = std::max(last_step, std::abs(dz(a)));
        }
        ++counters.newton_iterations;
        prev_res = res;
    }
}

TrapezoidalStepper::TrapezoidalStepper(const TdOde& ode, NewtonConfig newton)
    : ode_(ode), newton_(newton), all_(iota_list(ode.n_internal())) {
    if (!ode.has_jacobian()) throw std::invalid_argument("trapezoidal rule needs a model Jacobian");
    const Index ni = ode.n_internal();
    f_explicit_.assign(ni, 0.0);
    f_next_.assign(ni, 0.0);
    z_.resize(ni);
    xe_next_.resize(ode.n_external());
    ke_.resize(ode.n_external());
    increments_.assign(ode.size(), 0.0);
    cache_valid_.assign(ni, 0);
}

TrapezoidalStepper::TrapezoidalStepper(const TdOde& ode, const DependencyGraph& graph,
                                       NewtonConfig newton, double epsilon)
    : TrapezoidalStepper(ode, newton) {
    if (graph.n_vertices != ode.size()) throw std::invalid_argument("sftr: graph does not match ode");
    graph_ = &graph;
    tracker_.emplace(graph, TrackerOptions{.mode = ActivityMode::Latency, .epsilon = epsilon});
}

void TrapezoidalStepper::step(StepContext& ctx) {
    const Index ne = ode_.n_external();
    const Index ni = ode_.n_internal();
    std::span<double> x(ctx.x);
    auto xe = x.first(ne);
    auto xi = x.subspan(ne);

    ode_.eval_external(ctx.t, ke_);
    ode_.eval_external(ctx.t + ctx.h, xe_next_);
    for (Index e = 0; e < ne; ++e) xe_next_[e] = xe[e] + (xe_next_[e] - ke_[e]);

    const std::span<const Index> rows = [&]() -> std::span<const Index> {
        if (!tracker_) return all_;
        if (have_prev_) tracker_->record_increments(increments_);
        classify_latency(*tracker_, *graph_);
        rows_.clear();
        for (Index i = 0; i < ni; ++i) {
            if (!tracker_->skips(ne + i)) rows_.push_back(i);
        }
        ctx.counters.skipped_component_steps += ni - rows_.size();
        return rows_;
    }();

    // f_I(x_E^m, x_I^m) is reused from the last Newton evaluation where that
    // evaluation happened at the accepted state.
    stale_.clear();
    for (Index i : rows) {
        if (!cache_valid_[i]) stale_.push_back(i);
    }
    if (!stale_.empty()) {
        ode_.eval_internal(xe, xi, f_explicit_, stale_, ctx.counters.model);
        ctx.counters.f_internal_component_evals += stale_.size();
        check_finite(f_explicit_, stale_, "trapezoidal explicit half");
    }
    std::fill(cache_valid_.begin(), cache_valid_.end(), 0);

    std::copy(xi.begin(), xi.end(), z_.begin());
    solve_trapezoidal_block(ode_, xe_next_, xi, f_explicit_, rows, ctx.h, newton_, ctx.counters, z_, f_next_);
    for (Index i : rows) {
        f_explicit_[i] = f_next_[i];
        cache_valid_[i] = 1;
    }

    for (Index e = 0; e < ne; ++e) {
        increments_[e] = std::abs(xe_next_[e] - xe[e]);
        xe[e] = xe_next_[e];
    }
    for (Index i = 0; i < ni; ++i) {
        increments_[ne + i] = std::abs(z_[i] - xi[i]);
        xi[i] = z_[i];
    }
    have_prev_ = true;
    ++ctx.counters.steps;
}

}  // namespace sigflow
