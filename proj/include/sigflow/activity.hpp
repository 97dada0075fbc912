#pragma once

// =============================================================================
// sigflow - Activity classification
// =============================================================================
// Every variable is labelled per step as active, semi-latent or latent of
// some order (latency mode), or active, semi-periodic or periodic of some
// order (periodicity mode). Both modes share the same order propagation over
// the dependency graph; they differ only in the change measure:
//   latency      change_i = |x_i^m - x_i^{m-1}|   (last increment)
//   periodicity  change_i = |x_i^m - x_i^{m-p}|   (same phase, previous period)
// =============================================================================

#include "sigflow/tdode.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sigflow {

enum class ActivityMode { Latency, Periodicity };

/// Trace codes: 0 active, 1 semi-latent / semi-periodic, 2 latent / periodic.
enum class ActivityKind : std::uint8_t { Active = 0, Semi = 1, Inactive = 2 };

struct ActivityState {
    ActivityKind kind = ActivityKind::Active;
    int order = 0;  ///< nu >= 1 when Inactive, 0 otherwise

    friend bool operator==(const ActivityState&, const ActivityState&) = default;
};

[[nodiscard]] std::string_view to_string(ActivityMode mode);

/// Semi-latency / semi-periodicity predicate. Strict `change < epsilon`;
/// epsilon == 0 means exact comparison (`change == 0`).
[[nodiscard]] constexpr bool is_quiet(double change, double epsilon) noexcept {
    return epsilon > 0.0 ? change < epsilon : change == 0.0;
}

struct ClassifyStats {
    std::uint64_t edge_visits = 0;
    std::uint64_t rounds = 0;
};

/// Labels all vertices from their change measures.
///
/// A vertex is Semi when quiet; Inactive of order 1 when it and all of its
/// inputs are quiet; of order nu when in addition every input is at least of
/// order nu-1. Orders are capped at `max_order`; a quiet vertex with an empty
/// input set reaches `max_order` immediately. Touches each edge at most
/// `max_order` times.
[[nodiscard]] std::vector<ActivityState> classify_changes(const DependencyGraph& graph,
                                                          std::span<const double> change,
                                                          double epsilon, int max_order,
                                                          ClassifyStats* stats = nullptr);

struct TrackerOptions {
    ActivityMode mode = ActivityMode::Latency;
    double epsilon = 1e-6;
    Index period_steps = 1;  ///< p, periodicity mode only
    int max_order = 1;       ///< 1 in practical mode, stage count s in exact mode
};

/// Per-run classification state.
class ActivityTracker {
public:
    ActivityTracker(const DependencyGraph& graph, TrackerOptions options);

    [[nodiscard]] const TrackerOptions& options() const { return opts_; }
    [[nodiscard]] ActivityMode mode() const { return opts_.mode; }

    /// Switches mode; all history is discarded.
    void set_mode(ActivityMode mode, Index period_steps = 1);
    void reset();

    // ---- latency mode -------------------------------------------------------

    /// Change measures of the last accepted step, one per variable.
    void record_increments(std::span<const double> abs_increments);
    [[nodiscard]] std::span<const double> prev_increments() const { return changes_; }

    // ---- periodicity mode ---------------------------------------------------

    /// Feeds x^m. When p earlier states are stored, the change measures are
    /// |x^m - x^{m-p}|; then x^m replaces x^{m-p} in the ring. For externals,
    /// `external_samples` (n_E * S values, S >= 1 samples per variable) is
    /// compared instead of x_E when non-empty.
    void observe_state(std::span<const double> x, std::span<const double> external_samples = {});

    /// True once m >= p, i.e. the comparison basis exists.
    [[nodiscard]] bool history_full() const { return have_basis_; }
    [[nodiscard]] Index observed_steps() const { return observed_; }

    /// x^{m-p+1}, where x^m is the most recently observed state. Requires
    /// observed_steps() >= p.
    [[nodiscard]] std::span<const double> state_from_period_ago() const;

    // ---- results --------------------------------------------------------------

    [[nodiscard]] const std::vector<ActivityState>& states() const { return states_; }
    /// Variable v is skipped when Inactive of order >= max_order.
    [[nodiscard]] bool skips(Index v) const {
        return states_[v].kind == ActivityKind::Inactive && states_[v].order >= opts_.max_order;
    }
    [[nodiscard]] const ClassifyStats& stats() const { return stats_; }

private:
    friend const std::vector<ActivityState>& classify_latency(ActivityTracker&, const DependencyGraph&);
    friend const std::vector<ActivityState>& classify_periodicity(ActivityTracker&, const DependencyGraph&);

    const std::vector<ActivityState>& classify_from_changes(const DependencyGraph& graph);

    TrackerOptions opts_;
    Index n_;
    Index n_external_;
    std::vector<double> changes_;
    bool have_basis_ = false;
    std::vector<ActivityState> states_;
    ClassifyStats stats_;

    // ring of p states (and external samples); slot m % p holds x^m
    std::vector<std::vector<double>> ring_x_;
    std::vector<std::vector<double>> ring_ext_;
    Index observed_ = 0;
};

/// Classifies from the increments recorded after the last step. Before any
/// increment is recorded, everything is Active.
const std::vector<ActivityState>& classify_latency(ActivityTracker& tracker,
                                                   const DependencyGraph& graph);

/// Classifies from the last observed state against the state one period
/// earlier. Everything is Active until p states have been observed.
const std::vector<ActivityState>& classify_periodicity(ActivityTracker& tracker,
                                                       const DependencyGraph& graph);

}  // namespace sigflow
