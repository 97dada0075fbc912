#include "sigflow/activity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sigflow {

std::string_view to_string(ActivityMode mode) {
    return mode == ActivityMode::Latency ? "latency" : "periodicity";
}

std::vector<ActivityState> classify_changes(const DependencyGraph& graph,
                                            std::span<const double> change, double epsilon,
                                            int max_order, ClassifyStats* stats) {
    const Index n = graph.n_vertices;
    if (change.size() != n) throw std::invalid_argument("classify: change vector has wrong size");
    if (max_order < 1) throw std::invalid_argument("classify: max_order must be >= 1");

    std::vector<ActivityState> out(n);
    std::vector<char> quiet(n);
    for (Index v = 0; v < n; ++v) quiet[v] = is_quiet(change[v], epsilon) ? 1 : 0;

    std::uint64_t visits = 0;
    // order 1: the vertex and all its inputs are quiet
    std::vector<int> level(n, 0);
    for (Index v = 0; v < n; ++v) {
        if (!quiet[v]) continue;
        out[v].kind = ActivityKind::Semi;
        bool all = true;
        for (Index j : graph.in_edges[v]) {
            ++visits;
            if (!quiet[j]) {
                all = false;
                break;
            }
        }
        if (!all) continue;
        level[v] = graph.in_edges[v].empty() ? max_order : 1;
    }

    // order nu: every input at least nu-1 (synchronous rounds)
    std::vector<int> next = level;
    std::uint64_t rounds = 1;
    for (int nu = 2; nu <= max_order; ++nu) {
        bool promoted = false;
        for (Index v = 0; v < n; ++v) {
            if (level[v] != nu - 1) continue;
            bool all = true;
            for (Index j : graph.in_edges[v]) {
                ++visits;
                if (level[j] < nu - 1) {
                    all = false;
                    break;
                }
            }
            if (all) {
                next[v] = nu;
                promoted = true;
            }
        }
        ++rounds;
        level = next;
        if (!promoted) break;
    }

    for (Index v = 0; v < n; ++v) {
        if (level[v] > 0) {
            out[v].kind = ActivityKind::Inactive;
            out[v].order = level[v];
        }
    }
    if (stats) {
        stats->edge_visits += visits;
        stats->rounds += rounds;
    }
    return out;
}

// -----------------------------------------------------------------------------
// ActivityTracker
// -----------------------------------------------------------------------------

ActivityTracker::ActivityTracker(const DependencyGraph& graph, TrackerOptions options)
    : opts_(options), n_(graph.n_vertices), n_external_(graph.n_external) {
    if (!(opts_.epsilon >= 0.0)) throw std::invalid_argument("tracker: epsilon must be >= 0");
    if (opts_.max_order < 1) throw std::invalid_argument("tracker: max_order must be >= 1");
    if (opts_.mode == ActivityMode::Periodicity && opts_.period_steps == 0) {
        throw std::invalid_argument("tracker: period_steps must be >= 1 in periodicity mode");
    }
    if (opts_.mode == ActivityMode::Latency) opts_.period_steps = 1;
    reset();
}

void ActivityTracker::set_mode(ActivityMode mode, Index period_steps) {
    if (mode == ActivityMode::Periodicity && period_steps == 0) {
        throw std::invalid_argument("tracker: period_steps must be >= 1 in periodicity mode");
    }
    opts_.mode = mode;
    opts_.period_steps = mode == ActivityMode::Latency ? 1 : period_steps;
    reset();
}

void ActivityTracker::reset() {
    changes_.assign(n_, std::numeric_limits<double>::infinity());
    have_basis_ = false;
    states_.assign(n_, ActivityState{});
    ring_x_.clear();
    ring_ext_.clear();
    observed_ = 0;
    if (opts_.mode == ActivityMode::Periodicity) {
        ring_x_.resize(opts_.period_steps);
        ring_ext_.resize(opts_.period_steps);
    }
}

void ActivityTracker::record_increments(std::span<const double> abs_increments) {
    if (abs_increments.size() != n_) throw std::invalid_argument("tracker: increment vector has wrong size");
    std::copy(abs_increments.begin(), abs_increments.end(), changes_.begin());
    have_basis_ = true;
}

void ActivityTracker::observe_state(std::span<const double> x, std::span<const double> external_samples) {
    if (opts_.mode != ActivityMode::Periodicity) {
        throw std::logic_error("tracker: observe_state requires periodicity mode");
    }
    if (x.size() != n_) throw std::invalid_argument("tracker: state vector has wrong size");
    const Index p = opts_.period_steps;
    const Index slot = observed_ % p;
    auto& old_x = ring_x_[slot];
    auto& old_e = ring_ext_[slot];
    const bool use_samples = !external_samples.empty();

    if (observed_ >= p) {
        for (Index v = n_external_; v < n_; ++v) changes_[v] = std::abs(x[v] - old_x[v]);
        if (use_samples && old_e.size() == external_samples.size() && n_external_ > 0) {
            const Index per = external_samples.size() / n_external_;
            for (Index e = 0; e < n_external_; ++e) {
                double d = 0.0;
                for (Index q = 0; q < per; ++q) {
                    const Index k = e * per + q;
                    d = std::max(d, std::abs(external_samples[k] - old_e[k]));
                }
                changes_[e] = d;
            }
        } else {
            for (Index e = 0; e < n_external_; ++e) changes_[e] = std::abs(x[e] - old_x[e]);
        }
        have_basis_ = true;
    }
    old_x.assign(x.begin(), x.end());
    old_e.assign(external_samples.begin(), external_samples.end());
    ++observed_;
}

std::span<const double> ActivityTracker::state_from_period_ago() const {
    const Index p = opts_.period_steps;
    if (opts_.mode != ActivityMode::Periodicity || observed_ < p) {
        throw std::logic_error("tracker: period history not available");
    }
    return ring_x_[observed_ % p];
}

const std::vector<ActivityState>& ActivityTracker::classify_from_changes(const DependencyGraph& graph) {
    if (graph.n_vertices != n_) throw std::invalid_argument("tracker: graph size mismatch");
    if (!have_basis_) {
        states_.assign(n_, ActivityState{});
        return states_;
    }
    states_ = classify_changes(graph, changes_, opts_.epsilon, opts_.max_order, &stats_);
    return states_;
}

const std::vector<ActivityState>& classify_latency(ActivityTracker& tracker,
                                                   const DependencyGraph& graph) {
    if (tracker.mode() != ActivityMode::Latency) {
        throw std::logic_error("classify_latency: tracker is in periodicity mode");
    }
    return tracker.classify_from_changes(graph);
}

const std::vector<ActivityState>& classify_periodicity(ActivityTracker& tracker,
                                                       const DependencyGraph& graph) {
    if (tracker.mode() != ActivityMode::Periodicity) {
        throw std::logic_error("classify_periodicity: tracker is in latency mode");
    }
    return tracker.classify_from_changes(graph);
}

}  // namespace sigflow
