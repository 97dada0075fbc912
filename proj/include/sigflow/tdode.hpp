#pragma once

// =============================================================================
// sigflow - Time-driven ODEs and their dependency graph
// =============================================================================
// A time-driven ODE splits the state into external variables x_E, which are
// explicit functions of time, and internal variables x_I with x_I' = f_I(x_E,
// x_I). Variables are indexed 0..n-1 with the externals first, so internal
// component i is variable n_E + i.
// =============================================================================

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigflow {

using Index = std::size_t;
using IndexList = std::vector<Index>;

/// Raised for malformed structural data (sparsity patterns, graph edges).
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a numerical evaluation produces a non-finite value.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Work tally filled in by the model itself. `device_evals` is the model's
/// cost unit (transistor-model calls for circuits), `per_component` counts
/// how often each internal component was evaluated.
struct ModelTally {
    std::uint64_t device_evals = 0;
    std::vector<std::uint64_t> per_component;

    void touch(Index component, std::uint64_t devices) {
        if (per_component.size() <= component) per_component.resize(component + 1, 0);
        ++per_component[component];
        device_evals += devices;
    }
};

// =============================================================================
// TdOde
// =============================================================================

/// Interface of a time-driven ODE.
///
/// Internal evaluations take an explicit list of component indices (`rows`,
/// sorted, 0-based internal indices). Only `out[i]` for `i` in `rows` is
/// written; every other entry of `out` is left untouched. Evaluating a subset
/// must give bitwise the same values as a full evaluation restricted to that
/// subset.
class TdOde {
public:
    virtual ~TdOde() = default;

    [[nodiscard]] virtual Index n_external() const = 0;
    [[nodiscard]] virtual Index n_internal() const = 0;
    [[nodiscard]] Index size() const { return n_external() + n_internal(); }

    /// f_E(t), written into `out` (size n_E).
    virtual void eval_external(double t, std::span<double> out) const = 0;

    virtual void eval_internal(std::span<const double> x_e,
                               std::span<const double> x_i,
                               std::span<double> out,
                               std::span<const Index> rows,
                               ModelTally& tally) const = 0;

    /// Evaluate all internal components.
    void eval_internal(std::span<const double> x_e,
                       std::span<const double> x_i,
                       std::span<double> out,
                       ModelTally& tally) const;

    [[nodiscard]] virtual bool has_jacobian() const { return false; }

    /// f_I on `rows` together with the block d f_I[rows] / d x_I[rows].
    /// `jac` is resized to |rows| x |rows|; entry (a, b) is the derivative of
    /// component rows[a] with respect to internal variable rows[b].
    virtual void eval_internal_jacobian(std::span<const double> x_e,
                                        std::span<const double> x_i,
                                        std::span<double> out,
                                        Eigen::MatrixXd& jac,
                                        std::span<const Index> rows,
                                        ModelTally& tally) const;

    /// Input set of every internal component as global variable indices
    /// (0..n-1). Must over-approximate what the evaluator reads.
    [[nodiscard]] virtual const std::vector<IndexList>& sparsity() const = 0;

    /// Model-specific cost units per component evaluation (e.g. 2 transistors
    /// per inverter). Informational; the tally is authoritative.
    [[nodiscard]] virtual std::uint64_t devices_per_component() const { return 1; }
};

// =============================================================================
// FunctionalOde - a TdOde assembled from callables
// =============================================================================

/// Convenience implementation for small systems and tests. Each internal
/// component is a scalar function of (x_E, x_I).
class FunctionalOde final : public TdOde {
public:
    using ExternalFn = std::function<void(double, std::span<double>)>;
    using ComponentFn = std::function<double(Index, std::span<const double>, std::span<const double>)>;
    /// d f_I[i] / d x_I[j]
    using PartialFn = std::function<double(Index, Index, std::span<const double>, std::span<const double>)>;

    FunctionalOde(Index n_external, Index n_internal, ExternalFn external,
                  ComponentFn component, std::vector<IndexList> sparsity,
                  std::optional<PartialFn> partial = std::nullopt);

    [[nodiscard]] Index n_external() const override { return n_e_; }
    [[nodiscard]] Index n_internal() const override { return n_i_; }
    void eval_external(double t, std::span<double> out) const override;
    using TdOde::eval_internal;
    void eval_internal(std::span<const double> x_e, std::span<const double> x_i,
                       std::span<double> out, std::span<const Index> rows,
                       ModelTally& tally) const override;
    [[nodiscard]] bool has_jacobian() const override { return partial_.has_value(); }
    void eval_internal_jacobian(std::span<const double> x_e, std::span<const double> x_i,
                                std::span<double> out, Eigen::MatrixXd& jac,
                                std::span<const Index> rows, ModelTally& tally) const override;
    [[nodiscard]] const std::vector<IndexList>& sparsity() const override { return sparsity_; }

private:
    Index n_e_;
    Index n_i_;
    ExternalFn external_;
    ComponentFn component_;
    std::vector<IndexList> sparsity_;
    std::optional<PartialFn> partial_;
};

/// Linear system x_I' = A x_I without externals other than an optional dummy.
/// Sparsity is the nonzero pattern of A.
[[nodiscard]] FunctionalOde make_linear_ode(const Eigen::MatrixXd& a, Index n_external = 0);

// =============================================================================
// Dependency graph
// =============================================================================

/// Directed graph with one vertex per variable and an edge j -> i whenever
/// f_i reads x_j. `in_edges[i]` is pre(x_i), `out_edges[j]` is post(x_j); both
/// sorted and duplicate free.
struct DependencyGraph {
    Index n_vertices = 0;
    Index n_external = 0;
    std::vector<IndexList> in_edges;
    std::vector<IndexList> out_edges;

    [[nodiscard]] std::size_t edge_count() const;
    [[nodiscard]] bool is_external(Index v) const { return v < n_external; }
};

/// Builds the graph from the declared sparsity. External vertices get empty
/// input sets. Throws StructuralError for indices outside 0..n-1.
[[nodiscard]] DependencyGraph build_dependency_graph(const TdOde& ode);

/// Same, from raw data: `internal_inputs[i]` is the input set of internal i.
[[nodiscard]] DependencyGraph build_dependency_graph(Index n_external,
                                                     const std::vector<IndexList>& internal_inputs);

/// Test oracle: numerical sparsity pattern of `eval` (R^n -> R^m) at `point`
/// by central differences, {j : |d f_i / d x_j| > threshold}. A single point
/// can miss dependencies; never use this in place of declared structure.
using VectorFn = std::function<void(std::span<const double>, std::span<double>)>;
[[nodiscard]] std::vector<IndexList> sparsity_from_finite_differences(
    const VectorFn& eval, std::span<const double> point, Index n_outputs, double threshold);

/// Oracle specialised to the internal part of a TdOde; `point` is the full
/// state x = (x_E, x_I).
[[nodiscard]] std::vector<IndexList> sparsity_from_finite_differences(
    const TdOde& ode, std::span<const double> point, double threshold);

}  // namespace sigflow
