#include "sigflow/tdode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sigflow {

void TdOde::eval_internal(std::span<const double> x_e, std::span<const double> x_i,
                          std::span<double> out, ModelTally& tally) const {
    IndexList all(n_internal());
    std::iota(all.begin(), all.end(), Index{0});
    eval_internal(x_e, x_i, out, all, tally);
}

void TdOde::eval_internal_jacobian(std::span<const double>, std::span<const double>,
                                   std::span<double>, Eigen::MatrixXd&,
                                   std::span<const Index>, ModelTally&) const {
    throw std::logic_error("TdOde: model does not provide a Jacobian");
}

// -----------------------------------------------------------------------------
// FunctionalOde
// -----------------------------------------------------------------------------

FunctionalOde::FunctionalOde(Index n_external, Index n_internal, ExternalFn external,
                             ComponentFn component, std::vector<IndexList> sparsity,
                             std::optional<PartialFn> partial)
    : n_e_(n_external),
      n_i_(n_internal),
      external_(std::move(external)),
      component_(std::move(component)),
      sparsity_(std::move(sparsity)),
      partial_(std::move(partial)) {
    if (sparsity_.size() != n_i_) {
        throw StructuralError("FunctionalOde: sparsity must have one entry per internal component");
    }
}

void FunctionalOde::eval_external(double t, std::span<double> out) const {
    if (n_e_ == 0) return;
    external_(t, out);
}

void FunctionalOde::eval_internal(std::span<const double> x_e, std::span<const double> x_i,
                                  std::span<double> out, std::span<const Index> rows,
                                  ModelTally& tally) const {
    for (Index i : rows) {
        out[i] = component_(i, x_e, x_i);
        tally.touch(i, 1);
    }
}

void FunctionalOde::eval_internal_jacobian(std::span<const double> x_e, std::span<const double> x_i,
                                           std::span<double> out, Eigen::MatrixXd& jac,
                                           std::span<const Index> rows, ModelTally& tally) const {
    if (!partial_) TdOde::eval_internal_jacobian(x_e, x_i, out, jac, rows, tally);
    const auto k = static_cast<Eigen::Index>(rows.size());
    jac.setZero(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        const Index i = rows[static_cast<std::size_t>(a)];
        out[i] = component_(i, x_e, x_i);
        tally.touch(i, 1);
        for (Eigen::Index b = 0; b < k; ++b) {
            jac(a, b) = (*partial_)(i, rows[static_cast<std::size_t>(b)], x_e, x_i);
        }
    }
}

FunctionalOde make_linear_ode(const Eigen::MatrixXd& a, Index n_external) {
    const auto n = static_cast<Index>(a.rows());
    std::vector<IndexList> sparsity(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0) {
                sparsity[i].push_back(n_external + j);
            }
        }
    }
    auto component = [a](Index i, std::span<const double>, std::span<const double> x) {
        double acc = 0.0;
        for (Index j = 0; j < x.size(); ++j) {
            acc += a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
        }
        return acc;
    };
    auto partial = [a](Index i, Index j, std::span<const double>, std::span<const double>) {
        return a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };
    auto external = [](double, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
    return FunctionalOde(n_external, n, external, component, std::move(sparsity), partial);
}

// -----------------------------------------------------------------------------
// Dependency graph
// -----------------------------------------------------------------------------

std::size_t DependencyGraph::edge_count() const {
    std::size_t total = 0;
    for (const auto& e : in_edges) total += e.size();
    return total;
}

DependencyGraph build_dependency_graph(Index n_external,
                                       const std::vector<IndexList>& internal_inputs) {
    DependencyGraph g;
    g.n_external = n_external;
    g.n_vertices = n_external + internal_inputs.size();
    g.in_edges.assign(g.n_vertices, {});
    g.out_edges.assign(g.n_vertices, {});

    for (Index i = 0; i < internal_inputs.size(); ++i) {
        IndexList pre = internal_inputs[i];
        std::sort(pre.begin(), pre.end());
        pre.erase(std::unique(pre.begin(), pre.end()), pre.end());
        for (Index j : pre) {
            if (j >= g.n_vertices) {
                throw StructuralError("dependency graph: input index " + std::to_string(j) +
                                      " of internal component " + std::to_string(i) +
                                      " outside 0.." + std::to_string(g.n_vertices - 1));
            }
        }
        g.in_edges[n_external + i] = std::move(pre);
    }
    // transpose into sorted out-lists
    for (Index v = 0; v < g.n_vertices; ++v) {
        for (Index j : g.in_edges[v]) g.out_edges[j].push_back(v);
    }
    return g;
}

DependencyGraph build_dependency_graph(const TdOde& ode) {
    const auto& sp = ode.sparsity();
    if (sp.size() != ode.n_internal()) {
        throw StructuralError("dependency graph: sparsity has " + std::to_string(sp.size()) +
                              " entries, expected " + std::to_string(ode.n_internal()));
    }
    return build_dependency_graph(ode.n_external(), sp);
}

std::vector<IndexList> sparsity_from_finite_differences(const VectorFn& eval,
                                                        std::span<const double> point,
                                                        Index n_outputs, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("sparsity oracle: threshold must be > 0");
    const Index n = point.size();
    std::vector<double> x(point.begin(), point.end());
    std::vector<double> fp(n_outputs), fm(n_outputs);
    std::vector<IndexList> pattern(n_outputs);

    for (Index j = 0; j < n; ++j) {
        const double step = 1e-6 * std::max(1.0, std::abs(point[j]));
        x[j] = point[j] + step;
        eval(x, fp);
        x[j] = point[j] - step;
        eval(x, fm);
        x[j] = point[j];
        for (Index i = 0; i < n_outputs; ++i) {
            if (!std::isfinite(fp[i]) || !std::isfinite(fm[i])) {
                throw NumericError("sparsity oracle: non-finite evaluation of output " +
                                   std::to_string(i));
            }
            const double d = (fp[i] - fm[i]) / (2.0 * step);
            if (std::abs(d) > threshold) pattern[i].push_back(j);
        }
    }
    return pattern;
}

std::vector<IndexList> sparsity_from_finite_differences(const TdOde& ode,
                                                        std::span<const double> point,
                                                        double threshold) {
    const Index ne = ode.n_external();
    const Index ni = ode.n_internal();
    if (point.size() != ne + ni) throw std::invalid_argument("sparsity oracle: point has wrong size");
    ModelTally tally;
    auto eval = [&](std::span<const double> x, std::span<double> out) {
        ode.eval_internal(x.first(ne), x.subspan(ne), out, tally);
    };
    return sparsity_from_finite_differences(eval, point, ni, threshold);
}

}  // namespace sigflow
