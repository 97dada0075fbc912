#pragma once

// =============================================================================
// sigflow - Experiment grids, reports and file output
// =============================================================================
// An experiment is a JSON document:
//
//   {
//     "name": "latency_sweep",
//     "defaults": { "model": "inverter_chain", "method": "rk4", "h": 0.01, ... },
//     "sweep": [ {"key": "method",  "values": ["rk4", "sfrk4"]},
//                {"key": "delta_T", "values": [0, 5, 10]} ],
//     "reference": "rk4",
//     "table": {"rows": "method", "cols": "delta_T", "value": "transistor_evals"}
//   }
//
// The grid is the cross product of the sweeps in declaration order (the first
// sweep varies slowest). With a reference method every cell is compared
// against the reference run at the same grid point.
// =============================================================================

#include "sigflow/circuits.hpp"
#include "sigflow/integrate.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sigflow {

using Json = nlohmann::ordered_json;

/// Raised for malformed experiment documents or cell parameters.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// =============================================================================
// Cell parameters
// =============================================================================

/// Fully resolved parameters of one grid cell.
struct CellParams {
    std::string model = "inverter_chain";  ///< inverter_chain | random_network | quantized_chain
    IntegrationConfig integration;
    InverterChainParams chain;

    // pulse excitation of the inverter chain
    double delta_T = 10.0;
    double rise = 1.0;
    double fall = 1.0;
    double delay = 1.0;
    double v_low = 0.0;
    double v_high = 5.0;

    // synthetic systems
    Index nodes = 8;
    double density = 0.4;
    std::uint64_t seed = 0;

    // output
    bool write_trajectory = false;
    bool write_activity = false;
    Index activity_every = 1;
    bool activity_orders = false;
};

/// Resolves a flat key/value object. Unknown keys raise ConfigError.
/// `period_steps` may be "auto": (rise + fall + delta_T) / h.
[[nodiscard]] CellParams parse_cell_params(const Json& params, std::uint64_t default_seed);

/// Model and initial state described by a cell.
struct ModelInstance {
    std::unique_ptr<TdOde> ode;
    DependencyGraph graph;
    std::vector<double> x0;
};

[[nodiscard]] ModelInstance build_model(const CellParams& params);

// =============================================================================
// Experiments
// =============================================================================

struct SweepAxis {
    std::string key;
    std::vector<Json> values;
};

struct TableSpec {
    std::string rows = "method";
    std::string cols;
    std::string value = "transistor_evals";
};

struct ExperimentConfig {
    std::string name = "experiment";
    Json defaults = Json::object();
    std::vector<SweepAxis> sweeps;
    std::optional<std::string> reference;
    std::optional<TableSpec> table;
};

[[nodiscard]] ExperimentConfig parse_experiment(const Json& doc);
[[nodiscard]] ExperimentConfig load_experiment(const std::filesystem::path& path);

struct GridCell {
    std::size_t index = 0;
    std::vector<std::pair<std::string, Json>> coords;  ///< sweep key -> value
    Json params;                                        ///< defaults overlaid with coords
};

[[nodiscard]] std::vector<GridCell> expand_grid(const ExperimentConfig& config);

struct CellResult {
    GridCell cell;
    bool ok = false;
    std::string error;
    RunReport report;
    std::optional<DeviationStats> deviation;
    std::optional<double> reference_wall_seconds;
    std::optional<double> speedup;
    Trajectory trajectory;   ///< kept only when requested
    ActivityTrace activity;  ///< kept only when requested
    Index n_external = 0;
};

struct RunOptions {
    std::optional<std::filesystem::path> out_dir{};
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    bool keep_trajectories = false;
};

struct ExperimentResult {
    std::string name;
    std::vector<CellResult> cells;  ///< in grid order

    [[nodiscard]] bool all_ok() const;
};

/// Runs every cell; a failing cell records its error and the others proceed.
/// With an output directory, writes per-cell files plus the summaries.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

// =============================================================================
// Output
// =============================================================================

/// `t,x_1,...,x_n` with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

/// A `# mode=...` line, then `t,x_1,...,x_n` with codes 0 (active), 1 (semi),
/// 2 (latent / periodic); optionally followed by `order_1,...,order_n`.
void write_activity_csv(std::ostream& os, const ActivityTrace& trace, Index every = 1,
                        bool with_orders = false);

[[nodiscard]] Json report_to_json(const CellResult& result);

/// One row per cell. Timing columns only with `with_timings`.
void write_summary_csv(std::ostream& os, const ExperimentResult& result, bool with_timings);

/// Pivot of `spec.value` over rows x cols, as a Markdown table.
void write_pivot_table(std::ostream& os, const ExperimentResult& result, const TableSpec& spec);

/// Value of a summary metric ("transistor_evals", "f_evals", "newton_iterations",
/// "lu_factorizations", "deviation_max", "deviation_avg", "speedup", "wall_seconds").
[[nodiscard]] std::optional<double> metric(const CellResult& result, const std::string& name);

}  // namespace sigflow
