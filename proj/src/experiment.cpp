#include "sigflow/experiment.hpp"

#include "sigflow/test_systems.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace sigflow {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "model", "method", "tableau", "t0", "t_end", "h", "epsilon", "skip_order", "period_steps",
        "newton_step_tol", "newton_residual_tol", "newton_max_iter", "trace_epsilon",
        "N", "C", "vdd", "vt_n", "beta_n", "lambda_n", "vt_p", "beta_p", "lambda_p", "complexity",
        "delta_T", "rise", "fall", "delay", "v_low", "v_high",
        "nodes", "density", "seed",
        "write_trajectory", "trajectory_every", "write_activity", "activity_every", "activity_orders",
    };
    return keys;
}

template <typename T>
T get(const Json& params, const char* key, T fallback) {
    const auto it = params.find(key);
    if (it == params.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("parameter '") + key + "': " + e.what());
    }
}

Index get_count(const Json& params, const char* key, Index fallback) {
    const auto it = params.find(key);
    if (it == params.end() || it->is_null()) return fallback;
    if (!it->is_number_integer() || it->get<long long>() < 0) {
        throw ConfigError(std::string("parameter '") + key + "' must be a non-negative integer");
    }
    return it->get<Index>();
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) body(k);
        });
    }
}

std::string format_value(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(12) << v.get<double>();
        return os.str();
    }
    return v.dump();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

/// Parameters of the plain reference run for a cell.
Json reference_params(const Json& params, const std::string& method) {
    Json ref = params;
    ref["method"] = method;
    for (const char* key : {"epsilon", "skip_order", "period_steps", "trace_epsilon", "write_trajectory",
                            "trajectory_every", "write_activity", "activity_every", "activity_orders"}) {
        ref.erase(key);
    }
    return ref;
}

}  // namespace

// =============================================================================
// Cell parameters and models
// =============================================================================

CellParams parse_cell_params(const Json& params, std::uint64_t default_seed) {
    if (!params.is_object()) throw ConfigError("cell parameters must be an object");
    for (const auto& [key, value] : params.items()) {
        if (!known_keys().contains(key)) throw ConfigError("unknown parameter '" + key + "'");
    }

    CellParams p;
    p.model = get<std::string>(params, "model", p.model);

    auto& ic = p.integration;
    try {
        ic.method = parse_method(get<std::string>(params, "method", "rk4"));
        ic.skip_order = parse_skip_order(get<std::string>(params, "skip_order", "practical"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    ic.tableau = get<std::string>(params, "tableau", ic.tableau);
    ic.t0 = get<double>(params, "t0", 0.0);
    ic.t_end = get<double>(params, "t_end", 40.0);
    ic.h = get<double>(params, "h", 0.01);
    ic.epsilon = get<double>(params, "epsilon", ic.epsilon);
    ic.trace_epsilon = get<double>(params, "trace_epsilon", ic.trace_epsilon);
    ic.newton.step_tolerance = get<double>(params, "newton_step_tol", ic.newton.step_tolerance);
    ic.newton.residual_tolerance = get<double>(params, "newton_residual_tol", ic.newton.residual_tolerance);
    ic.newton.max_iterations = get<int>(params, "newton_max_iter", ic.newton.max_iterations);
    if (!(ic.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");

    p.delta_T = get<double>(params, "delta_T", p.delta_T);
    p.rise = get<double>(params, "rise", p.rise);
    p.fall = get<double>(params, "fall", p.fall);
    p.delay = get<double>(params, "delay", p.delay);
    p.v_low = get<double>(params, "v_low", p.v_low);
    p.v_high = get<double>(params, "v_high", p.v_high);

    const auto period = params.find("period_steps");
    if (period == params.end() || period->is_null() || (period->is_string() && period->get<std::string>() == "auto")) {
        const double steps = (p.rise + p.fall + p.delta_T) / ic.h;
        if (std::abs(steps - std::round(steps)) > 1e-6 || steps < 1.0) {
            if (ic.method == Method::SfpRk) throw ConfigError("pulse period is not a multiple of h");
            ic.period_steps = 1;
        } else {
            ic.period_steps = static_cast<Index>(std::llround(steps));
        }
    } else {
        ic.period_steps = get_count(params, "period_steps", 1);
        if (ic.period_steps == 0) throw ConfigError("period_steps must be >= 1");
    }

    auto& ch = p.chain;
    ch.n = get_count(params, "N", ch.n);
    ch.capacitance = get<double>(params, "C", ch.capacitance);
    ch.vdd = get<double>(params, "vdd", ch.vdd);
    ch.nmos.vt = get<double>(params, "vt_n", ch.nmos.vt);
    ch.nmos.beta = get<double>(params, "beta_n", ch.nmos.beta);
    ch.nmos.lambda = get<double>(params, "lambda_n", ch.nmos.lambda);
    ch.pmos.vt = get<double>(params, "vt_p", ch.pmos.vt);
    ch.pmos.beta = get<double>(params, "beta_p", ch.pmos.beta);
    ch.pmos.lambda = get<double>(params, "lambda_p", ch.pmos.lambda);
    ch.complexity = get<int>(params, "complexity", 0);
    if (ch.complexity < 0) throw ConfigError("complexity must be >= 0");

    p.nodes = get_count(params, "nodes", p.nodes);
    p.density = get<double>(params, "density", p.density);
    p.seed = get<std::uint64_t>(params, "seed", default_seed);

    p.write_trajectory = get<bool>(params, "write_trajectory", false);
    ic.record_every = std::max<Index>(1, get_count(params, "trajectory_every", 1));
    p.write_activity = get<bool>(params, "write_activity", false);
    p.activity_every = std::max<Index>(1, get_count(params, "activity_every", 1));
    p.activity_orders = get<bool>(params, "activity_orders", false);
    ic.record_activity = p.write_activity;
    return p;
}

ModelInstance build_model(const CellParams& p) {
    ModelInstance m;
    const double t0 = p.integration.t0;
    if (p.model == "inverter_chain") {
        InverterChainParams cp = p.chain;
        cp.input = make_pulse_train(p.delta_T, p.v_low, p.v_high, p.rise, p.fall, p.delay);
        auto chain = std::make_unique<InverterChain>(build_inverter_chain(std::move(cp)));
        m.x0 = logic_initial_state(*chain, t0);
        m.ode = std::move(chain);
    } else if (p.model == "random_network") {
        m.ode = std::make_unique<FunctionalOde>(make_random_network(p.nodes, p.seed, p.density));
        m.x0.assign(m.ode->size(), 0.0);
        m.ode->eval_external(t0, std::span(m.x0).first(1));
        std::mt19937_64 rng(p.seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (Index i = 1; i < m.x0.size(); ++i) m.x0[i] = unit(rng);
    } else if (p.model == "quantized_chain") {
        QuantizedNetworkParams qp;
        qp.inputs = quantized_chain_inputs(p.nodes);
        qp.signal = square_wave(p.delay, p.rise, p.rise + p.fall + p.delta_T, p.v_low, p.v_high);
        m.ode = std::make_unique<FunctionalOde>(make_quantized_network(std::move(qp)));
        m.x0.assign(m.ode->size(), p.v_low);
        m.ode->eval_external(t0, std::span(m.x0).first(1));
    } else {
        throw ConfigError("unknown model '" + p.model + "'");
    }
    m.graph = build_dependency_graph(*m.ode);
    return m;
}

// =============================================================================
// Experiment documents
// =============================================================================

ExperimentConfig parse_experiment(const Json& doc) {
    if (!doc.is_object()) throw ConfigError("experiment must be a JSON object");
    static const std::set<std::string> top = {"name", "description", "defaults", "sweep", "reference", "table"};
    for (const auto& [key, value] : doc.items()) {
        if (!top.contains(key)) throw ConfigError("unknown experiment field '" + key + "'");
    }
    ExperimentConfig cfg;
    cfg.name = doc.value("name", cfg.name);
    if (doc.contains("defaults")) {
        if (!doc["defaults"].is_object()) throw ConfigError("'defaults' must be an object");
        cfg.defaults = doc["defaults"];
        for (const auto& [key, value] : cfg.defaults.items()) {
            if (!known_keys().contains(key)) throw ConfigError("unknown parameter '" + key + "' in defaults");
        }
    }
    if (doc.contains("sweep")) {
        if (!doc["sweep"].is_array()) throw ConfigError("'sweep' must be an array");
        std::set<std::string> seen;
        for (const auto& axis : doc["sweep"]) {
            if (!axis.is_object() || !axis.contains("key") || !axis.contains("values") || !axis["values"].is_array()) {
                throw ConfigError("sweep entries need 'key' and an array 'values'");
            }
            SweepAxis a;
            a.key = axis["key"].get<std::string>();
            if (!known_keys().contains(a.key)) throw ConfigError("unknown sweep key '" + a.key + "'");
            if (!seen.insert(a.key).second) throw ConfigError("duplicate sweep key '" + a.key + "'");
            for (const auto& v : axis["values"]) a.values.push_back(v);
            if (a.values.empty()) throw ConfigError("sweep '" + a.key + "' has no values");
            cfg.sweeps.push_back(std::move(a));
        }
    }
    if (doc.contains("reference") && !doc["reference"].is_null()) {
        cfg.reference = doc["reference"].get<std::string>();
        try {
            const Method m = parse_method(*cfg.reference);
            if (m != Method::Rk && m != Method::Tr) throw ConfigError("reference must be a plain method (rk4 or tr)");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (doc.contains("table")) {
        const auto& t = doc["table"];
        TableSpec spec;
        spec.rows = t.value("rows", spec.rows);
        spec.cols = t.value("cols", spec.cols);
        spec.value = t.value("value", spec.value);
        cfg.table = spec;
    }
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    Json doc;
    try {
        doc = Json::parse(in, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_experiment(doc);
}

std::vector<GridCell> expand_grid(const ExperimentConfig& config) {
    std::vector<GridCell> cells;
    std::vector<std::size_t> digit(config.sweeps.size(), 0);
    while (true) {
        GridCell cell;
        cell.index = cells.size();
        cell.params = config.defaults;
        for (std::size_t a = 0; a < config.sweeps.size(); ++a) {
            const auto& axis = config.sweeps[a];
            cell.coords.emplace_back(axis.key, axis.values[digit[a]]);
            cell.params[axis.key] = axis.values[digit[a]];
        }
        cells.push_back(std::move(cell));
        // odometer increment, last axis fastest
        std::size_t a = config.sweeps.size();
        while (a > 0) {
            --a;
            if (++digit[a] < config.sweeps[a].values.size()) break;
            digit[a] = 0;
            if (a == 0) return cells;
        }
        if (config.sweeps.empty()) return cells;
    }
}

bool ExperimentResult::all_ok() const {
    return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.ok; });
}

// =============================================================================
// Running
// =============================================================================

namespace {

struct ReferenceRun {
    bool ok = false;
    std::string error;
    Trajectory trajectory;
    double wall_seconds = 0.0;
};

std::string cell_stem(const std::string& name, std::size_t index) {
    std::ostringstream os;
    os << name << "_cell" << std::setw(3) << std::setfill('0') << index;
    return os.str();
}

void write_cell_files(const std::filesystem::path& dir, const std::string& stem, const CellResult& r,
                      const CellParams* p) {
    {
        std::ofstream os(dir / (stem + ".report.json"));
        os << report_to_json(r).dump(2) << '\n';
    }
    if (!r.ok || p == nullptr) return;
    if (p->write_trajectory) {
        std::ofstream os(dir / (stem + ".trajectory.csv"));
        write_trajectory_csv(os, r.trajectory);
    }
    if (p->write_activity) {
        std::ofstream os(dir / (stem + ".activity.csv"));
        write_activity_csv(os, r.activity, p->activity_every, p->activity_orders);
    }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    ExperimentResult result;
    result.name = config.name;
    const auto grid = expand_grid(config);
    result.cells.resize(grid.size());

    if (options.out_dir) std::filesystem::create_directories(*options.out_dir);

    // reference runs, one per distinct parameter set
    std::map<std::string, std::size_t> ref_index;
    std::vector<Json> ref_params;
    std::vector<std::string> cell_ref_key(grid.size());
    if (config.reference) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const Json rp = reference_params(grid[k].params, *config.reference);
            const std::string key = rp.dump();
            cell_ref_key[k] = key;
            if (ref_index.emplace(key, ref_params.size()).second) ref_params.push_back(rp);
        }
    }
    std::vector<ReferenceRun> refs(ref_params.size());
    parallel_for(refs.size(), options.jobs, [&](std::size_t k) {
        try {
            CellParams p = parse_cell_params(ref_params[k], options.seed);
            p.integration.record_trajectory = true;
            p.integration.record_every = 1;
            p.integration.record_activity = false;
            const ModelInstance m = build_model(p);
            RunResult run = integrate(*m.ode, m.graph, m.x0, p.integration);
            refs[k].trajectory = std::move(run.trajectory);
            refs[k].wall_seconds = run.report.wall_seconds;
            refs[k].ok = true;
        } catch (const std::exception& e) {
            refs[k].error = e.what();
        }
    });

    parallel_for(grid.size(), options.jobs, [&](std::size_t k) {
        CellResult& r = result.cells[k];
        r.cell = grid[k];
        std::optional<CellParams> params;
        try {
            params = parse_cell_params(grid[k].params, options.seed);
            CellParams& p = *params;
            const bool compare = config.reference.has_value();
            p.integration.record_trajectory = compare || p.write_trajectory || options.keep_trajectories;
            if (compare) p.integration.record_every = 1;
            const ModelInstance m = build_model(p);
            r.n_external = m.ode->n_external();
            RunResult run = integrate(*m.ode, m.graph, m.x0, p.integration);
            r.report = std::move(run.report);
            if (compare) {
                const ReferenceRun& ref = refs[ref_index.at(cell_ref_key[k])];
                if (!ref.ok) throw std::runtime_error("reference run failed: " + ref.error);
                r.deviation = compare_trajectories(ref.trajectory, run.trajectory);
                r.reference_wall_seconds = ref.wall_seconds;
                if (r.report.wall_seconds > 0.0) r.speedup = ref.wall_seconds / r.report.wall_seconds;
            }
            if (p.write_trajectory || options.keep_trajectories) r.trajectory = std::move(run.trajectory);
            r.activity = std::move(run.activity);
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
        if (options.out_dir) {
            write_cell_files(*options.out_dir, cell_stem(config.name, k), r, params ? &*params : nullptr);
        }
        if (!options.keep_trajectories) r.activity = {};
    });

    if (options.out_dir) {
        const auto& dir = *options.out_dir;
        {
            std::ofstream os(dir / (config.name + "_summary.csv"));
            write_summary_csv(os, result, true);
        }
        {
            Json all = Json::array();
            for (const auto& c : result.cells) all.push_back(report_to_json(c));
            std::ofstream os(dir / (config.name + "_summary.json"));
            os << Json{{"name", config.name}, {"cells", all}}.dump(2) << '\n';
        }
        if (config.table) {
            std::ofstream os(dir / (config.name + "_table.md"));
            write_pivot_table(os, result, *config.table);
        }
    }
    return result;
}

// =============================================================================
// Output
// =============================================================================

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
    const std::size_t n = trajectory.x.empty() ? 0 : trajectory.x.front().size();
    os << 't';
    for (std::size_t v = 0; v < n; ++v) os << ",x_" << v + 1;
    os << '\n';
    os << std::setprecision(17);
    for (std::size_t r = 0; r < trajectory.t.size(); ++r) {
        os << trajectory.t[r];
        for (double value : trajectory.x[r]) os << ',' << value;
        os << '\n';
    }
}

void write_activity_csv(std::ostream& os, const ActivityTrace& trace, Index every, bool with_orders) {
    const std::size_t n = trace.rows.empty() ? 0 : trace.rows.front().size();
    if (trace.mode == ActivityMode::Latency) {
        os << "# mode=latency codes: 0 active, 1 semi-latent, 2 latent\n";
    } else {
        os << "# mode=periodicity codes: 0 active, 1 semi-periodic, 2 periodic\n";
    }
    os << 't';
    for (std::size_t v = 0; v < n; ++v) os << ",x_" << v + 1;
    if (with_orders) {
        for (std::size_t v = 0; v < n; ++v) os << ",order_" << v + 1;
    }
    os << '\n';
    os << std::setprecision(17);
    every = std::max<Index>(every, 1);
    for (std::size_t r = 0; r < trace.rows.size(); r += every) {
        os << trace.t[r];
        for (const auto& s : trace.rows[r]) os << ',' << static_cast<int>(s.kind);
        if (with_orders) {
            for (const auto& s : trace.rows[r]) os << ',' << s.order;
        }
        os << '\n';
    }
}

Json report_to_json(const CellResult& r) {
    Json j;
    j["cell"] = r.cell.index;
    Json coords = Json::object();
    for (const auto& [key, value] : r.cell.coords) coords[key] = value;
    j["coords"] = coords;
    j["params"] = r.cell.params;
    j["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) {
        j["error"] = r.error;
        return j;
    }
    const auto& c = r.report.counters;
    Json hist = Json::object();
    for (const auto& [dim, count] : c.lu_dim_histogram) hist[std::to_string(dim)] = count;
    j["method"] = r.report.method;
    j["steps"] = r.report.steps;
    j["counters"] = {
        {"f_internal_component_evals", c.f_internal_component_evals},
        {"transistor_evals", c.device_evals()},
        {"newton_iterations", c.newton_iterations},
        {"newton_nonmonotone", c.newton_nonmonotone},
        {"lu_factorizations", c.lu_factorizations},
        {"lu_dim_histogram", hist},
        {"skipped_component_steps", c.skipped_component_steps},
    };
    j["occupancy"] = {
        {"active", r.report.occupancy[0]},
        {"semi", r.report.occupancy[1]},
        {"inactive", r.report.occupancy[2]},
    };
    Json timings = {{"wall_seconds", r.report.wall_seconds}};
    if (r.reference_wall_seconds) timings["reference_wall_seconds"] = *r.reference_wall_seconds;
    if (r.speedup) timings["speedup"] = *r.speedup;
    j["timings"] = timings;
    if (r.deviation) {
        j["deviation"] = {{"average", r.deviation->average}, {"max", r.deviation->maximum},
                          {"steps", r.deviation->steps}};
    }
    return j;
}

std::optional<double> metric(const CellResult& r, const std::string& name) {
    if (!r.ok) return std::nullopt;
    const auto& c = r.report.counters;
    if (name == "transistor_evals") return static_cast<double>(c.device_evals());
    if (name == "f_evals") return static_cast<double>(c.f_internal_component_evals);
    if (name == "newton_iterations") return static_cast<double>(c.newton_iterations);
    if (name == "lu_factorizations") return static_cast<double>(c.lu_factorizations);
    if (name == "wall_seconds") return r.report.wall_seconds;
    if (name == "speedup") return r.speedup;
    if (name == "deviation_max") return r.deviation ? std::optional(r.deviation->maximum) : std::nullopt;
    if (name == "deviation_avg") return r.deviation ? std::optional(r.deviation->average) : std::nullopt;
    throw ConfigError("unknown metric '" + name + "'");
}

void write_summary_csv(std::ostream& os, const ExperimentResult& result, bool with_timings) {
    std::vector<std::string> keys;
    if (!result.cells.empty()) {
        for (const auto& [key, value] : result.cells.front().cell.coords) keys.push_back(key);
    }
    os << "cell";
    for (const auto& k : keys) os << ',' << k;
    os << ",method,status,steps,transistor_evals,f_internal_component_evals,newton_iterations,"
          "lu_factorizations,skipped_component_steps,deviation_avg,deviation_max";
    if (with_timings) os << ",wall_seconds,reference_wall_seconds,speedup";
    os << ",error\n";
    os << std::setprecision(17);
    for (const auto& r : result.cells) {
        os << r.cell.index;
        for (const auto& [key, value] : r.cell.coords) os << ',' << csv_field(format_value(value));
        const auto& c = r.report.counters;
        os << ',' << r.report.method << ',' << (r.ok ? "ok" : "failed");
        if (r.ok) {
            os << ',' << r.report.steps << ',' << c.device_evals() << ',' << c.f_internal_component_evals << ','
               << c.newton_iterations << ',' << c.lu_factorizations << ',' << c.skipped_component_steps;
        } else {
            os << ",,,,,,";
        }
        if (r.deviation) {
            os << ',' << r.deviation->average << ',' << r.deviation->maximum;
        } else {
            os << ",,";
        }
        if (with_timings) {
            os << ',' << (r.ok ? std::to_string(r.report.wall_seconds) : "") << ','
               << (r.reference_wall_seconds ? std::to_string(*r.reference_wall_seconds) : "") << ','
               << (r.speedup ? std::to_string(*r.speedup) : "");
        }
        os << ',' << csv_field(r.error) << '\n';
    }
}

void write_pivot_table(std::ostream& os, const ExperimentResult& result, const TableSpec& spec) {
    std::vector<std::string> rows, cols;
    std::map<std::pair<std::string, std::string>, std::string> cell;
    auto coord = [](const CellResult& r, const std::string& key) -> std::string {
        for (const auto& [k, v] : r.cell.coords) {
            if (k == key) return format_value(v);
        }
        const auto it = r.cell.params.find(key);
        return it == r.cell.params.end() ? std::string("-") : format_value(*it);
    };
    for (const auto& r : result.cells) {
        const std::string rk = coord(r, spec.rows);
        const std::string ck = spec.cols.empty() ? std::string("value") : coord(r, spec.cols);
        if (std::find(rows.begin(), rows.end(), rk) == rows.end()) rows.push_back(rk);
        if (std::find(cols.begin(), cols.end(), ck) == cols.end()) cols.push_back(ck);
        std::string text = "failed";
        if (const auto v = metric(r, spec.value)) {
            std::ostringstream s;
            if (spec.value == "transistor_evals" || spec.value == "f_evals" || spec.value == "newton_iterations" ||
                spec.value == "lu_factorizations") {
                s << static_cast<std::uint64_t>(*v);
            } else {
                s << std::setprecision(6) << *v;
            }
            text = s.str();
        } else if (r.ok) {
            text = "-";
        }
        cell[{rk, ck}] = text;
    }
    os << "| " << spec.rows << (spec.cols.empty() ? "" : " \\ " + spec.cols);
    for (const auto& c : cols) os << " | " << c;
    os << " |\n|---";
    for (std::size_t k = 0; k < cols.size(); ++k) os << "|---";
    os << "|\n";
    for (const auto& rk : rows) {
        os << "| " << rk;
        for (const auto& ck : cols) {
            const auto it = cell.find({rk, ck});
            os << " | " << (it == cell.end() ? "" : it->second);
        }
        os << " |\n";
    }
}

}  // namespace sigflow
