#pragma once

// =============================================================================
// sigflow - Circuit benchmark models
// =============================================================================
//   ShichmanHodgesParams / shichman_hodges_*   level-1 MOSFET drain current
//   PwlSource / make_pulse_train               piecewise-linear excitation
//   InverterChain                              CMOS inverter chain as a TdOde
// =============================================================================

#include "sigflow/tdode.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace sigflow {

enum class Polarity { Nmos, Pmos };

struct ShichmanHodgesParams {
    double vt = 0.75;      ///< threshold voltage magnitude
    double beta = 2.2;     ///< transconductance
    double lambda = 0.3;   ///< channel-length modulation
    Polarity polarity = Polarity::Nmos;
};

/// Drain-source current and its partial derivatives with respect to the gate
/// and drain voltages.
struct DeviceEval {
    double current = 0.0;
    double d_gate = 0.0;
    double d_drain = 0.0;
};

/// Drain-source current I_ds for gate, drain and source voltages.
///
/// nMOS: I_ds = N(v_g - v_s, v_d - v_s); pMOS: I_ds = -N(v_s - v_g, v_s - v_d),
/// where N is the level-1 nMOS characteristic (cutoff, linear, saturation)
/// extended to negative v_ds by source/drain exchange.
///
/// `complexity` adds that many dummy transcendental evaluations whose result
/// is folded in with weight zero; the returned value does not depend on it.
[[nodiscard]] double shichman_hodges_current(const ShichmanHodgesParams& p, double v_gate,
                                             double v_drain, double v_source, int complexity = 0);

[[nodiscard]] DeviceEval shichman_hodges_eval(const ShichmanHodgesParams& p, double v_gate,
                                              double v_drain, double v_source, int complexity = 0);

// =============================================================================
// Piecewise-linear source
// =============================================================================

class PwlSource {
public:
    using Point = std::pair<double, double>;  // (t, value)

    /// Breakpoints must be non-empty with strictly increasing times. With a
    /// period, the pattern on [t_first, t_first + period) repeats for
    /// t >= t_first; the breakpoints must lie within one period. Before the
    /// first and after the last breakpoint the value is held constant.
    explicit PwlSource(std::vector<Point> points, std::optional<double> period = std::nullopt);

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] const std::vector<Point>& points() const { return points_; }
    [[nodiscard]] std::optional<double> period() const { return period_; }

private:
    std::vector<Point> points_;
    std::optional<double> period_;
};

[[nodiscard]] inline double pwl_eval(const PwlSource& source, double t) { return source(t); }

/// Repeating pulse: `v_low` until `delay`, then rise over `rise`, fall over
/// `fall` and hold `v_low` for `delta_T`. Period rise + fall + delta_T.
[[nodiscard]] PwlSource make_pulse_train(double delta_T, double v_low, double v_high, double rise,
                                         double fall, double delay = 1.0);

// =============================================================================
// Inverter chain
// =============================================================================

struct InverterChainParams {
    Index n = 100;          ///< number of inverters N
    double capacitance = 1.0;
    double vdd = 5.0;
    ShichmanHodgesParams nmos{};
    ShichmanHodgesParams pmos{.polarity = Polarity::Pmos};
    int complexity = 0;
    PwlSource input = make_pulse_train(10.0, 0.0, 5.0, 1.0, 1.0);
};

/// x_E = (ground, V_dd, V_s(t)), x_I = node voltages v_1..v_N. Node i is
/// driven by node i-1 (the source for the first node):
///   C dv_i/dt = -(I_n(v_{i-1}, v_i, gnd) + I_p(v_{i-1}, v_i, V_dd)).
/// One component evaluation costs two transistor-model evaluations.
class InverterChain final : public TdOde {
public:
    explicit InverterChain(InverterChainParams params);

    [[nodiscard]] Index n_external() const override { return 3; }
    [[nodiscard]] Index n_internal() const override { return params_.n; }
    void eval_external(double t, std::span<double> out) const override;
    using TdOde::eval_internal;
    void eval_internal(std::span<const double> x_e, std::span<const double> x_i,
                       std::span<double> out, std::span<const Index> rows,
                       ModelTally& tally) const override;
    [[nodiscard]] bool has_jacobian() const override { return true; }
    void eval_internal_jacobian(std::span<const double> x_e, std::span<const double> x_i,
                                std::span<double> out, Eigen::MatrixXd& jac,
                                std::span<const Index> rows, ModelTally& tally) const override;
    [[nodiscard]] const std::vector<IndexList>& sparsity() const override { return sparsity_; }
    [[nodiscard]] std::uint64_t devices_per_component() const override { return 2; }

    [[nodiscard]] const InverterChainParams& params() const { return params_; }

private:
    InverterChainParams params_;
    std::vector<IndexList> sparsity_;
};

/// Throws std::invalid_argument for N = 0, C <= 0 or beta <= 0.
[[nodiscard]] InverterChain build_inverter_chain(InverterChainParams params);

/// Full state at t: externals from the sources, nodes at alternating logic
/// levels starting with the inverse of the input level.
[[nodiscard]] std::vector<double> logic_initial_state(const InverterChain& chain, double t);

/// DC operating point of the nodes for externals frozen at time t, by damped
/// Newton iteration from `guess` (full state). Returns the full state.
/// Throws NumericError when it does not reach `tolerance` on ||f_I||_inf.
[[nodiscard]] std::vector<double> dc_operating_point(const InverterChain& chain, double t,
                                                     std::span<const double> guess,
                                                     double tolerance = 1e-12,
                                                     int max_iterations = 200);

}  // namespace sigflow
