#pragma once

// =============================================================================
// sigflow - Synthetic systems with known structure
// =============================================================================
//   QuantizedNetwork   nodes chase the maximum of their inputs at a fixed
//                      rate and stop inside a dead zone; with dyadic step
//                      sizes every value stays exactly representable, so
//                      increments are exactly zero once a node has settled
//   random network     smooth sparse network with analytic Jacobian
// =============================================================================

#include "sigflow/tdode.hpp"

#include <cstdint>
#include <functional>

namespace sigflow {

struct QuantizedNetworkParams {
    /// inputs[i]: global variable indices read by internal i besides itself
    /// (index 0 is the single external signal).
    std::vector<IndexList> inputs;
    double rate = 6.0;       ///< |f_i| when moving
    double dead_zone = 1.0;  ///< f_i = 0 when |max(inputs) - x_i| <= dead_zone
    std::function<double(double)> signal;  ///< external u(t)
};

/// f_i = rate * sign(d_i) if |d_i| > dead_zone else 0, d_i = max_j x_j - x_i.
[[nodiscard]] FunctionalOde make_quantized_network(QuantizedNetworkParams params);

/// Chain u -> x_1 -> ... -> x_n with `branches` extra nodes hanging off the
/// middle of the chain.
[[nodiscard]] std::vector<IndexList> quantized_chain_inputs(Index n, Index branches = 0);

/// Piecewise constant pulses: `high` on [start + k period, start + k period + width), else `low`.
[[nodiscard]] std::function<double(double)> square_wave(double start, double width, double period,
                                                        double low, double high);

/// Random sparse smooth network with n_E = 1 (u = sin t) and analytic
/// Jacobian: f_i = -a_i x_i + sum_j w_ij tanh(x_j) + b_i u.
/// Every internal reads itself and about `density` of the others.
[[nodiscard]] FunctionalOde make_random_network(Index n_internal, std::uint64_t seed, double density = 0.4);

}  // namespace sigflow
