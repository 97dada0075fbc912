#include "sigflow/test_systems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>

namespace sigflow {

FunctionalOde make_quantized_network(QuantizedNetworkParams params) {
    const Index n = params.inputs.size();
    if (n == 0) throw std::invalid_argument("quantized network: needs at least one node");
    if (!params.signal) throw std::invalid_argument("quantized network: missing signal");
    std::vector<IndexList> sparsity(n);
    for (Index i = 0; i < n; ++i) {
        if (params.inputs[i].empty()) throw std::invalid_argument("quantized network: node without inputs");
        sparsity[i] = params.inputs[i];
        sparsity[i].push_back(1 + i);
        std::sort(sparsity[i].begin(), sparsity[i].end());
        sparsity[i].erase(std::unique(sparsity[i].begin(), sparsity[i].end()), sparsity[i].end());
    }
    auto p = std::make_shared<const QuantizedNetworkParams>(std::move(params));
    auto external = [p](double t, std::span<double> out) { out[0] = p->signal(t); };
    auto component = [p](Index i, std::span<const double> x_e, std::span<const double> x_i) {
        double target = -std::numeric_limits<double>::infinity();
        for (Index j : p->inputs[i]) target = std::max(target, j == 0 ? x_e[0] : x_i[j - 1]);
        const double d = target - x_i[i];
        if (std::abs(d) <= p->dead_zone) return 0.0;
        return d > 0.0 ? p->rate : -p->rate;
    };
    return FunctionalOde(1, n, std::move(external), std::move(component), std::move(sparsity));
}

std::vector<IndexList> quantized_chain_inputs(Index n, Index branches) {
    std::vector<IndexList> inputs(n + branches);
    for (Index i = 0; i < n; ++i) inputs[i] = {i};  // previous node, or the signal for i = 0
    const Index tap = 1 + n / 2;
    for (Index b = 0; b < branches; ++b) inputs[n + b] = {b == 0 ? tap : 1 + n + b - 1};
    return inputs;
}

std::function<double(double)> square_wave(double start, double width, double period, double low,
                                          double high) {
    if (!(period > 0.0) || !(width >= 0.0) || width > period) {
        throw std::invalid_argument("square wave: need 0 <= width <= period, period > 0");
    }
    return [=](double t) {
        if (t < start) return low;
        return std::fmod(t - start, period) < width ? high : low;
    };
}

namespace {

struct RandomNetwork {
    std::vector<double> decay, drive;
    std::vector<std::vector<std::pair<Index, double>>> weights;  // (internal j, w_ij)
};

}  // namespace

FunctionalOde make_random_network(Index n_internal, std::uint64_t seed, double density) {
    if (n_internal == 0) throw std::invalid_argument("random network: needs at least one node");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto net = std::make_shared<RandomNetwork>();
    net->decay.resize(n_internal);
    net->drive.resize(n_internal);
    net->weights.resize(n_internal);
    std::vector<IndexList> sparsity(n_internal);
    for (Index i = 0; i < n_internal; ++i) {
        net->decay[i] = 0.5 + 1.5 * unit(rng);
        net->drive[i] = unit(rng) < 0.5 ? 0.0 : 2.0 * unit(rng) - 1.0;
        for (Index j = 0; j < n_internal; ++j) {
            if (j == i || unit(rng) < density) net->weights[i].emplace_back(j, 4.0 * unit(rng) - 2.0);
        }
        if (net->drive[i] != 0.0) sparsity[i].push_back(0);
        for (const auto& [j, w] : net->weights[i]) sparsity[i].push_back(1 + j);
    }
    auto external = [](double t, std::span<double> out) { out[0] = std::sin(t); };
    auto component = [net](Index i, std::span<const double> x_e, std::span<const double> x_i) {
        double f = -net->decay[i] * x_i[i];
        if (net->drive[i] != 0.0) f += net->drive[i] * x_e[0];
        for (const auto& [j, w] : net->weights[i]) f += w * std::tanh(x_i[j]);
        return f;
    };
    auto partial = [net](Index i, Index j, std::span<const double>, std::span<const double> x_i) {
        double d = i == j ? -net->decay[i] : 0.0;
        for (const auto& [k, w] : net->weights[i]) {
            if (k == j) {
                const double th = std::tanh(x_i[j]);
                d += w * (1.0 - th * th);
            }
        }
        return d;
    };
    return FunctionalOde(1, n_internal, std::move(external), std::move(component), std::move(sparsity),
                         FunctionalOde::PartialFn(std::move(partial)));
}

}  // namespace sigflow
