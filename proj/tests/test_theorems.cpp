#include "catch_amalgamated.hpp"

#include "sigflow/integrate.hpp"
#include "sigflow/test_systems.hpp"

#include <cstring>

using namespace sigflow;

namespace {

bool bitwise_equal(const Trajectory& a, const Trajectory& b) {
    if (a.t.size() != b.t.size()) return false;
    for (std::size_t r = 0; r < a.t.size(); ++r) {
        if (a.x[r].size() != b.x[r].size()) return false;
        if (std::memcmp(a.x[r].data(), b.x[r].data(), a.x[r].size() * sizeof(double)) != 0) return false;
    }
    return true;
}

struct Comparison {
    bool equal = false;
    std::uint64_t skipped = 0;
    std::uint64_t evals_plain = 0;
    std::uint64_t evals_skipping = 0;
};

Comparison compare(const TdOde& ode, std::span<const double> x0, IntegrationConfig cfg, Method method) {
    const auto g = build_dependency_graph(ode);
    cfg.method = Method::Rk;
    const auto plain = integrate(ode, g, x0, cfg);
    cfg.method = method;
    const auto skipping = integrate(ode, g, x0, cfg);
    return {bitwise_equal(plain.trajectory, skipping.trajectory), skipping.report.counters.skipped_component_steps,
            plain.report.counters.f_internal_component_evals, skipping.report.counters.f_internal_component_evals};
}

FunctionalOde pulsed_network() {
    QuantizedNetworkParams p;
    p.inputs = quantized_chain_inputs(12, 3);
    p.signal = square_wave(1.03, 5.0, 20.0, 0.0, 4.0);
    return make_quantized_network(std::move(p));
}

FunctionalOde periodic_network(double period) {
    QuantizedNetworkParams p;
    p.inputs = quantized_chain_inputs(8, 2);
    p.signal = square_wave(0.0, period / 2, period, 0.0, 4.0);
    return make_quantized_network(std::move(p));
}

}  // namespace

TEST_CASE("Exact-mode sfRK equals RK bitwise on dead-zone networks", "[theorem][latency]") {
    const auto ode = pulsed_network();
    std::vector<double> x0(ode.size(), 0.0);
    for (const char* tab : {"euler", "heun", "midpoint", "rk4", "rk38"}) {
        IntegrationConfig cfg;
        cfg.tableau = tab;
        cfg.h = 0.125;
        cfg.t_end = 250.0;  // 2000 steps
        cfg.epsilon = 0.0;
        cfg.skip_order = SkipOrder::Exact;
        const auto r = compare(ode, x0, cfg, Method::SfRk);
        INFO(tab << ": skipped " << r.skipped << ", evals " << r.evals_skipping << " vs " << r.evals_plain);
        CHECK(r.equal);
        CHECK(r.skipped > 0);
        CHECK(r.evals_skipping < r.evals_plain);
    }
}

TEST_CASE("Exact-mode sfpRK equals RK bitwise on periodic networks", "[theorem][periodicity]") {
    const double h = 0.125;
    const Index p = 32;
    const auto ode = periodic_network(static_cast<double>(p) * h);
    std::vector<double> x0(ode.size(), 0.0);
    for (const char* tab : {"euler", "heun", "midpoint", "rk4", "rk38"}) {
        IntegrationConfig cfg;
        cfg.tableau = tab;
        cfg.h = h;
        cfg.t_end = 150.0;  // 1200 steps
        cfg.epsilon = 0.0;
        cfg.skip_order = SkipOrder::Exact;
        cfg.period_steps = p;
        const auto r = compare(ode, x0, cfg, Method::SfpRk);
        INFO(tab << ": skipped " << r.skipped << ", evals " << r.evals_skipping << " vs " << r.evals_plain);
        CHECK(r.equal);
        CHECK(r.skipped > 0);
    }
}

TEST_CASE("Period as long as the run never skips", "[theorem][periodicity]") {
    const auto ode = periodic_network(4.0);
    std::vector<double> x0(ode.size(), 0.0);
    IntegrationConfig cfg;
    cfg.h = 0.125;
    cfg.t_end = 50.0;
    cfg.period_steps = 400;
    const auto r = compare(ode, x0, cfg, Method::SfpRk);
    CHECK(r.equal);
    CHECK(r.skipped == 0);
    CHECK(r.evals_skipping == r.evals_plain);
}

TEST_CASE("Exactly quiescent suffix leaves sfRK identical to RK", "[theorem][latency]") {
    // nodes far down the chain never see the pulse within the horizon
    QuantizedNetworkParams p;
    p.inputs = quantized_chain_inputs(40);
    p.signal = square_wave(0.51, 100.0, 200.0, 0.0, 4.0);
    const auto ode = make_quantized_network(std::move(p));
    std::vector<double> x0(ode.size(), 0.0);
    IntegrationConfig cfg;
    cfg.h = 0.125;
    cfg.t_end = 125.0;
    cfg.epsilon = 0.0;
    cfg.skip_order = SkipOrder::Exact;
    const auto r = compare(ode, x0, cfg, Method::SfRk);
    CHECK(r.equal);
    CHECK(r.skipped > 0);
}

TEST_CASE("Practical mode on dead-zone networks", "[theorem][latency]") {
    const auto ode = pulsed_network();
    std::vector<double> x0(ode.size(), 0.0);
    IntegrationConfig cfg;
    cfg.h = 0.125;
    cfg.t_end = 250.0;
    cfg.epsilon = 0.0;
    const auto exact = [&] {
        auto c = cfg;
        c.skip_order = SkipOrder::Exact;
        return compare(ode, x0, c, Method::SfRk);
    }();
    const auto practical = compare(ode, x0, cfg, Method::SfRk);
    CHECK(exact.equal);
    CHECK(practical.skipped >= exact.skipped);
    CHECK(practical.evals_skipping <= exact.evals_skipping);
    // order-one skips ignore neighbours that start moving inside the step
    CHECK_FALSE(practical.equal);
}
