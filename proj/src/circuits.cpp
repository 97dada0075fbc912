#include "sigflow/circuits.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigflow {

namespace {

// Level-1 nMOS characteristic N(u, w) for u = v_gs, w = v_ds and its partials.
DeviceEval nmos_characteristic(double vt, double beta, double lambda, double u, double w) {
    if (w < 0.0) {
        // source and drain exchange roles: N(u, w) = -N(u - w, -w)
        const DeviceEval r = nmos_characteristic(vt, beta, lambda, u - w, -w);
        return {-r.current, -r.d_gate, r.d_gate + r.d_drain};
    }
    const double vov = u - vt;
    if (vov <= 0.0) return {};
    const double clm = 1.0 + lambda * w;
    if (w < vov) {
        const double core = vov * w - 0.5 * w * w;
        return {beta * core * clm, beta * w * clm, beta * (vov - w) * clm + lambda * beta * core};
    }
    const double core = 0.5 * vov * vov;
    return {beta * core * clm, beta * vov * clm, lambda * beta * core};
}

double dummy_work(double a, double b, int complexity) {
    double junk = 0.0;
    for (int k = 0; k < complexity; ++k) {
        junk += std::sin(a + 0.1 * k) * std::cos(b - 0.05 * k) + std::exp(-std::abs(a * b) - k);
    }
    return junk;
}

}  // namespace

DeviceEval shichman_hodges_eval(const ShichmanHodgesParams& p, double v_gate, double v_drain,
                                double v_source, int complexity) {
    DeviceEval r;
    if (p.polarity == Polarity::Nmos) {
        r = nmos_characteristic(p.vt, p.beta, p.lambda, v_gate - v_source, v_drain - v_source);
    } else {
        const DeviceEval n = nmos_characteristic(p.vt, p.beta, p.lambda, v_source - v_gate, v_source - v_drain);
        r = {-n.current, n.d_gate, n.d_drain};
    }
    if (complexity > 0) {
        // x - (+0.0) is the identity for every x, including -0.0
        r.current = r.current - 0.0 * std::abs(dummy_work(v_gate, v_drain, complexity));
    }
    return r;
}

double shichman_hodges_current(const ShichmanHodgesParams& p, double v_gate, double v_drain,
                               double v_source, int complexity) {
    return shichman_hodges_eval(p, v_gate, v_drain, v_source, complexity).current;
}

// -----------------------------------------------------------------------------
// PwlSource
// -----------------------------------------------------------------------------

PwlSource::PwlSource(std::vector<Point> points, std::optional<double> period)
    : points_(std::move(points)), period_(period) {
    if (points_.empty()) throw std::invalid_argument("pwl: needs at least one breakpoint");
    for (std::size_t k = 0; k < points_.size(); ++k) {
        if (!std::isfinite(points_[k].first) || !std::isfinite(points_[k].second)) {
            throw std::invalid_argument("pwl: breakpoints must be finite");
        }
        if (k > 0 && !(points_[k].first > points_[k - 1].first)) {
            throw std::invalid_argument("pwl: breakpoint times must be strictly increasing");
        }
    }
    if (period_) {
        if (!(*period_ > 0.0) || !std::isfinite(*period_)) throw std::invalid_argument("pwl: period must be positive");
        if (points_.back().first - points_.front().first > *period_) {
            throw std::invalid_argument("pwl: breakpoints span more than one period");
        }
    }
}

double PwlSource::operator()(double t) const {
    const double t_first = points_.front().first;
    if (t <= t_first) return points_.front().second;
    double tau = t;
    if (period_) tau = t_first + std::fmod(t - t_first, *period_);
    if (tau >= points_.back().first) return points_.back().second;
    const auto it = std::upper_bound(points_.begin(), points_.end(), tau,
                                     [](double v, const Point& p) { return v < p.first; });
    const Point& hi = *it;
    const Point& lo = *(it - 1);
    return lo.second + (hi.second - lo.second) * ((tau - lo.first) / (hi.first - lo.first));
}

PwlSource make_pulse_train(double delta_T, double v_low, double v_high, double rise, double fall,
                           double delay) {
    if (!(rise > 0.0) || !(fall > 0.0)) throw std::invalid_argument("pulse: rise and fall must be positive");
    if (!(delta_T >= 0.0)) throw std::invalid_argument("pulse: delta_T must be non-negative");
    return PwlSource({{delay, v_low}, {delay + rise, v_high}, {delay + rise + fall, v_low}},
                     rise + fall + delta_T);
}

// -----------------------------------------------------------------------------
// InverterChain
// -----------------------------------------------------------------------------

InverterChain::InverterChain(InverterChainParams params) : params_(std::move(params)) {
    if (params_.n == 0) throw std::invalid_argument("inverter chain: N must be at least 1");
    if (!(params_.capacitance > 0.0)) throw std::invalid_argument("inverter chain: C must be positive");
    if (!(params_.nmos.beta > 0.0) || !(params_.pmos.beta > 0.0)) {
        throw std::invalid_argument("inverter chain: beta must be positive");
    }
    if (params_.complexity < 0) throw std::invalid_argument("inverter chain: complexity must be >= 0");
    params_.nmos.polarity = Polarity::Nmos;
    params_.pmos.polarity = Polarity::Pmos;
    sparsity_.resize(params_.n);
    sparsity_[0] = {0, 1, 2, 3};
    for (Index i = 1; i < params_.n; ++i) sparsity_[i] = {0, 1, 3 + i - 1, 3 + i};
}

void InverterChain::eval_external(double t, std::span<double> out) const {
    out[0] = 0.0;
    out[1] = params_.vdd;
    out[2] = params_.input(t);
}

void InverterChain::eval_internal(std::span<const double> x_e, std::span<const double> x_i,
                                  std::span<double> out, std::span<const Index> rows,
                                  ModelTally& tally) const {
    const double gnd = x_e[0];
    const double vdd = x_e[1];
    for (Index i : rows) {
        const double vin = i == 0 ? x_e[2] : x_i[i - 1];
        const double in = shichman_hodges_current(params_.nmos, vin, x_i[i], gnd, params_.complexity);
        const double ip = shichman_hodges_current(params_.pmos, vin, x_i[i], vdd, params_.complexity);
        out[i] = -(in + ip) / params_.capacitance;
        tally.touch(i, 2);
    }
}

void InverterChain::eval_internal_jacobian(std::span<const double> x_e, std::span<const double> x_i,
                                           std::span<double> out, Eigen::MatrixXd& jac,
                                           std::span<const Index> rows, ModelTally& tally) const {
    const double gnd = x_e[0];
    const double vdd = x_e[1];
    const double c = params_.capacitance;
    const auto k = static_cast<Eigen::Index>(rows.size());
    jac.setZero(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        const Index i = rows[static_cast<std::size_t>(a)];
        const double vin = i == 0 ? x_e[2] : x_i[i - 1];
        const DeviceEval n = shichman_hodges_eval(params_.nmos, vin, x_i[i], gnd, params_.complexity);
        const DeviceEval p = shichman_hodges_eval(params_.pmos, vin, x_i[i], vdd, params_.complexity);
        out[i] = -(n.current + p.current) / c;
        tally.touch(i, 2);
        jac(a, a) = -(n.d_drain + p.d_drain) / c;
        if (i > 0 && a > 0 && rows[static_cast<std::size_t>(a - 1)] == i - 1) {
            jac(a, a - 1) = -(n.d_gate + p.d_gate) / c;
        }
    }
}

InverterChain build_inverter_chain(InverterChainParams params) { return InverterChain(std::move(params)); }

std::vector<double> logic_initial_state(const InverterChain& chain, double t) {
    std::vector<double> x(chain.size());
    chain.eval_external(t, std::span(x).first(3));
    const double vdd = chain.params().vdd;
    bool high = x[2] < 0.5 * vdd;
    for (Index i = 0; i < chain.n_internal(); ++i) {
        x[3 + i] = high ? vdd : 0.0;
        high = !high;
    }
    return x;
}

std::vector<double> dc_operating_point(const InverterChain& chain, double t, std::span<const double> guess,
                                       double tolerance, int max_iterations) {
    if (guess.size() != chain.size()) throw std::invalid_argument("dc: guess has wrong size");
    const Index ni = chain.n_internal();
    std::vector<double> x(guess.begin(), guess.end());
    chain.eval_external(t, std::span(x).first(3));
    const auto xe = std::span<const double>(x).first(3);
    std::vector<double> xi(x.begin() + 3, x.end());
    std::vector<double> f(ni), f_trial(ni), trial(ni);
    IndexList all(ni);
    for (Index i = 0; i < ni; ++i) all[i] = i;
    ModelTally tally;
    Eigen::MatrixXd jac;

    auto norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        return m;
    };

    for (int it = 0; it <= max_iterations; ++it) {
        chain.eval_internal_jacobian(xe, xi, f, jac, all, tally);
        const double res = norm(f);
        if (!std::isfinite(res)) throw NumericError("dc: non-finite residual");
        if (res <= tolerance) {
            std::copy(xi.begin(), xi.end(), x.begin() + 3);
            return x;
        }
        // small negative diagonal shift
        jac.diagonal().array() -= 1e-12;
        Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(ni));
        const Eigen::VectorXd dz = Eigen::PartialPivLU<Eigen::MatrixXd>(jac).solve(-fv);
        double step = std::min(1.0, 0.5 * chain.params().vdd / std::max(dz.cwiseAbs().maxCoeff(), 1e-300));
        for (int back = 0; back < 30; ++back, step *= 0.5) {
            for (Index i = 0; i < ni; ++i) trial[i] = xi[i] + step * dz(static_cast<Eigen::Index>(i));
            chain.eval_internal(xe, trial, f_trial, all, tally);
            if (norm(f_trial) < res) break;
        }
        xi = trial;
    }
    throw NumericError("dc: damped Newton did not converge");
}

}  // namespace sigflow
