#include "sigflow/tableau.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sigflow {

ButcherTableau::ButcherTableau(std::string name, std::vector<double> a, std::vector<double> b,
                               std::vector<double> c)
    : name_(std::move(name)), s_(static_cast<int>(b.size())), a_(std::move(a)), b_(std::move(b)),
      c_(std::move(c)) {
    const auto s = static_cast<std::size_t>(s_);
    if (s_ < 1) throw std::invalid_argument("tableau " + name_ + ": needs at least one stage");
    if (a_.size() != s * s || c_.size() != s) {
        throw std::invalid_argument("tableau " + name_ + ": inconsistent coefficient sizes");
    }
    for (int q = 0; q < s_; ++q) {
        for (int r = q; r < s_; ++r) {
            if (a_[static_cast<std::size_t>(q * s_ + r)] != 0.0) {
                throw std::invalid_argument("tableau " + name_ + ": A is not strictly lower triangular");
            }
        }
    }
    if (c_[0] != 0.0) throw std::invalid_argument("tableau " + name_ + ": c_1 must be 0");
    const double sum_b = std::accumulate(b_.begin(), b_.end(), 0.0);
    if (std::abs(sum_b - 1.0) > 1e-12) {
        throw std::invalid_argument("tableau " + name_ + ": weights do not sum to 1");
    }
}

namespace tableaus {

ButcherTableau euler() { return {"euler", {0.0}, {1.0}, {0.0}}; }

ButcherTableau heun() {
    return {"heun", {0.0, 0.0, 1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}};
}

ButcherTableau midpoint() {
    return {"midpoint", {0.0, 0.0, 0.5, 0.0}, {0.0, 1.0}, {0.0, 0.5}};
}

ButcherTableau rk4() {
    return {"rk4",
            {0.0, 0.0, 0.0, 0.0,
             0.5, 0.0, 0.0, 0.0,
             0.0, 0.5, 0.0, 0.0,
             0.0, 0.0, 1.0, 0.0},
            {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0},
            {0.0, 0.5, 0.5, 1.0}};
}

ButcherTableau rk38() {
    return {"rk38",
            {0.0, 0.0, 0.0, 0.0,
             1.0 / 3.0, 0.0, 0.0, 0.0,
             -1.0 / 3.0, 1.0, 0.0, 0.0,
             1.0, -1.0, 1.0, 0.0},
            {0.125, 0.375, 0.375, 0.125},
            {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}};
}

ButcherTableau by_name(const std::string& name) {
    if (name == "euler") return euler();
    if (name == "heun") return heun();
    if (name == "midpoint") return midpoint();
    if (name == "rk4") return rk4();
    if (name == "rk38") return rk38();
    throw std::invalid_argument("unknown tableau: " + name);
}

}  // namespace tableaus
}  // namespace sigflow
