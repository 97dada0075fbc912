#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sigflow {

/// Coefficients (A, b, c) of an s-stage Runge-Kutta method. Only explicit
/// tableaus are accepted: A strictly lower triangular, c_1 = 0, sum(b) = 1.
class ButcherTableau {
public:
    /// `a` is row-major s x s. Throws std::invalid_argument on violations.
    ButcherTableau(std::string name, std::vector<double> a, std::vector<double> b,
                   std::vector<double> c);

    [[nodiscard]] int stages() const { return s_; }
    [[nodiscard]] double a(int q, int r) const { return a_[static_cast<std::size_t>(q * s_ + r)]; }
    [[nodiscard]] double b(int q) const { return b_[static_cast<std::size_t>(q)]; }
    [[nodiscard]] double c(int q) const { return c_[static_cast<std::size_t>(q)]; }
    [[nodiscard]] const std::string& name() const { return name_; }

private:
    std::string name_;
    int s_;
    std::vector<double> a_, b_, c_;
};

namespace tableaus {
[[nodiscard]] ButcherTableau euler();
[[nodiscard]] ButcherTableau heun();
[[nodiscard]] ButcherTableau midpoint();
[[nodiscard]] ButcherTableau rk4();
[[nodiscard]] ButcherTableau rk38();
/// Lookup by name ("euler", "heun", "midpoint", "rk4", "rk38").
[[nodiscard]] ButcherTableau by_name(const std::string& name);
}  // namespace tableaus

}  // namespace sigflow
