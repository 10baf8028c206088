#pragma once

#include <cstddef>
#include <vector>

namespace dfc {

// Classical fixed-step 4th-order Runge-Kutta over a flat state vector.
// Deterministic by construction: no adaptivity, fixed evaluation order.
//
// The derivative callback has signature f(double t, std::vector<double>& y,
// std::vector<double>& dy). The stage vector is passed mutable so the
// caller may project exogenously driven coordinates (e.g. agents on a
// prescribed orbit) onto their exact stage-time values before evaluating.
class Rk4 {
  public:
    explicit Rk4(std::size_t dim)
        : k1_(dim), k2_(dim), k3_(dim), k4_(dim), stage_(dim) {}

    template <typename Deriv>
    void step(double t, double h, std::vector<double>& y, Deriv&& f) {
        const std::size_t n = y.size();
        stage_ = y;
        f(t, stage_, k1_);
        for (std::size_t i = 0; i < n; ++i) stage_[i] = y[i] + 0.5 * h * k1_[i];
        f(t + 0.5 * h, stage_, k2_);
        for (std::size_t i = 0; i < n; ++i) stage_[i] = y[i] + 0.5 * h * k2_[i];
        f(t + 0.5 * h, stage_, k3_);
        for (std::size_t i = 0; i < n; ++i) stage_[i] = y[i] + h * k3_[i];
        f(t + h, stage_, k4_);
        for (std::size_t i = 0; i < n; ++i)
            y[i] += h / 6.0 * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
    }

  private:
    std::vector<double> k1_, k2_, k3_, k4_, stage_;
};

}  // namespace dfc
