#pragma once

#include <cstddef>
#include <vector>

#include "remest/errors.hpp"

namespace remest {

/// Uniform grid on [-L, L] with an odd point count, so 0 is a grid point and
/// the points mirror exactly: point(center + r) == -point(center - r) bitwise.
class SymmetricGrid {
public:
    SymmetricGrid() = default;
    SymmetricGrid(double half_width, std::size_t n_points)
        : half_width_(half_width), n_(n_points) {
        if (!(half_width > 0.0)) throw validation_error("grid half_width must be positive");
        if (n_ < 3 || n_ % 2 == 0) throw validation_error("grid n_points must be odd and >= 3");
        step_ = 2.0 * half_width_ / static_cast<double>(n_ - 1);
    }

    double half_width() const { return half_width_; }
    std::size_t size() const { return n_; }
    std::size_t center() const { return (n_ - 1) / 2; }
    std::size_t radii() const { return (n_ - 1) / 2; } // positive radii 1..radii()
    double step() const { return step_; }

    double point(std::size_t i) const {
        return (static_cast<double>(i) - static_cast<double>(center())) * step_;
    }

    bool same_as(const SymmetricGrid& other) const {
        return n_ == other.n_ && half_width_ == other.half_width_;
    }

    /// Linear interpolation of tabulated values; clamps outside [-L, L].
    double interpolate(const std::vector<double>& values, double x) const {
        if (x <= -half_width_) return values.front();
        if (x >= half_width_) return values.back();
        double u = (x + half_width_) / step_;
        auto i = static_cast<std::size_t>(u);
        if (i >= n_ - 1) i = n_ - 2;
        double frac = u - static_cast<double>(i);
        return values[i] + frac * (values[i + 1] - values[i]);
    }

    /// Value at x treating the table as cell-constant; 0 outside the cells.
    double cell_value(const std::vector<double>& values, double x) const {
        double lo = -half_width_ - 0.5 * step_;
        if (x < lo || x > half_width_ + 0.5 * step_) return 0.0;
        auto i = static_cast<std::size_t>((x - lo) / step_);
        if (i >= n_) i = n_ - 1;
        return values[i];
    }

private:
    double half_width_ = 0.0;
    std::size_t n_ = 0;
    double step_ = 0.0;
};

} // namespace remest
