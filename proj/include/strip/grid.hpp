#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "strip/errors.hpp"

namespace strip {

/// Uniform 1-D grid x_i = x_min + i h, i = 0..n-1.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n)
    {
        if (n < 3)
            throw DomainError("grid needs at least 3 points");
        if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
            throw DomainError("grid requires x_min < x_max");
        h_ = (x_max - x_min) / static_cast<double>(n - 1);
    }

    /// Uniform grid of spacing close to h_target on which x = -L and x = L fall
    /// exactly halfway between two nodes, covering at least [-left, right].
    ///
    /// With nodal evaluation of the reaction the strip then occupies exactly
    /// 2L worth of cells.
    static Grid1D aligned(double half_width, double h_target, double left, double right)
    {
        if (!(h_target > 0.0))
            throw DomainError("grid spacing must be positive");
        if (!(half_width > 0.0))
            return uniform_spacing(-left, right, h_target);
        const double cells = std::max(1.0, std::round(2.0 * half_width / h_target));
        const double h = 2.0 * half_width / cells;
        const double first = -half_width + 0.5 * h;
        const auto below = static_cast<std::size_t>(std::ceil((first + left) / h));
        const auto above = static_cast<std::size_t>(std::ceil((right - first) / h));
        const double x_min = first - static_cast<double>(below) * h;
        const std::size_t n = below + above + 1;
        Grid1D g(x_min, x_min + static_cast<double>(n - 1) * h, n);
        g.h_ = h;
        return g;
    }

    /// Grid on [x_min, x_max'] with spacing exactly h, x_max' >= x_max.
    static Grid1D uniform_spacing(double x_min, double x_max, double h)
    {
        const auto cells = static_cast<std::size_t>(std::ceil((x_max - x_min) / h - 1e-9));
        Grid1D g(x_min, x_min + static_cast<double>(cells) * h, cells + 1);
        g.h_ = h;
        return g;
    }

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double node(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * h_; }

    std::vector<double> nodes() const
    {
        std::vector<double> xs(n_);
        for (std::size_t i = 0; i < n_; ++i)
            xs[i] = node(i);
        return xs;
    }

    /// Checks the truncation contract for a strip of half-width L.
    void validate_for(double half_width, double margin) const
    {
        if (!(x_min_ < -half_width - margin) || !(x_max_ > half_width + margin))
            throw DomainError("grid [" + std::to_string(x_min_) + ", " + std::to_string(x_max_) +
                              "] must extend beyond the strip by more than " + std::to_string(margin));
    }

    friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept
    {
        return a.n_ == b.n_ && a.x_min_ == b.x_min_ && a.h_ == b.h_;
    }

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double h_ = 0.0;
};

} // namespace strip
