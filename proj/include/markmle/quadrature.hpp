#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "markmle/errors.hpp"

namespace markmle {

struct QuadratureConfig {
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    int max_subdivisions = 2000;
};

using Integrand = std::function<double(double)>;

// Adaptive Clenshaw-Curtis integral of f over [a, b]. Interior breakpoints
// (kinks, jumps of f) start as panel boundaries. Throws
// NumericError::QuadratureFailure when the error budget is not met.
double integrate(const Integrand& f, double a, double b, const QuadratureConfig& cfg,
                 std::span<const double> breakpoints = {});

/// Piecewise Chebyshev representation of f on [a, b] and of its running
/// integral x -> int_a^x f. Built once, queried in O(degree).
class ChebTable {
public:
    static constexpr int kDegree = 24;

    ChebTable() = default;
    ChebTable(const Integrand& f, double a, double b, const QuadratureConfig& cfg,
              std::span<const double> breakpoints = {});

    double lower() const noexcept { return a_; }
    double upper() const noexcept { return b_; }
    double total() const noexcept { return panels_.empty() ? 0.0 : panels_.back().offset + panels_.back().integral; }

    // int_a^x f, for x clamped to [a, b].
    double integral(double x) const;
    // Interpolated f(x).
    double value(double x) const;
    std::size_t panel_count() const noexcept { return panels_.size(); }

private:
    struct Panel {
        double lo, hi;
        std::array<double, kDegree + 1> coef;      // f on the panel
        std::array<double, kDegree + 2> anti;      // int_lo^x f, already scaled
        double integral;
        double offset;                              // int_a^lo f
    };
    const Panel& find(double x) const;

    double a_ = 0.0, b_ = 0.0;
    std::vector<Panel> panels_;
};

}  // namespace markmle
