#pragma once

#include "chemlayer/grid.hpp"

#include <cstddef>
#include <vector>

namespace chemlayer {

/// Outer-solution values at one boundary point, one entry per solver step.
struct BoundaryTrace {
    std::vector<double> phi_x;
    std::vector<double> phi_xx;
    std::vector<double> v;
    std::vector<double> v_x;
};

/// Boundary traces of the leading outer solution at x = 0 and x = 1.
struct OuterTraces {
    std::vector<double> times;  ///< every solver step t₀ … t_S
    double mass = 0.0;
    BoundaryTrace left;
    BoundaryTrace right;

    const BoundaryTrace& at(Side side) const { return side == Side::left ? left : right; }
    /// (φₓ^{I,0} + M) at the boundary on step n.
    double rate(Side side, std::size_t n) const { return at(side).phi_x[n] + mass; }
    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

/// Boundary traces of the first-order outer solution, one entry per solver step.
struct FirstOrderTraces {
    std::vector<double> phi_x_left, phi_x_right;
    std::vector<double> v_left, v_right;

    const std::vector<double>& phi_x(Side s) const { return s == Side::left ? phi_x_left : phi_x_right; }
    const std::vector<double>& v(Side s) const { return s == Side::left ? v_left : v_right; }
};

}  // namespace chemlayer
