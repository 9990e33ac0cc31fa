#pragma once

#include "chemlayer/grid.hpp"
#include "chemlayer/layer.hpp"
#include "chemlayer/time_field.hpp"
#include "chemlayer/transform.hpp"

#include <vector>

namespace chemlayer {

/// Solution of the reformulated system
///   φ_t = φ_xx − (φₓ+M)vₓ,  v_t = εv_xx − (φₓ+M)v,  φ = 0 and (ε > 0) v = v* at x ∈ {0, 1}.
struct FullSolution {
    double eps = 0.0;
    double v_star = 0.0;
    double mass = 0.0;
    Grid1D grid = Grid1D::uniform(16);
    TimeGrid time;
    TimeField phi;
    TimeField v;
    /// max over steps of |∫u − M| with ∫u = Σ(φ_{i+1} − φ_i) + M.
    double mass_defect = 0.0;
    /// v against [0, max(max v₀, v*)] at every node and step.
    BoundStats v_bounds;
    /// Boundary values of v and u = φₓ + M on every step (used by the ε = 0 check).
    std::vector<double> v_left, v_right, u_left, u_right;

    TimeField u() const;
};

/// Per step: φ by backward Euler in φ_xx with (φₓ+M)vₓ at the old level; then v by
/// backward Euler in εv_xx with Dirichlet v* followed by the factor exp(−(φₓ^{n+1}+M)Δt)
/// at interior nodes. For ε = 0 every node follows the exponential update.
/// Throws SolverError when ‖φₓ^{n+1}‖∞ > 10(‖φₓ^n‖∞ + M).
FullSolution solve_full(const InitialData& data, double eps, double v_star, const Grid1D& grid,
                        const TimeGrid& time);

/// max over steps and both ends of |v(x_b,t) − v₀(x_b)·exp(−∫₀ᵗu(x_b,τ)dτ)| / v₀(x_b)·exp(…),
/// with the time integral by the trapezoid rule. ParamError unless ε = 0.
double boundary_ode_check(const FullSolution& sol);

/// Distance from x = 0 at which v first crosses the midpoint between v(0,t) and v(½,t)
/// on stored level k (linear interpolation between nodes).
double half_height_width(const FullSolution& sol, std::size_t level);

}  // namespace chemlayer
