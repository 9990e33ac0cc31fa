#pragma once

#include "chemlayer/grid.hpp"
#include "chemlayer/numerics.hpp"
#include "chemlayer/time_field.hpp"
#include "chemlayer/traces.hpp"
#include "chemlayer/transform.hpp"

#include <optional>
#include <span>
#include <vector>

namespace chemlayer {

/// One-step scheme for the zero-diffusion outer problem
///   φ_t = φ_xx − (φₓ+M)vₓ,  v_t = −(φₓ+M)v,  φ(0,t) = φ(1,t) = 0.
/// φ: backward Euler in φ_xx with the coupling term at the old level.
/// v: exact exponential update with the new rate φₓ^{n+1}+M.
/// Throws SolverError when min(φₓ+M) ≤ 0.
class Outer0Stepper {
public:
    Outer0Stepper(std::span<const double> x, std::span<const double> phi0, std::span<const double> v0, double mass,
                  double dt);

    void step();

    std::size_t step_index() const { return n_; }
    double time() const { return static_cast<double>(n_) * dt_; }
    std::span<const double> phi() const { return phi_; }
    std::span<const double> v() const { return v_; }
    std::span<const double> phi_x() const { return phi_x_; }
    std::span<const double> v_x() const { return v_x_; }
    /// φₓ + M at the current level.
    std::span<const double> rate() const { return rate_; }
    const num::DiffOperator& diff() const { return D_; }
    double mass() const { return mass_; }

    /// φₓ, φₓₓ, vₓ by one-sided stencils, v nodal, at the given boundary.
    void append_trace(Side side, BoundaryTrace& out) const;

private:
    void refresh_derivatives();

    num::DiffOperator D_;
    num::ImplicitDiffusion heat_;
    double mass_;
    double dt_;
    std::size_t n_ = 0;
    std::vector<double> phi_, v_, phi_x_, v_x_, rate_, rhs_;
};

/// Leading outer solution: fields at recorded levels, traces at every step.
struct OuterSolution {
    Grid1D grid = Grid1D::uniform(16);
    TimeGrid time;
    double mass = 0.0;
    std::vector<double> phi0, v0;  ///< initial data sampled on the grid
    TimeField phi;
    TimeField v;
    OuterTraces traces;
    double rate_min = 0.0;  ///< min over the run of φₓ+M (the K⁻¹ bound)
    double rate_max = 0.0;  ///< max over the run (the K bound)
    bool v_monotone = true; ///< v non-increasing in t at every node
};

OuterSolution solve_outer0(const InitialData& data, const Grid1D& grid, const TimeGrid& time);

/// Boundary trace series of a computed solution, aligned with the solver steps.
const OuterTraces& extract_traces(const OuterSolution& sol);

/// First-order outer correction.
struct FirstOrderOuter {
    TimeField phi;
    TimeField v;
    FirstOrderTraces traces;  ///< φₓ^{I,1} and v^{I,1} at both ends, every step
};

/// Solves φ₁_t = φ₁_xx − (φ₀ₓ+M)v₁ₓ − φ₁ₓv₀ₓ, v₁_t = −(φ₀ₓ+M)v₁ − φ₁ₓv₀ with zero initial data
/// and Dirichlet φ₁(0,t) = −bl_left[n], φ₁(1,t) = −bl_right[n]. The leading solution is
/// regenerated step by step from sol0's initial data. `bl_left`/`bl_right` hold one value
/// per solver step (ParamError on a length mismatch).
FirstOrderOuter solve_outer1(const OuterSolution& sol0, std::span<const double> bl_left,
                             std::span<const double> bl_right);

}  // namespace chemlayer
