#pragma once

#include "chemlayer/correctors.hpp"
#include "chemlayer/grid.hpp"
#include "chemlayer/numerics.hpp"
#include "chemlayer/time_field.hpp"
#include "chemlayer/traces.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace chemlayer {

/// Running bounds of a field checked against [0, v*].
struct BoundStats {
    double min = 0.0;
    double max = 0.0;
    std::size_t violations = 0;  ///< node/step pairs outside [0, v*] beyond a 1e−14·v* round-off floor
    bool seen = false;

    void observe(std::span<const double> v, double upper);
};

/// Backward-Euler/Newton stepper for the leading layer problem on a half-line
///   v_t = v_zz − a(t)·v_I(t)·(eᵛ − 1) − a(t)·eᵛ·v,
/// a = φₓ^{I,0}(x_b,t)+M, v_I = v^{I,0}(x_b,t), zero initial data, v = 0 at the
/// truncation and v = v* − v_I(t) [+ Λ(t)] at the layer boundary. The right
/// layer uses the same equation in ξ ∈ [−z_max, 0].
class LeadingLayerStepper {
public:
    LeadingLayerStepper(Side side, const HalfLineGrid& grid, const OuterTraces& traces, double v_star, double dt,
                        const CorrectorSeries* corrector = nullptr);

    void step();

    std::size_t step_index() const { return n_; }
    std::span<const double> v() const { return v_; }
    const num::DiffOperator& diff() const { return D_; }
    double boundary_value(std::size_t n) const;
    std::size_t max_newton_iterations() const { return max_iters_; }
    std::size_t halvings() const { return halvings_; }

private:
    bool newton(std::span<const double> v_old, double a, double vI, double g, double dt, std::span<double> w);

    Side side_;
    const OuterTraces* traces_;
    const CorrectorSeries* corrector_;
    double v_star_;
    double dt_;
    std::size_t n_ = 0;
    num::DiffOperator D_;
    std::vector<double> v_, w_, lo_, di_, up_, res_, scratch_, half_;
    std::size_t max_iters_ = 0;
    std::size_t halvings_ = 0;
};

/// Leading (or regularized, when a corrector is supplied) layer profile.
struct LeadingLayer {
    TimeField v;
    /// φ-layer value at the layer boundary (z = 0 or ξ = 0) on every solver step.
    std::vector<double> phi_boundary;
    BoundStats bounds;
    std::size_t max_newton_iterations = 0;
    std::size_t halvings = 0;
};

LeadingLayer solve_layer_leading(Side side, const OuterTraces& traces, double v_star, const HalfLineGrid& grid,
                                 const TimeGrid& time, const CorrectorSeries* corrector = nullptr);

/// Antiderivative of f from the truncation end: left −∫_z^{z_max} f, right ∫_{−z_max}^ξ f
/// (trapezoid, zero tail beyond the truncation).
void integrate_from_far(Side side, std::span<const double> z, std::span<const double> f, std::span<double> out);

/// φ(z) = −∫_z^∞ a·(e^{v}−1)dy on the left, ∫_{−∞}^ξ a·(e^{v}−1)dy on the right, one level.
void phi_layer_profile(Side side, std::span<const double> z, std::span<const double> v, double a,
                       std::span<double> out);

/// φ-layer field from a v-layer field; `rate` holds a = φₓ^{I,0}(x_b,t)+M per stored level.
TimeField phi_layer_first(Side side, const TimeField& v, std::span<const double> rate);

/// Second-order layer pair (φ^{B,2}, v^{B,1}) or its right-side counterpart.
struct SecondOrderLayer {
    TimeField phi;    ///< φ^{B,2}
    TimeField phi_z;  ///< its derivative ψ from the inward integration
    TimeField v;      ///< v^{B,1}
    std::size_t max_sweeps = 0;
    std::size_t halvings = 0;
};

/// Per step: fixed-point iteration (at most 5 sweeps, tolerance 1e−10) between
/// (a) ψ_z = v^ε_z·ψ + F integrated inward from ψ = 0 at the truncation by the
///     trapezoid rule, φ₂ = ∫ψ pinned to 0 at the truncation, with
///     F = v^ε_z(φ₀ₓₓ·s + φ₁ₓ) + v₁_z(a + φ^ε_z) + φ^ε_z·v₀ₓ, and
/// (b) backward Euler for v₁_t − v₁_zz + (a + φ^ε_z)v₁ + φ^ε_z(v₀ₓ·s + v^{I,1})
///     + (φ₀ₓₓ·s + φ₁ₓ)v^ε + ψ(v^{I,0} + v^ε) = 0, v₁ = −v^{I,1} at the layer boundary.
/// s is the layer coordinate (z or ξ). The regularized leading layer is regenerated in
/// lockstep. A stalled iteration retries the step as two half steps, then throws SolverError.
SecondOrderLayer solve_layer_second(Side side, const HalfLineGrid& grid, const TimeGrid& time,
                                    const OuterTraces& outer, const FirstOrderTraces& first,
                                    const CorrectorSeries& corrector, double v_star);

struct GapSeries {
    std::vector<double> per_level;
    double sup = 0.0;
};

/// sup over nodes of |a − b| per stored level and overall. ParamError on mismatched shapes.
GapSeries layer_gap(const TimeField& a, const TimeField& b);

/// Every layer profile on one side, stored at the recorded time levels.
struct LayerProfileSet {
    Side side = Side::left;
    HalfLineGrid grid;
    TimeField v_lead;      ///< v^{B,0} / v^{b,0}
    TimeField phi_first;   ///< φ^{B,1} / φ^{b,1}
    TimeField v_reg;       ///< v^{B,ε} / v^{b,ε}
    TimeField phi_reg;     ///< φ^{B,ε} / φ^{b,ε}
    TimeField phi_second;  ///< φ^{B,2} / φ^{b,2}
    TimeField v_first;     ///< v^{B,1} / v^{b,1}
};

}  // namespace chemlayer
