#pragma once

#include "chemlayer/grid.hpp"
#include "chemlayer/numerics.hpp"
#include "chemlayer/traces.hpp"

#include <span>
#include <vector>

namespace chemlayer {

/// Smooth cutoff with χ(0) = 1 and support [0, 1]:
/// χ(s) = (1 − s)·exp(1 − 1/(1 − s²)) for 0 ≤ s < 1, 0 for s ≥ 1.
/// Throws ParamError for s < 0.
double chi(double s);

/// Λ(t) sampled on every solver step. Λ(0) = 0 and Λ ≤ 0 for positive traces.
struct CorrectorSeries {
    Side side = Side::left;
    double eps = 0.0;
    double alpha = 0.0;
    std::vector<double> times;
    std::vector<double> values;

    /// Linear interpolation between steps; RangeError outside [0, T].
    double value(double t) const;
    double sup() const;
    /// sup|Λ| / ε^α.
    double bound_constant() const;
};

/// Corner corrector for one side:
///   Λ(t) = −∫₀ᵗ A(s)·erfc(s/ε^α) ds − A₀·∫₀ᵗ χ(τ/ε^α)·erf(τ/ε^α) dτ,
/// with A = (φₓ^{I,0}+M)·v^{I,0} at the boundary and A₀ = (φₓ^{I,0}(x_b,0)+M)·v*.
/// Evaluated as −∫A + ∫erf(s/ε^α)(A(s) − A₀χ(s/ε^α))ds: the first integral is exact on the
/// piecewise-linear trace, the second uses a trapezoid sub-mesh with at least
/// `points_per_scale` points per ε^α. Beyond 12ε^α both integrands cancel and Λ is constant.
CorrectorSeries build_corrector(Side side, const OuterTraces& traces, double v_star, double eps, double alpha,
                                std::size_t points_per_scale = 16384);

/// Single value Λ(t) (builds the series on the same mesh up to t). RangeError for t ∉ [0, T].
double lambda(Side side, double t, const OuterTraces& traces, double v_star, double eps, double alpha);

/// Slope of log sup|Λ| against log ε. Needs at least three distinct ε (ParamError otherwise).
num::LineFit corrector_bound_check(std::span<const CorrectorSeries> series);

}  // namespace chemlayer
