#pragma once

#include "chemlayer/correctors.hpp"
#include "chemlayer/full.hpp"
#include "chemlayer/layer.hpp"
#include "chemlayer/outer.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace chemlayer {

/// Linear interpolation from one node set onto fixed target points, with the
/// brackets precomputed. Targets outside the source hull give 0 when
/// zero_extend is set and throw RangeError otherwise.
class LinearResampler {
public:
    LinearResampler(std::span<const double> source, std::span<const double> targets, bool zero_extend);
    void apply(std::span<const double> values, std::span<double> out) const;

private:
    std::vector<std::size_t> index_;
    std::vector<double> weight_;
    std::vector<char> inside_;
};

/// References to every constituent of the composite approximation for one ε.
struct Hierarchy {
    double eps = 0.0;
    double nu = 0.0;
    double v_star = 0.0;
    const OuterSolution* outer0 = nullptr;
    const FirstOrderOuter* outer1 = nullptr;
    const LayerProfileSet* left = nullptr;
    const LayerProfileSet* right = nullptr;
    const CorrectorSeries* lambda_left = nullptr;   ///< Λ₁
    const CorrectorSeries* lambda_right = nullptr;  ///< Λ₂

    /// ParamError naming the first missing constituent or a time-level mismatch.
    void validate() const;
};

/// b_φ(x, t) on stored level k:
///   −(1−x)[√ε φ^{b,ε}(−ε^{−1/2}) + ε φ^{b,2}(−ε^{−1/2})] − (1−x)e^{−x/ε^ν} ε φ^{B,2}(0)
///   − x[√ε φ^{B,ε}(ε^{−1/2}) + ε φ^{B,2}(ε^{−1/2})] − x e^{−(1−x)/ε^ν} ε φ^{b,2}(0).
double homogenizer_b_phi(const Hierarchy& h, double x, std::size_t level);

/// b_v(x, t) on stored level k:
///   (x−1)[v^{b,ε}(−ε^{−1/2}) + √ε v^{b,1}(−ε^{−1/2}) + Λ₁] − x[v^{B,ε}(ε^{−1/2}) + √ε v^{B,1}(ε^{−1/2}) + Λ₂].
double homogenizer_b_v(const Hierarchy& h, double x, std::size_t level);

struct CompositeApproximation {
    double eps = 0.0;
    TimeField Phi_a;
    TimeField V_a;
    /// max over levels and both ends of |Φᵃ| and |Vᵃ − v*|.
    double boundary_defect_phi = 0.0;
    double boundary_defect_v = 0.0;
};

/// Φᵃ = φ^{I,0} + √ε(φ^{I,1} + φ^{B,ε} + φ^{b,ε}) + ε(φ^{B,2} + φ^{b,2}) + b_φ,
/// Vᵃ = v^{I,0} + v^{B,ε} + v^{b,ε} + √ε(v^{I,1} + v^{B,1} + v^{b,1}) + b_v,
/// with layers at z = x/√ε and ξ = (x−1)/√ε, on the nodes of `grid`.
CompositeApproximation build_composite(const Hierarchy& h, const Grid1D& grid);

struct ErrorMetrics {
    double t_min = 0.0;
    double e1_sup = 0.0;        ///< sup_t ‖φ^ε − φ^{I,0}‖∞
    double e1x_weighted = 0.0;  ///< sup_{t≥t_min} t^{5/4}‖φₓ^ε − φₓ^{I,0} − (φ_z^{B,1} + φ_ξ^{b,1})‖∞
    double e2_sup = 0.0;        ///< sup_t ‖v^ε − v^{I,0} − v^{B,0} − v^{b,0}‖∞
    double u_weighted = 0.0;    ///< sup_{t≥t_min} t^{5/4}‖u^ε − u^{I,0} − u^{B,0} − u^{b,0}‖∞
};

/// Error functionals of the full solution against the leading profiles on the
/// full solver's grid. u^{B,0} = a(t)(e^{v^{B,0}} − 1) in closed form; φ_z^{B,1}
/// by differencing the stored φ-layer. ParamError when t_min ≤ 0 or the
/// solution's time levels differ from the hierarchy's.
ErrorMetrics theorem_errors(const FullSolution& full, const Hierarchy& h, double t_min);

}  // namespace chemlayer
