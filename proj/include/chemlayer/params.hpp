#pragma once

namespace chemlayer {

/// ι₀ and the three convergence exponents it controls.
struct Exponents {
    double iota0 = 0.0;
    double phi_sup = 0.0;         ///< sup-norm rate of φ^ε − φ^{I,0}: 3ι₀/2 − 3/8
    double phi_x_weighted = 0.0;  ///< t^{5/4}-weighted rate of the φₓ / u error: 2ι₀ − 1
    double v_sup = 0.0;           ///< sup-norm rate of the v error: ι₀ − 1/4
};

/// Validates 1 < α < 5/4, 0 < ν < 1/4 and 1 + ν > α, then returns
/// ι₀ = min{3/4 − ν, α/2, 1 + (ν − α)/2, 1 − 2ν/3, 5/4 − α/2} with the
/// derived exponents. Throws ParamError naming the violated inequality.
Exponents derive_iota0(double alpha, double nu);

/// The study's dial set. Construct through make() so every invariant is checked.
struct ModelParams {
    double eps = 0.0;
    double v_star = 1.0;
    double mass = 1.0;
    double alpha = 1.1;
    double nu = 0.2;
    double T = 1.0;
    Exponents exponents;

    static ModelParams make(double eps, double v_star, double mass, double alpha, double nu, double T);
};

}  // namespace chemlayer
