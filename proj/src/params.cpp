#include "chemlayer/params.hpp"

#include "chemlayer/errors.hpp"

#include <algorithm>
#include <cmath>

namespace chemlayer {

Exponents derive_iota0(double alpha, double nu) {
    if (!(alpha > 1.0 && alpha < 1.25)) {
        throw ParamError("alpha must satisfy 1 < alpha < 5/4");
    }
    if (!(nu > 0.0 && nu < 0.25)) {
        throw ParamError("nu must satisfy 0 < nu < 1/4");
    }
    if (!(1.0 + nu > alpha)) {
        throw ParamError("alpha and nu must satisfy 1 + nu > alpha");
    }
    Exponents e;
    e.iota0 = std::min({0.75 - nu, alpha / 2.0, 1.0 + (nu - alpha) / 2.0, 1.0 - 2.0 * nu / 3.0,
                        1.25 - alpha / 2.0});
    e.phi_sup = 1.5 * e.iota0 - 0.375;
    e.phi_x_weighted = 2.0 * e.iota0 - 1.0;
    e.v_sup = e.iota0 - 0.25;
    return e;
}

ModelParams ModelParams::make(double eps, double v_star, double mass, double alpha, double nu, double T) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw ParamError("eps must be >= 0");
    if (!(v_star > 0.0)) throw ParamError("v_star must be > 0");
    if (!(mass > 0.0)) throw ParamError("mass M must be > 0");
    if (!(T > 0.0)) throw ParamError("final time T must be > 0");
    ModelParams p;
    p.eps = eps;
    p.v_star = v_star;
    p.mass = mass;
    p.alpha = alpha;
    p.nu = nu;
    p.T = T;
    p.exponents = derive_iota0(alpha, nu);
    return p;
}

}  // namespace chemlayer
