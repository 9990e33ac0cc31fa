#include "chemlayer/full.hpp"

#include "chemlayer/errors.hpp"
#include "chemlayer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace chemlayer {

TimeField FullSolution::u() const { return recover_u(phi, mass); }

FullSolution solve_full(const InitialData& data, double eps, double v_star, const Grid1D& grid,
                        const TimeGrid& time) {
    if (!(eps >= 0.0)) throw ParamError("solve_full: eps must be >= 0");
    if (!(v_star > 0.0)) throw ParamError("solve_full: v_star must be > 0");
    FullSolution sol;
    sol.eps = eps;
    sol.v_star = v_star;
    sol.grid = grid;
    sol.time = time;
    const auto x = grid.nodes();
    const std::size_t N = x.size();
    const Antiderivative ad = antiderivative_transform(x, data.u0.sample(x));
    sol.mass = ad.mass;
    const double M = ad.mass;
    std::vector<double> phi = ad.phi0, v = data.v0.sample(x);
    if (eps > 0.0) v.front() = v.back() = v_star;
    const double upper = std::max(*std::max_element(v.begin(), v.end()), v_star);

    const num::DiffOperator D(x);
    num::ImplicitDiffusion heat(D, 1.0, time.dt());
    std::optional<num::ImplicitDiffusion> vheat;
    if (eps > 0.0) vheat.emplace(D, eps, time.dt());

    const auto levels = time.recorded_times();
    sol.phi = TimeField(grid.shared_nodes(), levels);
    sol.v = TimeField(grid.shared_nodes(), levels);
    std::vector<double> phi_x(N), v_x(N), rhs(N);
    D.first(phi, phi_x);
    D.first(v, v_x);
    const double dt = time.dt(), inv_dt = 1.0 / dt;

    std::size_t k = 0;
    auto record = [&](std::size_t n) {
        double flux = 0.0;
        for (std::size_t i = 0; i + 1 < N; ++i) flux += phi[i + 1] - phi[i];
        sol.mass_defect = std::max(sol.mass_defect, std::abs((flux + M) - M));
        sol.v_bounds.observe(v, upper);
        sol.v_left.push_back(v.front());
        sol.v_right.push_back(v.back());
        sol.u_left.push_back(phi_x.front() + M);
        sol.u_right.push_back(phi_x.back() + M);
        if (time.is_recorded(n)) {
            std::copy(phi.begin(), phi.end(), sol.phi.level(k).begin());
            std::copy(v.begin(), v.end(), sol.v.level(k).begin());
            ++k;
        }
    };
    record(0);
    for (std::size_t n = 0; n < time.steps(); ++n) {
        const double grad_old = num::max_abs(phi_x);
        for (std::size_t i = 1; i + 1 < N; ++i) rhs[i] = phi[i] * inv_dt - (phi_x[i] + M) * v_x[i];
        heat.solve(rhs, 0.0, 0.0);
        phi.swap(rhs);
        D.first(phi, phi_x);
        const double grad_new = num::max_abs(phi_x);
        if (!(grad_new <= 10.0 * (grad_old + M))) {
            std::ostringstream os;
            os << "full solver: blow-up detected at step " << n + 1 << " (|phi_x| " << grad_old << " -> " << grad_new
               << ")";
            throw SolverError(os.str());
        }
        if (vheat) {
            for (std::size_t i = 1; i + 1 < N; ++i) rhs[i] = v[i] * inv_dt;
            vheat->solve(rhs, v_star, v_star);
            v.swap(rhs);
            for (std::size_t i = 1; i + 1 < N; ++i) v[i] *= std::exp(-(phi_x[i] + M) * dt);
        } else {
            for (std::size_t i = 0; i < N; ++i) v[i] *= std::exp(-(phi_x[i] + M) * dt);
        }
        D.first(v, v_x);
        record(n + 1);
    }
    return sol;
}

double boundary_ode_check(const FullSolution& sol) {
    if (sol.eps != 0.0) throw ParamError("boundary_ode_check: only defined for eps = 0");
    const double dt = sol.time.dt();
    double worst = 0.0;
    for (int s = 0; s < 2; ++s) {
        const auto& v = s == 0 ? sol.v_left : sol.v_right;
        const auto& u = s == 0 ? sol.u_left : sol.u_right;
        double integral = 0.0;
        for (std::size_t n = 1; n < v.size(); ++n) {
            integral += 0.5 * dt * (u[n - 1] + u[n]);
            const double ref = v[0] * std::exp(-integral);
            worst = std::max(worst, std::abs(v[n] - ref) / ref);
        }
    }
    return worst;
}

double half_height_width(const FullSolution& sol, std::size_t level) {
    const auto x = sol.v.nodes();
    const auto v = sol.v.level(level);
    const double v0 = v[0];
    const double vmid = sol.v.at_level(level, 0.5);
    const double target = 0.5 * (v0 + vmid);
    const double sign = v0 >= vmid ? 1.0 : -1.0;
    for (std::size_t i = 0; i + 1 < x.size() && x[i] <= 0.5; ++i) {
        if (sign * (v[i + 1] - target) <= 0.0) {
            const double w = (v[i] - target) / (v[i] - v[i + 1]);
            return x[i] + w * (x[i + 1] - x[i]);
        }
    }
    throw SolverError("half_height_width: no crossing in [0, 1/2]");
}

}  // namespace chemlayer
