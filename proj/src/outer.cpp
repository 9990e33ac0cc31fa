#include "chemlayer/outer.hpp"

#include "chemlayer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chemlayer {

Outer0Stepper::Outer0Stepper(std::span<const double> x, std::span<const double> phi0, std::span<const double> v0,
                             double mass, double dt)
    : D_(x), heat_(D_, 1.0, dt), mass_(mass), dt_(dt), phi_(phi0.begin(), phi0.end()), v_(v0.begin(), v0.end()),
      phi_x_(x.size()), v_x_(x.size()), rate_(x.size()), rhs_(x.size()) {
    if (phi0.size() != x.size() || v0.size() != x.size()) throw ParamError("Outer0Stepper: shape mismatch");
    refresh_derivatives();
}

void Outer0Stepper::refresh_derivatives() {
    D_.first(phi_, phi_x_);
    D_.first(v_, v_x_);
    for (std::size_t i = 0; i < phi_.size(); ++i) rate_[i] = phi_x_[i] + mass_;
}

void Outer0Stepper::step() {
    const std::size_t N = phi_.size();
    const double inv_dt = 1.0 / dt_;
    for (std::size_t i = 1; i + 1 < N; ++i) rhs_[i] = phi_[i] * inv_dt - rate_[i] * v_x_[i];
    heat_.solve(rhs_, 0.0, 0.0);
    phi_.swap(rhs_);
    ++n_;
    D_.first(phi_, phi_x_);
    double rmin = phi_x_[0] + mass_;
    for (std::size_t i = 0; i < N; ++i) {
        rate_[i] = phi_x_[i] + mass_;
        rmin = std::min(rmin, rate_[i]);
    }
    if (!(rmin > 0.0)) {
        std::ostringstream os;
        os << "outer solver: positivity of phi_x + M lost at t = " << time() << " (min " << rmin << ")";
        throw SolverError(os.str());
    }
    for (std::size_t i = 0; i < N; ++i) v_[i] *= std::exp(-rate_[i] * dt_);
    D_.first(v_, v_x_);
}

void Outer0Stepper::append_trace(Side side, BoundaryTrace& out) const {
    const std::size_t i = side == Side::left ? 0 : phi_.size() - 1;
    out.phi_x.push_back(phi_x_[i]);
    out.phi_xx.push_back(D_.second_at(phi_, i));
    out.v.push_back(v_[i]);
    out.v_x.push_back(v_x_[i]);
}

OuterSolution solve_outer0(const InitialData& data, const Grid1D& grid, const TimeGrid& time) {
    OuterSolution sol;
    sol.grid = grid;
    sol.time = time;
    const auto x = grid.nodes();
    const auto u0 = data.u0.sample(x);
    const Antiderivative ad = antiderivative_transform(x, u0);
    sol.mass = ad.mass;
    sol.phi0 = ad.phi0;
    sol.v0 = data.v0.sample(x);
    const auto levels = time.recorded_times();
    sol.phi = TimeField(grid.shared_nodes(), levels);
    sol.v = TimeField(grid.shared_nodes(), levels);
    sol.traces.times = time.step_times();
    sol.traces.mass = sol.mass;

    Outer0Stepper st(x, sol.phi0, sol.v0, sol.mass, time.dt());
    std::size_t k = 0;
    auto record = [&] {
        st.append_trace(Side::left, sol.traces.left);
        st.append_trace(Side::right, sol.traces.right);
        const auto r = st.rate();
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        sol.rate_min = st.step_index() == 0 ? *lo : std::min(sol.rate_min, *lo);
        sol.rate_max = st.step_index() == 0 ? *hi : std::max(sol.rate_max, *hi);
        if (time.is_recorded(st.step_index())) {
            std::copy(st.phi().begin(), st.phi().end(), sol.phi.level(k).begin());
            std::copy(st.v().begin(), st.v().end(), sol.v.level(k).begin());
            ++k;
        }
    };
    record();
    std::vector<double> prev(st.v().begin(), st.v().end());
    for (std::size_t n = 0; n < time.steps(); ++n) {
        st.step();
        for (std::size_t i = 0; i < prev.size(); ++i) {
            if (st.v()[i] > prev[i]) sol.v_monotone = false;
            prev[i] = st.v()[i];
        }
        record();
    }
    return sol;
}

const OuterTraces& extract_traces(const OuterSolution& sol) { return sol.traces; }

FirstOrderOuter solve_outer1(const OuterSolution& sol0, std::span<const double> bl_left,
                             std::span<const double> bl_right) {
    const TimeGrid& time = sol0.time;
    const std::size_t S = time.steps();
    if (bl_left.size() != S + 1 || bl_right.size() != S + 1)
        throw ParamError("solve_outer1: layer boundary series do not match the solver time levels");
    const auto x = sol0.grid.nodes();
    const std::size_t N = x.size();
    const double dt = time.dt();
    const double inv_dt = 1.0 / dt;

    Outer0Stepper lead(x, sol0.phi0, sol0.v0, sol0.mass, dt);
    const num::DiffOperator& D = lead.diff();
    num::ImplicitDiffusion heat(D, 1.0, dt);

    FirstOrderOuter out;
    const auto levels = time.recorded_times();
    out.phi = TimeField(sol0.grid.shared_nodes(), levels);
    out.v = TimeField(sol0.grid.shared_nodes(), levels);

    std::vector<double> phi(N, 0.0), v(N, 0.0), phi_x(N, 0.0), v_x(N, 0.0), rhs(N);
    // The zero initial level is consistent with the Dirichlet data only when the
    // layer values vanish at t = 0; the first step imposes the boundary values.
    phi.front() = -bl_left[0];
    phi.back() = -bl_right[0];
    D.first(phi, phi_x);

    std::size_t k = 0;
    auto record = [&](std::size_t n) {
        out.traces.phi_x_left.push_back(phi_x.front());
        out.traces.phi_x_right.push_back(phi_x.back());
        out.traces.v_left.push_back(v.front());
        out.traces.v_right.push_back(v.back());
        if (time.is_recorded(n)) {
            std::copy(phi.begin(), phi.end(), out.phi.level(k).begin());
            std::copy(v.begin(), v.end(), out.v.level(k).begin());
            ++k;
        }
    };
    record(0);
    for (std::size_t n = 0; n < S; ++n) {
        const auto r0 = lead.rate();
        const auto v0x = lead.v_x();
        for (std::size_t i = 1; i + 1 < N; ++i) rhs[i] = phi[i] * inv_dt - r0[i] * v_x[i] - phi_x[i] * v0x[i];
        heat.solve(rhs, -bl_left[n + 1], -bl_right[n + 1]);
        phi.swap(rhs);
        D.first(phi, phi_x);
        lead.step();
        const auto r1 = lead.rate();
        const auto v0 = lead.v();
        for (std::size_t i = 0; i < N; ++i) {
            const double decay = std::exp(-r1[i] * dt);
            const double source = -phi_x[i] * v0[i];
            v[i] = decay * v[i] + (-std::expm1(-r1[i] * dt) / r1[i]) * source;
        }
        D.first(v, v_x);
        record(n + 1);
    }
    return out;
}

}  // namespace chemlayer
