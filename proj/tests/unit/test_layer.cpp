#include "chemlayer/errors.hpp"
#include "chemlayer/layer.hpp"
#include "chemlayer/outer.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

using namespace chemlayer;

namespace {

OuterSolution constant_outer(double M, double v_star, double T, double dt) {
    return solve_outer0(InitialData::constant(M, v_star), Grid1D::uniform(32), TimeGrid(T, dt, 1e-2));
}

std::vector<double> central_diff(std::span<const double> z, std::span<const double> f) {
    const std::size_t n = z.size();
    const double h = z[1] - z[0];
    std::vector<double> d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    return d;
}

}  // namespace

TEST_CASE("regularized boundary datum vanishes at t = 0") {
    const OuterSolution outer = constant_outer(1.5, 1.0, 0.05, 1e-4);
    const CorrectorSeries lam = build_corrector(Side::left, outer.traces, 1.0, 1e-2, 1.1);
    const HalfLineGrid grid = HalfLineGrid::make(Side::left, 20.0, 400);
    LeadingLayerStepper st(Side::left, grid, outer.traces, 1.0, 1e-4, &lam);
    CHECK(st.boundary_value(0) == 0.0);
    st.step();
    CHECK(num::max_abs(st.v()) <= 10.0 * 1e-4);
}

TEST_CASE("leading layer for constant data") {
    const double M = 1.5, v_star = 1.0, T = 1.0;
    const OuterSolution outer = constant_outer(M, v_star, T, 1e-3);
    const CorrectorSeries lam = build_corrector(Side::left, outer.traces, v_star, 1e-2, 1.1);
    const HalfLineGrid grid = HalfLineGrid::make(Side::left, 20.0, 400);
    const LeadingLayer reg = solve_layer_leading(Side::left, outer.traces, v_star, grid, outer.time, &lam);
    const std::size_t k = reg.v.levels() - 1;
    CHECK(reg.v.at(k, 0) == doctest::Approx(v_star * (1.0 - std::exp(-M * T)) + lam.values.back()).epsilon(1e-10));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) CHECK(reg.v.at(k, i + 1) <= reg.v.at(k, i));
    CHECK(reg.v.at(k, grid.size() - 1) == 0.0);
    CHECK(reg.bounds.violations == 0);
    CHECK(reg.bounds.min >= 0.0);
    CHECK(reg.bounds.max <= v_star);
    CHECK(reg.max_newton_iterations <= 8);
    CHECK(reg.halvings == 0);

    const LeadingLayer lead = solve_layer_leading(Side::left, outer.traces, v_star, grid, outer.time);
    const GapSeries gap = layer_gap(reg.v, lead.v);
    CHECK(gap.sup == doctest::Approx(lam.sup()).epsilon(1e-8));

    const HalfLineGrid rgrid = HalfLineGrid::make(Side::right, 20.0, 400);
    const LeadingLayer right = solve_layer_leading(Side::right, outer.traces, v_star, rgrid, outer.time);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(right.v.at(k, grid.size() - 1 - i) == doctest::Approx(lead.v.at(k, i)).epsilon(1e-12));
}

TEST_CASE("phi layer of the zero profile") {
    const HalfLineGrid g = HalfLineGrid::make(Side::left, 20.0, 100);
    std::vector<double> v(g.size(), 0.0), out(g.size(), 1.0);
    phi_layer_profile(Side::left, g.nodes(), v, 1.7, out);
    for (double p : out) CHECK(p == 0.0);
}

TEST_CASE("phi layer against adaptive quadrature") {
    const double a = 1.3, c = 0.8;
    const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double y) { return a * std::expm1(c * std::exp(-y)); }, 0.0, std::numeric_limits<double>::infinity(), 15,
        1e-14);
    for (Side side : {Side::left, Side::right}) {
        const HalfLineGrid g = HalfLineGrid::make(side, 40.0, 400000);
        std::vector<double> v(g.size()), out(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = c * std::exp(-std::abs(g.nodes()[i]));
        phi_layer_profile(side, g.nodes(), v, a, out);
        const double expected = side == Side::left ? -ref : ref;
        CHECK(std::abs(out[g.boundary_index()] - expected) <= 1e-8 * std::abs(ref));
        CHECK(out[g.far_index()] == 0.0);
    }
}

TEST_CASE("differenced phi layer recovers a(e^v - 1) to second order") {
    const double a = 1.5;
    std::vector<double> errs;
    for (std::size_t cells : {200, 400, 800}) {
        const HalfLineGrid g = HalfLineGrid::make(Side::left, 20.0, cells);
        std::vector<double> v(g.size()), phi(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = 0.6 * std::exp(-g.nodes()[i]) * (1.0 + 0.5 * std::sin(g.nodes()[i]));
        phi_layer_profile(Side::left, g.nodes(), v, a, phi);
        const auto dphi = central_diff(g.nodes(), phi);
        double e = 0.0;
        for (std::size_t i = 1; i + 1 < g.size(); ++i) e = std::max(e, std::abs(dphi[i] - a * std::expm1(v[i])));
        errs.push_back(e);
    }
    CHECK(errs[0] < 1e-3);
    CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.9);
}

TEST_CASE("integration from the truncation end") {
    const HalfLineGrid l = HalfLineGrid::make(Side::left, 2.0, 8);
    std::vector<double> one(l.size(), 1.0), out(l.size());
    integrate_from_far(Side::left, l.nodes(), one, out);
    for (std::size_t i = 0; i < l.size(); ++i) CHECK(out[i] == doctest::Approx(l.nodes()[i] - 2.0));
    const HalfLineGrid r = HalfLineGrid::make(Side::right, 2.0, 8);
    integrate_from_far(Side::right, r.nodes(), one, out);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(out[i] == doctest::Approx(r.nodes()[i] + 2.0));
}

TEST_CASE("second-order layer with zero forcing") {
    OuterTraces tr;
    const std::size_t S = 200;
    const TimeGrid time(0.2, 1e-3, 1e-2);
    tr.times = time.step_times();
    tr.mass = 1.5;
    for (BoundaryTrace* b : {&tr.left, &tr.right}) {
        b->phi_x.assign(S + 1, 0.0);
        b->phi_xx.assign(S + 1, 0.0);
        b->v.assign(S + 1, 1.0);
        b->v_x.assign(S + 1, 0.0);
    }
    FirstOrderTraces first;
    first.phi_x_left.assign(S + 1, 0.0);
    first.phi_x_right.assign(S + 1, 0.0);
    first.v_left.assign(S + 1, 0.0);
    first.v_right.assign(S + 1, 0.0);
    CorrectorSeries lam;
    lam.eps = 1e-2;
    lam.alpha = 1.1;
    lam.times = tr.times;
    lam.values.assign(S + 1, 0.0);
    for (Side side : {Side::left, Side::right}) {
        lam.side = side;
        const SecondOrderLayer out =
            solve_layer_second(side, HalfLineGrid::make(side, 20.0, 200), time, tr, first, lam, 1.0);
        CHECK(out.phi.max_abs() == 0.0);
        CHECK(out.v.max_abs() == 0.0);
        CHECK(out.phi_z.max_abs() == 0.0);
    }
}

TEST_CASE("second-order layer on the pipeline fixture") {
    const PipelineContext& ctx = fixtures::small_context();
    const PipelineRun& run = fixtures::small_run(1e-3);
    const auto& steps = ctx.time.recorded_steps();
    for (Side side : {Side::left, Side::right}) {
        const SecondOrderLayer& sec = side == Side::left ? run.second_left : run.second_right;
        const LayerProfileSet& set = side == Side::left ? run.left : run.right;
        const BoundaryTrace& tr = ctx.outer0.traces.at(side);
        const auto z = set.grid.nodes();
        const std::size_t ib = set.grid.boundary_index();
        CHECK(sec.max_sweeps <= 5);
        CHECK(sec.halvings == 0);
        double worst = 0.0;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const std::size_t n = steps[k];
            CHECK(sec.v.at(k, ib) == -run.outer1.traces.v(side)[n]);
            CHECK(sec.phi.at(k, set.grid.far_index()) == 0.0);

            const auto veps = set.v_reg.level(k);
            const auto v1 = sec.v.level(k);
            const auto psi = sec.phi_z.level(k);
            const double a = ctx.outer0.traces.rate(side, n);
            const auto vz = central_diff(z, veps);
            const auto v1z = central_diff(z, v1);
            std::vector<double> g(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double pz = a * std::expm1(veps[i]);
                const double F = vz[i] * (tr.phi_xx[n] * z[i] + run.outer1.traces.phi_x(side)[n]) + v1z[i] * (a + pz) +
                                 pz * tr.v_x[n];
                g[i] = vz[i] * psi[i] + F;
            }
            for (std::size_t i = 0; i + 1 < z.size(); ++i) {
                const double r = psi[i + 1] - psi[i] - 0.5 * (z[i + 1] - z[i]) * (g[i] + g[i + 1]);
                worst = std::max(worst, std::abs(r));
            }
        }
        INFO(to_string(side) << " residual " << worst);
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("layer gap") {
    auto nodes = std::make_shared<const std::vector<double>>(std::vector<double>{0.0, 1.0, 2.0, 3.0});
    TimeField a(nodes, {0.0, 1.0}, true), b(nodes, {0.0, 1.0}, true);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < 4; ++i) {
            a.level(k)[i] = std::sin(static_cast<double>(i + k));
            b.level(k)[i] = a.level(k)[i] + 0.25;
        }
    CHECK(layer_gap(a, a).sup == 0.0);
    const GapSeries g = layer_gap(a, b);
    CHECK(g.sup == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.per_level.size() == 2);
    TimeField c(nodes, {0.0}, true);
    CHECK_THROWS_AS(layer_gap(a, c), ParamError);
}

TEST_CASE("bound statistics") {
    BoundStats s;
    const std::vector<double> ok{0.0, 0.5, 1.0};
    s.observe(ok, 1.0);
    CHECK(s.violations == 0);
    CHECK(s.min == 0.0);
    CHECK(s.max == 1.0);
    const std::vector<double> bad{-1e-3, 0.5, 1.0 + 1e-3};
    s.observe(bad, 1.0);
    CHECK(s.violations == 2);
    CHECK(s.min == -1e-3);
}
