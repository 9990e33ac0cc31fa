#include "chemlayer/errors.hpp"
#include "chemlayer/full.hpp"

#include <doctest.h>

#include <cmath>

using namespace chemlayer;

TEST_CASE("zero diffusion with constant data") {
    const double M = 1.5, v_star = 1.0;
    const FullSolution sol =
        solve_full(InitialData::constant(M, v_star), 0.0, v_star, build_layer_grid(64, 0.0), TimeGrid(1.0, 1e-3, 1e-2));
    const TimeField u = sol.u();
    for (std::size_t k = 0; k < sol.v.levels(); ++k) {
        const double exact = v_star * std::exp(-M * sol.v.times()[k]);
        for (std::size_t i = 0; i < sol.v.size(); ++i) {
            CHECK(u.at(k, i) == doctest::Approx(M).epsilon(1e-12));
            CHECK(sol.v.at(k, i) == doctest::Approx(exact).epsilon(1e-10));
        }
    }
    CHECK(boundary_ode_check(sol) <= 1e-12);
}

TEST_CASE("boundary ODE formula for generic data") {
    const InitialData data = InitialData::bump(1.0, 1.0);
    const Grid1D grid = build_layer_grid(128, 0.0);
    const double d1 = boundary_ode_check(solve_full(data, 0.0, 1.0, grid, TimeGrid(1.0, 1e-4, 1e-2)));
    const double d2 = boundary_ode_check(solve_full(data, 0.0, 1.0, grid, TimeGrid(1.0, 5e-5, 1e-2)));
    CHECK(d1 <= 1e-3);
    CHECK(d1 > 0.0);
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("boundary ODE check requires zero diffusion") {
    const FullSolution sol = solve_full(InitialData::constant(1.5, 1.0), 1e-2, 1.0, build_layer_grid(64, 1e-2),
                                        TimeGrid(0.1, 1e-3, 1e-2));
    CHECK_THROWS_AS(boundary_ode_check(sol), ParamError);
}

TEST_CASE("positive diffusion with constant data") {
    const double M = 1.5, v_star = 1.0;
    std::vector<double> deviation;
    for (double eps : {1e-3, 1e-4}) {
        const FullSolution sol = solve_full(InitialData::constant(M, v_star), eps, v_star,
                                            build_layer_grid(256, eps, 2.0), TimeGrid(1.0, 1e-4, 1e-2));
        const auto x = sol.grid.nodes();
        double dev = 0.0;
        for (std::size_t k = 0; k < sol.v.levels(); ++k) {
            CHECK(sol.v.at(k, 0) == v_star);
            CHECK(sol.v.at(k, x.size() - 1) == v_star);
            const double outer = v_star * std::exp(-M * sol.v.times()[k]);
            dev = std::max(dev, std::abs(sol.v.at_level(k, 0.5) - outer) / outer);
        }
        CHECK(dev <= std::sqrt(eps));
        deviation.push_back(dev);
        CHECK(sol.mass_defect <= 1e-9);
        CHECK(sol.v_bounds.violations == 0);
    }
    CHECK(deviation[1] < 0.5 * deviation[0]);
}

TEST_CASE("mass and maximum principle with generic data") {
    const InitialData data = InitialData::bump(1.0, 1.0);
    for (double eps : {1e-2, 1e-3}) {
        const FullSolution sol = solve_full(data, eps, 1.0, build_layer_grid(256, eps, 2.0), TimeGrid(0.5, 1e-4, 1e-2));
        CHECK(sol.mass_defect <= 1e-9);
        CHECK(sol.v_bounds.violations == 0);
        CHECK(sol.v_bounds.min >= 0.0);
        CHECK(sol.v_bounds.max <= 1.0);
        for (std::size_t k = 0; k < sol.phi.levels(); ++k) {
            CHECK(sol.phi.at(k, 0) == 0.0);
            CHECK(sol.phi.at(k, sol.phi.size() - 1) == 0.0);
        }
    }
}

TEST_CASE("transition width scales like sqrt(eps)") {
    std::vector<double> le, lw;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const FullSolution sol = solve_full(InitialData::constant(1.5, 1.0), eps, 1.0, build_layer_grid(256, eps, 2.0),
                                            TimeGrid(0.5, 1e-4, 1e-1));
        le.push_back(std::log(eps));
        lw.push_back(std::log(half_height_width(sol, sol.v.levels() - 1)));
    }
    const double slope = num::fit_line(le, lw).slope;
    CHECK(slope >= 0.4);
    CHECK(slope <= 0.6);
}
