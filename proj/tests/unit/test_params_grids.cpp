#include "chemlayer/errors.hpp"
#include "chemlayer/grid.hpp"
#include "chemlayer/params.hpp"
#include "chemlayer/time_field.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace chemlayer;

TEST_CASE("iota0 for the reference pair (11/10, 1/5)") {
    const Exponents e = derive_iota0(1.1, 0.2);
    CHECK(e.iota0 == doctest::Approx(11.0 / 20.0).epsilon(1e-15));
    CHECK(e.phi_sup == doctest::Approx(0.45).epsilon(1e-14));
    CHECK(e.phi_x_weighted == doctest::Approx(0.10).epsilon(1e-13));
    CHECK(e.v_sup == doctest::Approx(0.30).epsilon(1e-14));
}

TEST_CASE("iota0 is the minimum of its five candidates") {
    for (double alpha : {1.02, 1.1, 1.18, 1.24}) {
        for (double nu : {0.05, 0.12, 0.2, 0.24}) {
            if (!(1.0 + nu > alpha)) continue;
            const double expected = std::min({0.75 - nu, alpha / 2.0, 1.0 + (nu - alpha) / 2.0, 1.0 - 2.0 * nu / 3.0,
                                              1.25 - alpha / 2.0});
            CHECK(derive_iota0(alpha, nu).iota0 == doctest::Approx(expected).epsilon(1e-15));
        }
    }
}

TEST_CASE("admissibility of (alpha, nu)") {
    CHECK_THROWS_AS(derive_iota0(1.3, 0.2), ParamError);
    CHECK_THROWS_AS(derive_iota0(1.0, 0.2), ParamError);
    CHECK_THROWS_AS(derive_iota0(1.1, 0.25), ParamError);
    CHECK_THROWS_AS(derive_iota0(1.2, 0.1), ParamError);
    CHECK_THROWS_AS(ModelParams::make(-1e-3, 1.0, 1.0, 1.1, 0.2, 1.0), ParamError);
    CHECK_THROWS_AS(ModelParams::make(1e-3, 0.0, 1.0, 1.1, 0.2, 1.0), ParamError);
    CHECK_NOTHROW(ModelParams::make(1e-3, 1.0, 1.5, 1.1, 0.2, 1.0));
}

TEST_CASE("uniform fallback at eps = 0") {
    const Grid1D g = build_layer_grid(16, 0.0);
    CHECK(g.kind() == GridKind::uniform);
    REQUIRE(g.size() == 17);
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
        CHECK(g.nodes()[i + 1] - g.nodes()[i] == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
}

TEST_CASE("Shishkin transition width") {
    const double expected = 4.0 * 0.01 * std::log(64.0);
    CHECK(shishkin_sigma(64, 1e-4, 4.0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(std::abs(shishkin_sigma(64, 1e-4, 4.0) - 0.1664) < 1e-4);
    const Grid1D g = build_layer_grid(64, 1e-4, 4.0);
    CHECK(g.kind() == GridKind::shishkin);
    CHECK(g.sigma_left() == doctest::Approx(expected).epsilon(1e-14));
    CHECK(g.nodes()[16] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(g.nodes()[48] == doctest::Approx(1.0 - expected).epsilon(1e-14));
    CHECK(g.nodes().front() == 0.0);
    CHECK(g.nodes().back() == 1.0);
    CHECK(build_layer_grid(64, 0.5, 4.0).kind() == GridKind::uniform);
}

TEST_CASE("Shishkin mesh ratio of fine to coarse spacing") {
    const Grid1D g = build_layer_grid(256, 1e-4, 2.0);
    const double sigma = g.sigma_left();
    const double fine = g.nodes()[1] - g.nodes()[0];
    const double coarse = g.nodes()[129] - g.nodes()[128];
    CHECK(fine == doctest::Approx(sigma / 64.0).epsilon(1e-12));
    CHECK(coarse == doctest::Approx((1.0 - 2.0 * sigma) / 128.0).epsilon(1e-12));
}

TEST_CASE("cell count validation") {
    CHECK_THROWS_AS(build_layer_grid(8, 1e-2), ParamError);
    CHECK_THROWS_AS(build_layer_grid(33, 1e-2), ParamError);
    CHECK(build_layer_grid(34, 1e-2).cells() == 36);
}

TEST_CASE("half-line grids keep the layer boundary as a node") {
    const HalfLineGrid l = HalfLineGrid::make(Side::left, 20.0, 800);
    const HalfLineGrid r = HalfLineGrid::make(Side::right, 20.0, 800);
    CHECK(l.nodes()[l.boundary_index()] == 0.0);
    CHECK(l.nodes()[l.far_index()] == 20.0);
    CHECK(r.nodes()[r.boundary_index()] == 0.0);
    CHECK(r.nodes()[r.far_index()] == -20.0);
    CHECK(l.spacing() == doctest::Approx(0.025));
}

TEST_CASE("time grid lands exactly on T") {
    const TimeGrid tg(1.0, 3e-3, 1e-2);
    CHECK(tg.steps() == 334);
    CHECK(tg.time(tg.steps()) == 1.0);
    CHECK(tg.recorded_steps().front() == 0);
    CHECK(tg.recorded_steps().back() == tg.steps());
    CHECK(tg.is_recorded(tg.steps()));
}

namespace {

TimeField ramp_field() {
    auto nodes = std::make_shared<const std::vector<double>>(std::vector<double>{0.0, 0.3, 1.0});
    TimeField f(nodes, {0.0, 0.5, 1.0});
    for (std::size_t k = 0; k < 3; ++k) {
        auto lv = f.level(k);
        for (std::size_t i = 0; i < 3; ++i) lv[i] = (*nodes)[i] + 0.1 * static_cast<double>(k);
    }
    return f;
}

}  // namespace

TEST_CASE("time field interpolation") {
    auto nodes = std::make_shared<const std::vector<double>>(std::vector<double>{0.0, 0.25, 0.7, 1.0});
    TimeField c(nodes, {0.0, 0.4, 1.0});
    for (std::size_t k = 0; k < 3; ++k)
        for (double& v : c.level(k)) v = 2.5;
    CHECK(c.interp(0.13, 0.77) == 2.5);
    CHECK(interp_eval(c, 1.0, 1.0) == 2.5);

    const TimeField r = ramp_field();
    CHECK(r.interp(0.5, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.interp(0.3, 0.5) == r.at(1, 1));
    CHECK(r.interp(1.0, 1.0) == r.at(2, 2));
    CHECK(r.interp(0.0, 0.0) == r.at(0, 0));
    CHECK(r.interp(0.65, 0.25) == doctest::Approx(0.65 + 0.05).epsilon(1e-14));
    CHECK_THROWS_AS(r.interp(1.2, 0.5), RangeError);
    CHECK_THROWS_AS(r.interp(0.5, 1.5), RangeError);

    TimeField z(nodes, {0.0, 1.0}, true);
    for (std::size_t k = 0; k < 2; ++k)
        for (double& v : z.level(k)) v = 1.0;
    CHECK(z.interp(3.0, 0.5) == 0.0);
}
