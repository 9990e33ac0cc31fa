#include "chemlayer/composite.hpp"
#include "chemlayer/errors.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

using namespace chemlayer;

namespace {

void zero_field(TimeField& f) {
    for (std::size_t k = 0; k < f.levels(); ++k) std::ranges::fill(f.level(k), 0.0);
}

LayerProfileSet zeroed(const LayerProfileSet& s) {
    LayerProfileSet z = s;
    for (TimeField* f : {&z.v_lead, &z.phi_first, &z.v_reg, &z.phi_reg, &z.phi_second, &z.v_first}) zero_field(*f);
    return z;
}

std::string message_of(const Hierarchy& h) {
    try {
        h.validate();
    } catch (const ParamError& e) {
        return e.what();
    }
    return {};
}

/// sup over stored levels and full-grid nodes of |v - v^{I,0} - v^{B,0} - v^{b,0}|,
/// with every constituent read through TimeField::at_level.
double direct_e2(const TimeField& v, const PipelineRun& run, const PipelineContext& ctx) {
    const double r = 1.0 / std::sqrt(run.eps);
    const auto x = run.full.grid.nodes();
    double e = 0.0;
    for (std::size_t k = 0; k < v.levels(); ++k)
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double ref = ctx.outer0.v.at_level(k, x[i]) + run.left.v_lead.at_level(k, x[i] * r) +
                               run.right.v_lead.at_level(k, (x[i] - 1.0) * r);
            e = std::max(e, std::abs(v.at(k, i) - ref));
        }
    return e;
}

}  // namespace

TEST_CASE("linear resampler") {
    const std::vector<double> src{0.0, 1.0, 2.0}, vals{0.0, 10.0, 40.0};
    const std::vector<double> tgt{-1.0, 0.0, 0.5, 1.5, 2.0, 3.0};
    std::vector<double> out(tgt.size());
    LinearResampler(src, tgt, true).apply(vals, out);
    CHECK(out == std::vector<double>{0.0, 0.0, 5.0, 25.0, 40.0, 0.0});
    CHECK_THROWS_AS(LinearResampler(src, tgt, false), RangeError);
}

TEST_CASE("hierarchy validation names the missing constituent") {
    const auto& ctx = fixtures::small_context();
    const auto& run = fixtures::small_run(1e-2);
    Hierarchy h = run.hierarchy(ctx);
    CHECK_NOTHROW(h.validate());
    h.outer1 = nullptr;
    CHECK(message_of(h).find("outer1") != std::string::npos);
    h = run.hierarchy(ctx);
    h.lambda_right = nullptr;
    CHECK(message_of(h).find("Lambda_2") != std::string::npos);
    h = run.hierarchy(ctx);
    h.left = nullptr;
    CHECK(message_of(h).find("left layer") != std::string::npos);
}

TEST_CASE("homogenizers vanish for zero profiles and zero correctors") {
    const auto& ctx = fixtures::small_context();
    const auto& run = fixtures::small_run(1e-2);
    const LayerProfileSet zl = zeroed(run.left), zr = zeroed(run.right);
    CorrectorSeries l1 = run.lambda_left, l2 = run.lambda_right;
    std::ranges::fill(l1.values, 0.0);
    std::ranges::fill(l2.values, 0.0);
    Hierarchy h = run.hierarchy(ctx);
    h.left = &zl;
    h.right = &zr;
    h.lambda_left = &l1;
    h.lambda_right = &l2;
    for (std::size_t k = 0; k < ctx.outer0.phi.levels(); k += 7)
        for (double x : {0.0, 0.25, 0.5, 0.9, 1.0}) {
            CHECK(homogenizer_b_phi(h, x, k) == 0.0);
            CHECK(homogenizer_b_v(h, x, k) == 0.0);
        }
}

TEST_CASE("b_v at the boundaries") {
    const auto& ctx = fixtures::small_context();
    const auto& steps = ctx.outer0.time.recorded_steps();

    SUBCASE("far value inside the truncated half-line") {
        const auto& run = fixtures::small_run(1e-2);
        const Hierarchy h = run.hierarchy(ctx);
        const double r = 10.0, se = 0.1;
        for (std::size_t k = 0; k < steps.size(); k += 5) {
            const double expect = -(run.right.v_reg.at_level(k, -r) + se * run.right.v_first.at_level(k, -r) +
                                    run.lambda_left.values[steps[k]]);
            CHECK(homogenizer_b_v(h, 0.0, k) == doctest::Approx(expect).epsilon(1e-14));
        }
    }
    SUBCASE("far point beyond the truncation") {
        const auto& run = fixtures::small_run(1e-3);
        REQUIRE(1.0 / std::sqrt(1e-3) > ctx.config.z_max);
        const Hierarchy h = run.hierarchy(ctx);
        for (std::size_t k = 0; k < steps.size(); ++k) {
            CHECK(homogenizer_b_v(h, 0.0, k) == -run.lambda_left.values[steps[k]]);
            CHECK(homogenizer_b_v(h, 1.0, k) == -run.lambda_right.values[steps[k]]);
        }
    }
}

TEST_CASE("composite boundary identities") {
    const auto& ctx = fixtures::small_context();
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const CompositeApproximation& c = fixtures::small_run(eps).composite;
        CHECK(c.boundary_defect_phi <= 1e-12);
        CHECK(c.boundary_defect_v <= 1e-12);
        const std::size_t N = c.Phi_a.size();
        for (std::size_t k = 0; k < c.Phi_a.levels(); ++k) {
            CHECK(std::abs(c.Phi_a.at(k, 0)) <= 1e-12);
            CHECK(std::abs(c.Phi_a.at(k, N - 1)) <= 1e-12);
            CHECK(std::abs(c.V_a.at(k, 0) - ctx.config.v_star) <= 1e-12);
            CHECK(std::abs(c.V_a.at(k, N - 1) - ctx.config.v_star) <= 1e-12);
        }
    }
}

TEST_CASE("layer tails are negligible at the midpoint") {
    const auto& ctx = fixtures::small_context();
    const auto& run = fixtures::small_run(1e-4);
    const Hierarchy h = run.hierarchy(ctx);
    const double se = 1e-2;
    for (std::size_t k = 0; k < run.composite.V_a.levels(); ++k) {
        const double interior = ctx.outer0.v.at_level(k, 0.5) + se * run.outer1.v.at_level(k, 0.5) +
                                homogenizer_b_v(h, 0.5, k);
        CHECK(std::abs(run.composite.V_a.at_level(k, 0.5) - interior) <= 1e-6);
    }
}

TEST_CASE("composite is close to invariant under the layer stretch") {
    const auto& ctx = fixtures::small_context();
    const auto& a = fixtures::small_run(1e-3);
    const auto& b = fixtures::small_run(1e-4);
    const std::size_t K = a.composite.V_a.levels() - 1;
    for (double z : {0.5, 1.0, 3.0}) {
        const double va = a.composite.V_a.at_level(K, z * std::sqrt(1e-3));
        const double vb = b.composite.V_a.at_level(K, z * std::sqrt(1e-4));
        const double lead = ctx.outer0.v.at_level(K, 0.0) + a.left.v_lead.at_level(K, z);
        CHECK(std::abs(va - vb) <= std::sqrt(1e-3));
        CHECK(std::abs(va - lead) <= std::sqrt(1e-3));
    }
}

TEST_CASE("error functionals of the composite against direct recomputation") {
    const auto& ctx = fixtures::small_context();
    const auto& run = fixtures::small_run(1e-3);
    const Hierarchy h = run.hierarchy(ctx);
    FullSolution fake = run.full;
    fake.phi = run.composite.Phi_a;
    fake.v = run.composite.V_a;
    const ErrorMetrics m = theorem_errors(fake, h, 0.1);

    const auto x = fake.grid.nodes();
    double e1 = 0.0;
    for (std::size_t k = 0; k < fake.phi.levels(); ++k)
        for (std::size_t i = 0; i < x.size(); ++i)
            e1 = std::max(e1, std::abs(fake.phi.at(k, i) - ctx.outer0.phi.at_level(k, x[i])));
    CHECK(m.e1_sup == doctest::Approx(e1).epsilon(1e-12));
    CHECK(m.e2_sup == doctest::Approx(direct_e2(fake.v, run, ctx)).epsilon(1e-12));
    CHECK(m.e1_sup <= 0.1);
}

TEST_CASE("e2 of the full solution with constant data") {
    const auto& ctx = fixtures::small_context();
    const double M = ctx.data.mass, v_star = ctx.config.v_star;
    for (double eps : {1e-2, 1e-4}) {
        const auto& run = fixtures::small_run(eps);
        const double r = 1.0 / std::sqrt(eps);
        const auto x = run.full.grid.nodes();
        double e2 = 0.0;
        for (std::size_t k = 0; k < run.full.v.levels(); ++k) {
            const double vI = v_star * std::exp(-M * run.full.v.times()[k]);
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double ref =
                    vI + run.left.v_lead.at_level(k, x[i] * r) + run.right.v_lead.at_level(k, (x[i] - 1.0) * r);
                e2 = std::max(e2, std::abs(run.full.v.at(k, i) - ref));
            }
        }
        CHECK(run.metrics.e2_sup == doctest::Approx(e2).epsilon(1e-8));
    }
}

TEST_CASE("weighted metrics are monotone in the window start") {
    const auto& ctx = fixtures::small_context();
    const auto& run = fixtures::small_run(1e-3);
    const Hierarchy h = run.hierarchy(ctx);
    const ErrorMetrics a = theorem_errors(run.full, h, 0.1);
    const ErrorMetrics b = theorem_errors(run.full, h, 0.3);
    CHECK(a.e1x_weighted >= b.e1x_weighted);
    CHECK(a.u_weighted >= b.u_weighted);
    CHECK(a.e1_sup == b.e1_sup);
    CHECK(a.e2_sup == b.e2_sup);
    CHECK_THROWS_AS(theorem_errors(run.full, h, 0.0), ParamError);
}
