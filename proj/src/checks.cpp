#include "chemlayer/errors.hpp"
#include "chemlayer/harness.hpp"

#include <cmath>
#include <sstream>

namespace chemlayer {

namespace {

std::string fmt(double v) { return format_number(v); }

StudyConfig small_config() {
    StudyConfig c;
    c.eps = {1e-2, 1e-3, 1e-4};
    c.grid_n = 256;
    c.outer_n = 128;
    c.layer_cells = 400;
    c.dt = 1e-4;
    c.record_dt = 1e-2;
    return c;
}

}  // namespace

std::vector<Flag> run_invariant_suite(const ProgressFn& progress) {
    std::vector<Flag> flags;
    auto add = [&](std::string name, bool pass, std::string detail) {
        if (progress) progress((pass ? "PASS " : "FAIL ") + name + ": " + detail);
        flags.push_back({std::move(name), pass, std::move(detail)});
    };
    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            add(name, false, std::string("exception: ") + e.what());
        }
    };

    guarded("iota0", [&] {
        const Exponents ex = derive_iota0(1.1, 0.2);
        add("iota0", std::abs(ex.iota0 - 0.55) < 1e-15, "iota0 = " + fmt(ex.iota0));
    });

    guarded("outer_constant_oracle", [&] {
        const InitialData d = InitialData::constant(1.5, 1.0);
        const OuterSolution o = solve_outer0(d, Grid1D::uniform(128), TimeGrid(1.0, 1e-3, 1e-2));
        double ev = 0.0, ep = 0.0;
        for (std::size_t k = 0; k < o.v.levels(); ++k) {
            const double ref = std::exp(-1.5 * o.v.times()[k]);
            for (std::size_t i = 0; i < o.v.size(); ++i) {
                ev = std::max(ev, std::abs(o.v.at(k, i) - ref) / ref);
                ep = std::max(ep, std::abs(o.phi.at(k, i)));
            }
        }
        add("outer_constant_oracle", ev <= 1e-10 && ep <= 1e-12,
            "max rel v error " + fmt(ev) + ", max |phi| " + fmt(ep));
    });

    guarded("outer_dirichlet_and_monotone", [&] {
        const InitialData d = InitialData::bump(1.0, 1.0);
        const OuterSolution o = solve_outer0(d, Grid1D::uniform(128), TimeGrid(1.0, 1e-3, 1e-2));
        double e = 0.0;
        for (std::size_t k = 0; k < o.phi.levels(); ++k)
            e = std::max({e, std::abs(o.phi.at(k, 0)), std::abs(o.phi.at(k, o.phi.size() - 1))});
        add("outer_dirichlet_and_monotone", e == 0.0 && o.v_monotone && o.rate_min > 0.0,
            "boundary |phi| " + fmt(e) + ", min(phi_x+M) " + fmt(o.rate_min));
    });

    guarded("compat_gate", [&] {
        const bool bump_ok = check_compatibility(InitialData::bump(1.0, 1.0), 1.0).pass;
        const InitialData bad = InitialData::polynomials({1.5}, {0.5, 0.0, 1.0, -1.0});
        const CompatReport r = check_compatibility(bad, 1.0);
        bool named = false;
        for (const auto& v : r.violations) named |= v.condition == "boundary_value" && v.side == Side::left;
        add("compat_gate", bump_ok && !r.pass && named, bump_ok ? r.summary() : "bump data rejected");
    });

    guarded("boundary_ode_formula", [&] {
        const InitialData d = InitialData::bump(1.0, 1.0);
        const Grid1D g = Grid1D::uniform(128);
        const double d1 = boundary_ode_check(solve_full(d, 0.0, 1.0, g, TimeGrid(1.0, 1e-4, 1e-2)));
        const double d2 = boundary_ode_check(solve_full(d, 0.0, 1.0, g, TimeGrid(1.0, 5e-5, 1e-2)));
        const double ratio = d1 / d2;
        add("boundary_ode_formula", d1 <= 1e-3 && ratio > 1.8 && ratio < 2.2,
            "defect " + fmt(d1) + " at dt=1e-4, ratio " + fmt(ratio) + " under halving");
    });

    guarded("pipeline_invariants", [&] {
        const StudyConfig c = small_config();
        const PipelineContext ctx = prepare_context(c);
        double mass = 0.0, hphi = 0.0, hv = 0.0;
        std::size_t viol = 0;
        std::string first_row;
        for (double eps : c.eps) {
            const PipelineRun run = run_pipeline(ctx, eps);
            mass = std::max(mass, run.full.mass_defect);
            hphi = std::max(hphi, run.composite.boundary_defect_phi);
            hv = std::max(hv, run.composite.boundary_defect_v);
            viol += run.full.v_bounds.violations + run.reg_left.bounds.violations + run.reg_right.bounds.violations +
                    ctx.lead_left.bounds.violations + ctx.lead_right.bounds.violations;
        }
        add("mass_conservation", mass <= 1e-9, "max |int u - M| " + fmt(mass));
        add("maximum_principle", viol == 0, std::to_string(viol) + " violations");
        add("homogenization", hphi <= 1e-12 && hv <= 1e-12, "|Phi_a| " + fmt(hphi) + ", |V_a - v*| " + fmt(hv));
        const StudyRow a = summarize(run_pipeline(ctx, c.eps[1]));
        const StudyRow b = summarize(run_pipeline(prepare_context(c), c.eps[1]));
        const bool same = a.e1_sup == b.e1_sup && a.e1x_weighted == b.e1x_weighted && a.e2_sup == b.e2_sup &&
                          a.u_weighted == b.u_weighted && a.layer_gap == b.layer_gap && a.lambda_sup == b.lambda_sup;
        add("determinism", same, same ? "identical metric rows" : "metric rows differ");
    });
    return flags;
}

}  // namespace chemlayer
