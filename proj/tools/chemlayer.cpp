#include "chemlayer/errors.hpp"
#include "chemlayer/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

using namespace chemlayer;

namespace {

struct Overrides {
    std::string config;
    std::vector<double> eps;
    std::optional<double> alpha, nu, vstar, dt, zmax, tmin;
    std::optional<std::size_t> grid_n;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config, "JSON study config");
    app->add_option("--eps", o.eps, "diffusion parameter (repeatable)");
    app->add_option("--alpha", o.alpha, "corrector exponent");
    app->add_option("--nu", o.nu, "homogenizer decay exponent");
    app->add_option("--vstar", o.vstar, "boundary chemical value");
    app->add_option("--grid-n", o.grid_n, "full-solver cells");
    app->add_option("--dt", o.dt, "time step (0 = derived from the smallest eps)");
    app->add_option("--zmax", o.zmax, "half-line truncation");
    app->add_option("--tmin", o.tmin, "start of the weighted-metric window");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--format", o.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
}

StudyConfig resolve(const Overrides& o) {
    StudyConfig c = o.config.empty() ? StudyConfig::canonical() : StudyConfig::load(o.config);
    if (!o.eps.empty()) c.eps = o.eps;
    if (o.alpha) c.alpha = *o.alpha;
    if (o.nu) c.nu = *o.nu;
    if (o.vstar) c.v_star = *o.vstar;
    if (o.grid_n) c.grid_n = *o.grid_n;
    if (o.dt) c.dt = *o.dt;
    if (o.zmax) c.z_max = *o.zmax;
    if (o.tmin) c.t_min = *o.tmin;
    if (!o.out.empty()) c.output_dir = o.out;
    return c;
}

std::string tag(double v) {
    std::string s = format_number(v);
    for (char& ch : s)
        if (ch == '.') ch = 'p';
    return s;
}

int cmd_solve(const Overrides& o, const std::vector<double>& times) {
    StudyConfig c = resolve(o);
    if (c.eps.empty()) throw ParamError("solve: --eps is required");
    const double eps = c.eps.front();
    if (!(eps >= 0.0 && eps < 1.0)) throw ParamError("solve: eps must lie in [0, 1)");
    if (c.dt == 0.0 && eps == 0.0) c.dt = 1e-4;
    if (c.dt == 0.0) c.dt = std::pow(eps, c.alpha) / c.dt_factor;
    const InitialData data = c.make_data();
    const CompatReport compat = check_compatibility(data, c.v_star);
    if (!compat.pass) throw StageError("compat", compat.summary());
    const TimeGrid time(c.T, c.dt, c.record_dt);
    const Grid1D grid = build_layer_grid(c.grid_n, eps, c.grid_c);
    const auto t0 = std::chrono::steady_clock::now();
    const FullSolution sol = solve_full(data, eps, c.v_star, grid, time);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const TimeField u = sol.u();
    std::vector<double> snaps = times.empty() ? std::vector<double>{c.T} : times;
    for (double t : snaps) {
        std::vector<double> uu(grid.size()), vv(grid.size()), pp(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid.nodes()[i];
            uu[i] = u.interp(x, t);
            vv[i] = sol.v.interp(x, t);
            pp[i] = sol.phi.interp(x, t);
        }
        const std::string path =
            (std::filesystem::path(c.output_dir) / ("solve_eps" + tag(eps) + "_t" + tag(t) + ".csv")).string();
        write_columns_csv(path, {"x", "u", "v", "phi"}, {grid.nodes(), uu, vv, pp});
    }
    nlohmann::json meta = {{"eps", eps},
                           {"grid_cells", grid.cells()},
                           {"grid_kind", grid.kind() == GridKind::shishkin ? "shishkin" : "uniform"},
                           {"sigma", grid.sigma_left()},
                           {"dt", time.dt()},
                           {"steps", time.steps()},
                           {"T", c.T},
                           {"mass_defect", sol.mass_defect},
                           {"v_min", sol.v_bounds.min},
                           {"v_max", sol.v_bounds.max},
                           {"bound_violations", sol.v_bounds.violations},
                           {"wall_seconds", wall}};
    if (eps == 0.0) meta["boundary_ode_defect"] = boundary_ode_check(sol);
    std::cout << meta.dump(2) << '\n';
    return 0;
}

int cmd_profiles(const Overrides& o) {
    StudyConfig c = resolve(o);
    c.validate();
    const PipelineContext ctx = prepare_context(c);
    for (double eps : c.eps) {
        const PipelineRun run = build_profiles(ctx, eps);
        const std::size_t k = run.left.v_reg.levels() - 1;
        for (const LayerProfileSet* s : {&run.left, &run.right}) {
            const std::string name = std::string("profiles_") + to_string(s->side) + "_eps" + tag(eps) + ".csv";
            write_columns_csv((std::filesystem::path(c.output_dir) / name).string(),
                              {"s", "v_lead", "phi_first", "v_reg", "phi_reg", "phi_second", "v_first"},
                              {s->grid.nodes(), s->v_lead.level(k), s->phi_first.level(k), s->v_reg.level(k),
                               s->phi_reg.level(k), s->phi_second.level(k), s->v_first.level(k)});
        }
        write_columns_csv((std::filesystem::path(c.output_dir) / ("lambda_eps" + tag(eps) + ".csv")).string(),
                          {"t", "lambda1", "lambda2"},
                          {run.lambda_left.times, run.lambda_left.values, run.lambda_right.values});
        std::cout << "eps " << format_number(eps) << ": sup|Lambda1| " << format_number(run.lambda_left.sup())
                  << ", sup|v_reg - v_lead| " << format_number(layer_gap(run.left.v_reg, run.left.v_lead).sup)
                  << '\n';
    }
    return 0;
}

int cmd_study(const Overrides& o) {
    const StudyConfig c = resolve(o);
    const ConvergenceReport rep = run_study(c, [](const std::string& msg) { std::cerr << msg << '\n'; });
    write_report(rep, c.output_dir);
    std::cout << (o.format == "json" ? report_json(rep) : report_csv(rep));
    for (const auto& f : rep.flags) std::cerr << (f.pass ? "PASS " : "FAIL ") << f.name << ": " << f.detail << '\n';
    return rep.all_pass() ? 0 : 2;
}

int cmd_check() {
    const auto flags = run_invariant_suite([](const std::string& msg) { std::cout << msg << '\n'; });
    for (const auto& f : flags)
        if (!f.pass) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-layer laboratory for the consumption-type Keller-Segel system"};
    app.require_subcommand(1);
    Overrides o;
    std::vector<double> times;
    auto* solve = app.add_subcommand("solve", "full system at one eps, snapshot CSVs");
    add_common(solve, o);
    solve->add_option("--times", times, "snapshot times (default T)");
    auto* profiles = app.add_subcommand("profiles", "asymptotic hierarchy only");
    add_common(profiles, o);
    auto* study = app.add_subcommand("study", "eps sweep, rate fits and acceptance flags");
    add_common(study, o);
    auto* check = app.add_subcommand("check", "invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    try {
        if (*solve) return cmd_solve(o, times);
        if (*profiles) return cmd_profiles(o);
        if (*study) return cmd_study(o);
        if (*check) return cmd_check();
    } catch (const StageError& e) {
        std::cerr << "error in stage " << e.stage() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
