#include "chemlayer/harness.hpp"

#include "chemlayer/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace chemlayer {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::vector<double> rates_at_levels(const OuterSolution& outer, Side side) {
    std::vector<double> r;
    for (std::size_t n : outer.time.recorded_steps()) r.push_back(outer.traces.rate(side, n));
    return r;
}

const std::set<std::string> kConfigKeys = {"eps",        "alpha",     "nu",       "v_star",      "T",
                                           "initial_data", "grid_n",  "grid_c",   "outer_n",     "z_max",
                                           "layer_cells", "dt",       "dt_factor", "record_dt",  "t_min",
                                           "output_dir"};
const std::set<std::string> kDataKeys = {"kind", "u", "v", "mass", "u_coeffs", "v_coeffs", "path"};

}  // namespace

StudyConfig StudyConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParamError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ParamError("config: top level must be an object");
    StudyConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (!kConfigKeys.count(key)) throw ParamError("config: unknown key '" + key + "'");
        }
        if (j.contains("eps")) {
            c.eps = j["eps"].is_array() ? j["eps"].get<std::vector<double>>()
                                        : std::vector<double>{j["eps"].get<double>()};
        }
        auto num = [&](const char* key, double& out) {
            if (j.contains(key)) out = j[key].get<double>();
        };
        auto count = [&](const char* key, std::size_t& out) {
            if (j.contains(key)) {
                const double v = j[key].get<double>();
                if (!(v >= 0.0) || v != std::floor(v)) throw ParamError(std::string("config: ") + key + " must be a non-negative integer");
                out = static_cast<std::size_t>(v);
            }
        };
        num("alpha", c.alpha);
        num("nu", c.nu);
        num("v_star", c.v_star);
        num("T", c.T);
        count("grid_n", c.grid_n);
        num("grid_c", c.grid_c);
        count("outer_n", c.outer_n);
        num("z_max", c.z_max);
        count("layer_cells", c.layer_cells);
        num("dt", c.dt);
        num("dt_factor", c.dt_factor);
        num("record_dt", c.record_dt);
        num("t_min", c.t_min);
        if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("initial_data")) {
            const json& d = j["initial_data"];
            if (!d.is_object()) throw ParamError("config: initial_data must be an object");
            for (const auto& [key, value] : d.items())
                if (!kDataKeys.count(key)) throw ParamError("config: unknown initial_data key '" + key + "'");
            if (d.contains("kind")) c.data.kind = d["kind"].get<std::string>();
            if (d.contains("u")) c.data.u = d["u"].get<double>();
            if (d.contains("v")) c.data.v = d["v"].get<double>();
            if (d.contains("mass")) c.data.mass = d["mass"].get<double>();
            if (d.contains("u_coeffs")) c.data.u_coeffs = d["u_coeffs"].get<std::vector<double>>();
            if (d.contains("v_coeffs")) c.data.v_coeffs = d["v_coeffs"].get<std::vector<double>>();
            if (d.contains("path")) c.data.path = d["path"].get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ParamError(std::string("config: ") + e.what());
    }
    return c;
}

StudyConfig StudyConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParamError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string StudyConfig::to_json_text() const {
    json d = {{"kind", data.kind}};
    if (data.kind == "constant") {
        d["u"] = data.u;
        d["v"] = data.v;
    } else if (data.kind == "bump") {
        d["mass"] = data.mass;
    } else if (data.kind == "polynomial") {
        d["u_coeffs"] = data.u_coeffs;
        d["v_coeffs"] = data.v_coeffs;
    } else {
        d["path"] = data.path;
    }
    const json j = {{"eps", eps},
                    {"alpha", alpha},
                    {"nu", nu},
                    {"v_star", v_star},
                    {"T", T},
                    {"initial_data", d},
                    {"grid_n", grid_n},
                    {"grid_c", grid_c},
                    {"outer_n", outer_n},
                    {"z_max", z_max},
                    {"layer_cells", layer_cells},
                    {"dt", dt},
                    {"dt_factor", dt_factor},
                    {"record_dt", record_dt},
                    {"t_min", t_min},
                    {"output_dir", output_dir}};
    return j.dump(2);
}

void StudyConfig::validate(std::size_t min_eps_count) const {
    if (eps.size() < min_eps_count)
        throw ParamError("config: need at least " + std::to_string(min_eps_count) + " eps values");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0 && eps[i] < 1.0)) throw ParamError("config: every eps must lie in (0, 1)");
        if (i > 0 && !(eps[i] < eps[i - 1])) throw ParamError("config: eps list must be strictly decreasing");
    }
    derive_iota0(alpha, nu);
    if (!(v_star > 0.0)) throw ParamError("config: v_star must be > 0");
    if (!(T > 0.0)) throw ParamError("config: T must be > 0");
    if (grid_n < 16 || grid_n % 2) throw ParamError("config: grid_n must be even and >= 16");
    if (!(grid_c > 0.0)) throw ParamError("config: grid_c must be > 0");
    if (outer_n < 16) throw ParamError("config: outer_n must be >= 16");
    if (!(z_max > 0.0)) throw ParamError("config: z_max must be > 0");
    if (layer_cells < 16) throw ParamError("config: layer_cells must be >= 16");
    if (!(dt >= 0.0)) throw ParamError("config: dt must be >= 0");
    if (dt == 0.0 && !(dt_factor > 0.0)) throw ParamError("config: dt_factor must be > 0");
    if (!(record_dt > 0.0)) throw ParamError("config: record_dt must be > 0");
    if (!(t_min > 0.0 && t_min <= T)) throw ParamError("config: t_min must lie in (0, T]");
}

double StudyConfig::effective_dt() const {
    if (dt > 0.0) return dt;
    const double e = *std::min_element(eps.begin(), eps.end());
    return std::pow(e, alpha) / dt_factor;
}

InitialData StudyConfig::make_data() const {
    if (data.kind == "constant") return InitialData::constant(data.u, data.v < 0.0 ? v_star : data.v);
    if (data.kind == "bump") return InitialData::bump(data.mass, v_star);
    if (data.kind == "polynomial") return InitialData::polynomials(data.u_coeffs, data.v_coeffs);
    if (data.kind == "table") return InitialData::from_csv(data.path);
    throw ParamError("config: unknown initial_data kind '" + data.kind + "'");
}

std::string StudyConfig::hash() const {
    const std::string text = to_json_text();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PipelineContext prepare_context(const StudyConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    PipelineContext ctx;
    ctx.config = config;
    stage("config", [&] {
        config.validate();
        ctx.exponents = derive_iota0(config.alpha, config.nu);
        return 0;
    });
    ctx.data = stage("transform", [&] { return config.make_data(); });
    ctx.compat = check_compatibility(ctx.data, config.v_star);
    if (!ctx.compat.pass) throw StageError("compat", ctx.compat.summary());
    ctx.time = TimeGrid(config.T, config.effective_dt(), config.record_dt);
    ctx.outer0 = stage("outer0", [&] { return solve_outer0(ctx.data, Grid1D::uniform(config.outer_n), ctx.time); });
    ctx.grid_left = HalfLineGrid::make(Side::left, config.z_max, config.layer_cells);
    ctx.grid_right = HalfLineGrid::make(Side::right, config.z_max, config.layer_cells);
    ctx.lead_left = stage("layer_leading", [&] {
        return solve_layer_leading(Side::left, ctx.outer0.traces, config.v_star, ctx.grid_left, ctx.time);
    });
    ctx.lead_right = stage("layer_leading", [&] {
        return solve_layer_leading(Side::right, ctx.outer0.traces, config.v_star, ctx.grid_right, ctx.time);
    });
    ctx.phi_first_left = phi_layer_first(Side::left, ctx.lead_left.v, rates_at_levels(ctx.outer0, Side::left));
    ctx.phi_first_right = phi_layer_first(Side::right, ctx.lead_right.v, rates_at_levels(ctx.outer0, Side::right));
    ctx.wall_seconds = seconds_since(t0);
    return ctx;
}

Hierarchy PipelineRun::hierarchy(const PipelineContext& ctx) const {
    Hierarchy h;
    h.eps = eps;
    h.nu = ctx.config.nu;
    h.v_star = ctx.config.v_star;
    h.outer0 = &ctx.outer0;
    h.outer1 = &outer1;
    h.left = &left;
    h.right = &right;
    h.lambda_left = &lambda_left;
    h.lambda_right = &lambda_right;
    return h;
}

PipelineRun build_profiles(const PipelineContext& ctx, double eps) {
    const auto t0 = std::chrono::steady_clock::now();
    const StudyConfig& cfg = ctx.config;
    stage("params", [&] { return ModelParams::make(eps, cfg.v_star, ctx.outer0.mass, cfg.alpha, cfg.nu, cfg.T); });
    PipelineRun run;
    run.eps = eps;
    const OuterTraces& traces = ctx.outer0.traces;
    run.lambda_left = stage("correctors", [&] { return build_corrector(Side::left, traces, cfg.v_star, eps, cfg.alpha); });
    run.lambda_right =
        stage("correctors", [&] { return build_corrector(Side::right, traces, cfg.v_star, eps, cfg.alpha); });
    run.reg_left = stage("layer_regularized", [&] {
        return solve_layer_leading(Side::left, traces, cfg.v_star, ctx.grid_left, ctx.time, &run.lambda_left);
    });
    run.reg_right = stage("layer_regularized", [&] {
        return solve_layer_leading(Side::right, traces, cfg.v_star, ctx.grid_right, ctx.time, &run.lambda_right);
    });
    run.outer1 = stage("outer1", [&] {
        return solve_outer1(ctx.outer0, run.reg_left.phi_boundary, run.reg_right.phi_boundary);
    });
    run.second_left = stage("layer_second", [&] {
        return solve_layer_second(Side::left, ctx.grid_left, ctx.time, traces, run.outer1.traces, run.lambda_left,
                                  cfg.v_star);
    });
    run.second_right = stage("layer_second", [&] {
        return solve_layer_second(Side::right, ctx.grid_right, ctx.time, traces, run.outer1.traces, run.lambda_right,
                                  cfg.v_star);
    });
    auto assemble = [&](Side side, const LeadingLayer& reg, const SecondOrderLayer& second) {
        LayerProfileSet s;
        s.side = side;
        s.grid = side == Side::left ? ctx.grid_left : ctx.grid_right;
        s.v_lead = side == Side::left ? ctx.lead_left.v : ctx.lead_right.v;
        s.phi_first = side == Side::left ? ctx.phi_first_left : ctx.phi_first_right;
        s.v_reg = reg.v;
        s.phi_reg = phi_layer_first(side, reg.v, rates_at_levels(ctx.outer0, side));
        s.phi_second = second.phi;
        s.v_first = second.v;
        return s;
    };
    run.left = assemble(Side::left, run.reg_left, run.second_left);
    run.right = assemble(Side::right, run.reg_right, run.second_right);
    run.wall_seconds = seconds_since(t0);
    return run;
}

void complete_pipeline(const PipelineContext& ctx, PipelineRun& run) {
    const auto t0 = std::chrono::steady_clock::now();
    const StudyConfig& cfg = ctx.config;
    const double eps = run.eps;
    run.full = stage("full", [&] {
        return solve_full(ctx.data, eps, cfg.v_star, build_layer_grid(cfg.grid_n, eps, cfg.grid_c), ctx.time);
    });
    const Hierarchy h = run.hierarchy(ctx);
    run.composite = stage("composite", [&] { return build_composite(h, run.full.grid); });
    run.metrics = stage("metrics", [&] { return theorem_errors(run.full, h, cfg.t_min); });
    run.gap_left = layer_gap(run.left.v_reg, run.left.v_lead);
    run.gap_right = layer_gap(run.right.v_reg, run.right.v_lead);
    run.width = stage("metrics", [&] { return half_height_width(run.full, run.full.v.levels() - 1); });
    run.wall_seconds += seconds_since(t0);
}

PipelineRun run_pipeline(const PipelineContext& ctx, double eps) {
    PipelineRun run = build_profiles(ctx, eps);
    complete_pipeline(ctx, run);
    return run;
}

StudyRow summarize(const PipelineRun& run) {
    StudyRow r;
    r.eps = run.eps;
    r.e1_sup = run.metrics.e1_sup;
    r.e1x_weighted = run.metrics.e1x_weighted;
    r.e2_sup = run.metrics.e2_sup;
    r.u_weighted = run.metrics.u_weighted;
    r.layer_gap = run.gap_left.sup;
    r.lambda_sup = run.lambda_left.sup();
    r.width = run.width;
    r.mass_defect = run.full.mass_defect;
    r.full_bound_violations = run.full.v_bounds.violations;
    r.layer_bound_violations = run.reg_left.bounds.violations + run.reg_right.bounds.violations;
    r.homogenization_phi = run.composite.boundary_defect_phi;
    r.homogenization_v = run.composite.boundary_defect_v;
    r.lambda_constant = run.lambda_left.bound_constant();
    r.wall_seconds = run.wall_seconds;
    return r;
}

bool ConvergenceReport::all_pass() const {
    return std::all_of(flags.begin(), flags.end(), [](const Flag& f) { return f.pass; });
}

num::LineFit rate_fit(std::span<const double> eps, std::span<const double> metric, std::vector<std::string>* warnings,
                      std::size_t* used) {
    if (eps.size() != metric.size()) throw ParamError("rate_fit: eps and metric lengths differ");
    std::vector<double> e, m;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (metric[i] > 0.0 && eps[i] > 0.0) {
            e.push_back(eps[i]);
            m.push_back(metric[i]);
        } else if (warnings) {
            warnings->push_back("rate_fit: dropped non-positive pair at eps = " + format_number(eps[i]));
        }
    }
    if (e.size() < 3) throw ParamError("rate_fit: fewer than three positive pairs");
    if (used) *used = e.size();
    return num::fit_loglog(e, m);
}

void evaluate_flags(ConvergenceReport& rep) {
    rep.slopes.clear();
    rep.flags.clear();
    rep.exponents = derive_iota0(rep.config.alpha, rep.config.nu);
    const Exponents& ex = rep.exponents;
    const double a = rep.config.alpha;
    std::vector<double> eps;
    for (const auto& r : rep.rows) eps.push_back(r.eps);
    auto column = [&](double StudyRow::*field) {
        std::vector<double> v;
        for (const auto& r : rep.rows) v.push_back(r.*field);
        return v;
    };
    auto slope = [&](const std::string& name, double StudyRow::*field, double target, double tol, bool two_sided) {
        SlopeCheck s;
        s.metric = name;
        s.target = target;
        s.tolerance = tol;
        s.two_sided = two_sided;
        try {
            s.fit = rate_fit(eps, column(field), &rep.warnings, &s.points);
            s.pass = two_sided ? std::abs(s.fit.slope - target) <= tol : s.fit.slope >= target - tol;
        } catch (const ParamError& e) {
            rep.warnings.push_back(name + ": " + e.what());
            s.pass = false;
        }
        rep.slopes.push_back(s);
        std::ostringstream os;
        os << "slope " << s.fit.slope << (two_sided ? " within " : " >= ") << (two_sided ? target : target - tol);
        if (two_sided) os << " +/- " << tol;
        rep.flags.push_back({"slope_" + name, s.pass, os.str()});
    };
    slope("lambda_sup", &StudyRow::lambda_sup, a, 0.05, false);
    slope("layer_gap", &StudyRow::layer_gap, a / 2.0, 0.1, false);
    slope("e2_sup", &StudyRow::e2_sup, ex.v_sup, 0.05, false);
    slope("u_weighted", &StudyRow::u_weighted, ex.phi_x_weighted, 0.05, false);
    slope("e1_sup", &StudyRow::e1_sup, ex.phi_sup, 0.05, false);
    slope("e1x_weighted", &StudyRow::e1x_weighted, ex.phi_x_weighted, 0.05, false);
    slope("width", &StudyRow::width, 0.5, 0.1, true);

    double mass = 0.0, hphi = 0.0, hv = 0.0;
    std::size_t vf = 0, vl = 0;
    for (const auto& r : rep.rows) {
        mass = std::max(mass, r.mass_defect);
        hphi = std::max(hphi, r.homogenization_phi);
        hv = std::max(hv, r.homogenization_v);
        vf += r.full_bound_violations;
        vl += r.layer_bound_violations;
    }
    rep.flags.push_back({"mass_conservation", mass <= 1e-9, "max |int u - M| = " + format_number(mass)});
    rep.flags.push_back({"maximum_principle", vf == 0 && vl == 0,
                         std::to_string(vf) + " full / " + std::to_string(vl) + " layer violations"});
    rep.flags.push_back({"homogenization", hphi <= 1e-12 && hv <= 1e-12,
                         "max |Phi_a| = " + format_number(hphi) + ", max |V_a - v*| = " + format_number(hv)});
}

ConvergenceReport run_study(const StudyConfig& config, const ProgressFn& progress) {
    const auto t0 = std::chrono::steady_clock::now();
    config.validate(3);
    ConvergenceReport rep;
    rep.config = config;
    rep.config_hash = config.hash();
    const PipelineContext ctx = prepare_context(config);
    rep.context_seconds = ctx.wall_seconds;
    if (progress) progress("shared stages done in " + format_number(ctx.wall_seconds) + " s");

    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CHEMLAYER_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) workers = static_cast<std::size_t>(n);
    }
    workers = std::min(workers, config.eps.size());

    std::vector<StudyRow> rows(config.eps.size());
    std::vector<std::exception_ptr> errors(config.eps.size());
    std::atomic<std::size_t> next{0};
    std::mutex log;
    auto work = [&] {
        for (std::size_t i = next++; i < config.eps.size(); i = next++) {
            try {
                rows[i] = summarize(run_pipeline(ctx, config.eps[i]));
                if (progress) {
                    std::lock_guard lock(log);
                    progress("eps = " + format_number(config.eps[i]) + " done in " +
                             format_number(rows[i].wall_seconds) + " s");
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::sort(rows.begin(), rows.end(), [](const StudyRow& a, const StudyRow& b) { return a.eps > b.eps; });
    rep.rows = std::move(rows);
    evaluate_flags(rep);
    rep.total_seconds = seconds_since(t0);
    return rep;
}

}  // namespace chemlayer
