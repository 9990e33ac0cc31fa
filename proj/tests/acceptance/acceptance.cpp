// Canonical acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "chemlayer/errors.hpp"
#include "chemlayer/full.hpp"
#include "chemlayer/harness.hpp"
#include "chemlayer/outer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace chemlayer;

namespace {

struct Line {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

const SlopeCheck& slope(const ConvergenceReport& rep, const std::string& metric) {
    for (const auto& s : rep.slopes)
        if (s.metric == metric) return s;
    throw std::runtime_error("missing slope " + metric);
}

std::string describe(const SlopeCheck& s) {
    return "slope " + fmt(s.fit.slope) + (s.two_sided ? " target " + fmt(s.target) + " +/- " + fmt(s.tolerance)
                                                      : " >= " + fmt(s.target - s.tolerance)) +
           " (" + std::to_string(s.points) + " points)";
}

Line outer_oracle(const StudyConfig& cfg) {
    const double M = 1.5;
    const OuterSolution o = solve_outer0(InitialData::constant(M, 1.0), Grid1D::uniform(cfg.outer_n),
                                         TimeGrid(cfg.T, cfg.effective_dt(), cfg.record_dt));
    double ev = 0.0, ep = 0.0;
    for (std::size_t k = 0; k < o.v.levels(); ++k) {
        const double exact = std::exp(-M * o.v.times()[k]);
        for (std::size_t i = 0; i < o.v.size(); ++i) {
            ev = std::max(ev, std::abs(o.v.at(k, i) - exact) / exact);
            ep = std::max(ep, std::abs(o.phi.at(k, i)));
        }
    }
    return {1, "outer_oracle", ev <= 1e-10 && ep <= 1e-12,
            "max rel err v " + fmt(ev) + ", max |phi| " + fmt(ep)};
}

Line boundary_ode() {
    const InitialData data = InitialData::bump(1.0, 1.0);
    const Grid1D grid = build_layer_grid(256, 0.0);
    const double d1 = boundary_ode_check(solve_full(data, 0.0, 1.0, grid, TimeGrid(1.0, 1e-4, 1e-2)));
    const double d2 = boundary_ode_check(solve_full(data, 0.0, 1.0, grid, TimeGrid(1.0, 5e-5, 1e-2)));
    const double ratio = d1 / d2;
    return {4, "boundary_ode", d1 <= 1e-3 && std::abs(ratio - 2.0) <= 0.2,
            "defect " + fmt(d1) + " at dt=1e-4, ratio under halving " + fmt(ratio)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical acceptance run"};
    std::string config_path;
    std::string work = "acceptance_out";
    app.add_option("--config", config_path, "study config JSON (default: built-in canonical)");
    app.add_option("--work", work, "scratch directory for the two study reports");
    CLI11_PARSE(app, argc, argv);

    try {
        const StudyConfig cfg = config_path.empty() ? StudyConfig::canonical() : StudyConfig::load(config_path);
        std::vector<Line> lines;
        lines.push_back(outer_oracle(cfg));

        auto progress = [](const std::string& m) { std::cerr << "[study] " << m << '\n'; };
        const ConvergenceReport a = run_study(cfg, progress);
        const ConvergenceReport b = run_study(cfg, progress);

        double mass = 0.0, hphi = 0.0, hv = 0.0;
        std::size_t vf = 0, vl = 0;
        for (const auto& r : a.rows) {
            mass = std::max(mass, r.mass_defect);
            vf += r.full_bound_violations;
            vl += r.layer_bound_violations;
            hphi = std::max(hphi, r.homogenization_phi);
            hv = std::max(hv, r.homogenization_v);
        }
        lines.push_back({2, "mass_conservation", mass <= 1e-9, "max |int u - M| " + fmt(mass)});
        lines.push_back({3, "maximum_principle", vf == 0 && vl == 0,
                         std::to_string(vf) + " full / " + std::to_string(vl) + " layer violations"});
        lines.push_back(boundary_ode());

        const SlopeCheck& lam = slope(a, "lambda_sup");
        lines.push_back({5, "corrector_magnitude", lam.pass, describe(lam)});
        const SlopeCheck& gap = slope(a, "layer_gap");
        lines.push_back({6, "regularized_layer_gap", gap.pass, describe(gap)});
        lines.push_back({7, "homogenization", hphi <= 1e-12 && hv <= 1e-12,
                         "max |Phi_a| " + fmt(hphi) + ", max |V_a - v*| " + fmt(hv)});

        const SlopeCheck& e2 = slope(a, "e2_sup");
        const SlopeCheck& uw = slope(a, "u_weighted");
        const SlopeCheck& e1 = slope(a, "e1_sup");
        lines.push_back({8, "convergence_rates", e2.pass && uw.pass && e1.pass,
                         "e2_sup " + describe(e2) + "; u_weighted " + describe(uw) + "; e1_sup " + describe(e1)});
        const SlopeCheck& w = slope(a, "width");
        lines.push_back({9, "layer_thickness", w.pass, describe(w)});

        const std::filesystem::path root(work);
        write_report(a, (root / "run1").string());
        write_report(b, (root / "run2").string());
        const std::string c1 = slurp(root / "run1" / "study.csv");
        const std::string c2 = slurp(root / "run2" / "study.csv");
        lines.push_back({10, "determinism", !c1.empty() && c1 == c2,
                         c1 == c2 ? "study.csv byte-identical (" + std::to_string(c1.size()) + " bytes)"
                                  : "study.csv differs between runs"});

        bool all = true;
        for (const auto& l : lines) {
            std::cout << (l.pass ? "PASS" : "FAIL") << " criterion " << l.id << ' ' << l.name << ": " << l.detail
                      << '\n';
            all = all && l.pass;
        }
        std::cout << "study wall time " << fmt(a.total_seconds) << " s per run\n";
        return all ? 0 : 1;
    } catch (const StageError& e) {
        std::cerr << "error in stage " << e.stage() << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return 1;
}
