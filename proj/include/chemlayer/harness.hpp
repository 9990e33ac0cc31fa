#pragma once

#include "chemlayer/composite.hpp"
#include "chemlayer/correctors.hpp"
#include "chemlayer/full.hpp"
#include "chemlayer/layer.hpp"
#include "chemlayer/numerics.hpp"
#include "chemlayer/outer.hpp"
#include "chemlayer/params.hpp"
#include "chemlayer/transform.hpp"

#include <functional>
#include <string>
#include <vector>

namespace chemlayer {

/// Which initial data a study uses.
struct DataSpec {
    std::string kind = "constant";  ///< constant | bump | polynomial | table
    double u = 1.5;                 ///< constant u₀
    double v = -1.0;                ///< constant v₀; negative means v*
    double mass = 1.0;              ///< bump mass
    std::vector<double> u_coeffs;   ///< polynomial u₀, increasing degree
    std::vector<double> v_coeffs;   ///< polynomial v₀
    std::string path;               ///< table CSV (x,u0,v0)
};

struct StudyConfig {
    std::vector<double> eps{1e-2, 3.16e-3, 1e-3, 3.16e-4, 1e-4};
    double alpha = 1.1;
    double nu = 0.2;
    double v_star = 1.0;
    double T = 1.0;
    DataSpec data;
    std::size_t grid_n = 1024;    ///< full-solver cells (Shishkin)
    double grid_c = 2.0;          ///< Shishkin constant c in σ = c√ε ln N
    std::size_t outer_n = 512;    ///< outer-solver cells (uniform)
    double z_max = 20.0;          ///< half-line truncation
    std::size_t layer_cells = 800;
    double dt = 0.0;              ///< 0 selects min(ε)^α / dt_factor
    double dt_factor = 8.0;
    double record_dt = 1e-3;      ///< spacing of stored time levels
    double t_min = 0.1;           ///< start of the weighted-metric window
    std::string output_dir = "out";

    static StudyConfig canonical() { return {}; }
    /// Parses the JSON config schema; unknown keys are rejected (ParamError).
    static StudyConfig from_json_text(const std::string& text);
    static StudyConfig load(const std::string& path);
    std::string to_json_text() const;

    /// ParamError unless every ε ∈ (0, 1), the list strictly decreases and the
    /// remaining dials are admissible. `min_eps_count` is 3 for a study.
    void validate(std::size_t min_eps_count = 1) const;
    double effective_dt() const;
    InitialData make_data() const;
    /// FNV-1a hash of the canonical JSON text, hex.
    std::string hash() const;
};

/// Stages that do not depend on ε: initial data, compatibility gate, leading outer
/// solution and the unregularized leading layers on both sides.
struct PipelineContext {
    StudyConfig config;
    Exponents exponents;
    InitialData data;
    CompatReport compat;
    TimeGrid time;
    OuterSolution outer0;
    HalfLineGrid grid_left;
    HalfLineGrid grid_right;
    LeadingLayer lead_left;
    LeadingLayer lead_right;
    TimeField phi_first_left;
    TimeField phi_first_right;
    double wall_seconds = 0.0;
};

/// Throws StageError("compat", …) when the gate fails, and StageError naming the
/// failing stage for any solver abort.
PipelineContext prepare_context(const StudyConfig& config);

/// Everything computed for one ε.
struct PipelineRun {
    double eps = 0.0;
    CorrectorSeries lambda_left;
    CorrectorSeries lambda_right;
    LeadingLayer reg_left;   ///< v^{B,ε} with its φ boundary series and bound statistics
    LeadingLayer reg_right;
    FirstOrderOuter outer1;
    SecondOrderLayer second_left;
    SecondOrderLayer second_right;
    LayerProfileSet left;
    LayerProfileSet right;
    FullSolution full;
    CompositeApproximation composite;
    ErrorMetrics metrics;
    GapSeries gap_left;
    GapSeries gap_right;
    double width = 0.0;  ///< half-height width of v^ε at x = 0, t = T
    double wall_seconds = 0.0;

    Hierarchy hierarchy(const PipelineContext& ctx) const;
};

/// Asymptotic hierarchy for one ε: correctors → regularized layers → φ-layer
/// integrals → first-order outer → second-order layers.
PipelineRun build_profiles(const PipelineContext& ctx, double eps);

/// Full solve → composite → metrics on a run produced by build_profiles.
void complete_pipeline(const PipelineContext& ctx, PipelineRun& run);

/// build_profiles followed by complete_pipeline.
PipelineRun run_pipeline(const PipelineContext& ctx, double eps);

/// One row of the study table plus diagnostics that stay in the JSON report.
struct StudyRow {
    double eps = 0.0;
    double e1_sup = 0.0;
    double e1x_weighted = 0.0;
    double e2_sup = 0.0;
    double u_weighted = 0.0;
    double layer_gap = 0.0;
    double lambda_sup = 0.0;

    double width = 0.0;
    double mass_defect = 0.0;
    std::size_t full_bound_violations = 0;
    std::size_t layer_bound_violations = 0;
    double homogenization_phi = 0.0;
    double homogenization_v = 0.0;
    double lambda_constant = 0.0;  ///< sup|Λ₁| / ε^α
    double wall_seconds = 0.0;
};

StudyRow summarize(const PipelineRun& run);

struct SlopeCheck {
    std::string metric;
    num::LineFit fit;
    std::size_t points = 0;
    double target = 0.0;     ///< theoretical exponent
    double tolerance = 0.0;  ///< allowed shortfall (or two-sided half-width)
    bool two_sided = false;
    bool pass = false;
};

struct Flag {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ConvergenceReport {
    StudyConfig config;
    Exponents exponents;
    std::vector<StudyRow> rows;
    std::vector<SlopeCheck> slopes;
    std::vector<Flag> flags;
    std::vector<std::string> warnings;
    std::string config_hash;
    double context_seconds = 0.0;
    double total_seconds = 0.0;

    bool all_pass() const;
};

/// Least-squares slope of log(metric) against log(ε). Non-positive metrics are
/// dropped with a warning; fewer than three remaining pairs throw ParamError.
num::LineFit rate_fit(std::span<const double> eps, std::span<const double> metric,
                      std::vector<std::string>* warnings = nullptr, std::size_t* used = nullptr);

/// Slope checks and flags as pure functions of the rows.
void evaluate_flags(ConvergenceReport& report);

using ProgressFn = std::function<void(const std::string&)>;

/// Full ε sweep on a bounded worker pool (CHEMLAYER_THREADS caps it); rows are sorted by ε, decreasing.
ConvergenceReport run_study(const StudyConfig& config, const ProgressFn& progress = {});

/// Fast self-checks on small configurations: closed-form outer oracle, Dirichlet
/// identities, mass and maximum principles, homogenization identities, the ε = 0
/// boundary formula, the compatibility gate and run-to-run determinism.
std::vector<Flag> run_invariant_suite(const ProgressFn& progress = {});

/// Fixed columns: eps,e1_sup,e1x_weighted,e2_sup,u_weighted,layer_gap,lambda_sup.
std::string report_csv(const ConvergenceReport& report);
std::string report_json(const ConvergenceReport& report, bool include_timing = true);
/// Writes study.csv and study.json into `dir` (created if missing).
void write_report(const ConvergenceReport& report, const std::string& dir);

/// CSV with a header line and one row per node; all columns the same length.
void write_columns_csv(const std::string& path, const std::vector<std::string>& names,
                       const std::vector<std::span<const double>>& columns);

/// Number formatting used by every CSV writer (17 significant digits).
std::string format_number(double v);

}  // namespace chemlayer
