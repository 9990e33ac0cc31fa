#include "chemlayer/errors.hpp"
#include "chemlayer/harness.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace chemlayer {

using nlohmann::json;

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string report_csv(const ConvergenceReport& rep) {
    std::ostringstream os;
    os << "eps,e1_sup,e1x_weighted,e2_sup,u_weighted,layer_gap,lambda_sup\n";
    for (const auto& r : rep.rows) {
        os << format_number(r.eps) << ',' << format_number(r.e1_sup) << ',' << format_number(r.e1x_weighted) << ','
           << format_number(r.e2_sup) << ',' << format_number(r.u_weighted) << ',' << format_number(r.layer_gap) << ','
           << format_number(r.lambda_sup) << '\n';
    }
    return os.str();
}

std::string report_json(const ConvergenceReport& rep, bool include_timing) {
    json rows = json::array();
    for (const auto& r : rep.rows) {
        json row = {{"eps", r.eps},
                    {"e1_sup", r.e1_sup},
                    {"e1x_weighted", r.e1x_weighted},
                    {"e2_sup", r.e2_sup},
                    {"u_weighted", r.u_weighted},
                    {"layer_gap", r.layer_gap},
                    {"lambda_sup", r.lambda_sup},
                    {"diagnostics",
                     {{"width", r.width},
                      {"mass_defect", r.mass_defect},
                      {"full_bound_violations", r.full_bound_violations},
                      {"layer_bound_violations", r.layer_bound_violations},
                      {"homogenization_phi", r.homogenization_phi},
                      {"homogenization_v", r.homogenization_v},
                      {"lambda_constant", r.lambda_constant}}}};
        if (include_timing) row["wall_seconds"] = r.wall_seconds;
        rows.push_back(row);
    }
    json slopes = json::array();
    for (const auto& s : rep.slopes) {
        slopes.push_back({{"metric", s.metric},
                          {"slope", s.fit.slope},
                          {"ci95", s.fit.slope_ci95},
                          {"max_residual", s.fit.max_residual},
                          {"points", s.points},
                          {"target", s.target},
                          {"tolerance", s.tolerance},
                          {"two_sided", s.two_sided},
                          {"pass", s.pass}});
    }
    json flags = json::array();
    for (const auto& f : rep.flags) flags.push_back({{"name", f.name}, {"pass", f.pass}, {"detail", f.detail}});
    json j = {{"config", json::parse(rep.config.to_json_text())},
              {"exponents",
               {{"iota0", rep.exponents.iota0},
                {"phi_sup", rep.exponents.phi_sup},
                {"phi_x_weighted", rep.exponents.phi_x_weighted},
                {"v_sup", rep.exponents.v_sup}}},
              {"rows", rows},
              {"slopes", slopes},
              {"flags", flags},
              {"warnings", rep.warnings},
              {"pass", rep.all_pass()}};
    json prov = {{"config_hash", rep.config_hash}, {"version", "0.1.0"}, {"compiler", __VERSION__}};
    if (include_timing) {
        prov["context_seconds"] = rep.context_seconds;
        prov["total_seconds"] = rep.total_seconds;
    }
    j["provenance"] = prov;
    return j.dump(2) + "\n";
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParamError("cannot write " + path.string());
    out << text;
}

}  // namespace

void write_report(const ConvergenceReport& rep, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_text(std::filesystem::path(dir) / "study.csv", report_csv(rep));
    write_text(std::filesystem::path(dir) / "study.json", report_json(rep));
}

void write_columns_csv(const std::string& path, const std::vector<std::string>& names,
                       const std::vector<std::span<const double>>& columns) {
    if (names.size() != columns.size()) throw ParamError("write_columns_csv: names and columns differ");
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != n) throw ParamError("write_columns_csv: columns differ in length");
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ostringstream os;
    for (std::size_t j = 0; j < names.size(); ++j) os << (j ? "," : "") << names[j];
    os << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) os << (j ? "," : "") << format_number(columns[j][i]);
        os << '\n';
    }
    write_text(path, os.str());
}

}  // namespace chemlayer
