#include "chemlayer/composite.hpp"

#include "chemlayer/errors.hpp"
#include "chemlayer/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace chemlayer {

LinearResampler::LinearResampler(std::span<const double> source, std::span<const double> targets, bool zero_extend)
    : index_(targets.size()), weight_(targets.size()), inside_(targets.size(), 1) {
    for (std::size_t j = 0; j < targets.size(); ++j) {
        const double x = targets[j];
        if (x < source.front() || x > source.back()) {
            if (!zero_extend) throw RangeError("LinearResampler: target outside the source hull");
            inside_[j] = 0;
            continue;
        }
        const std::size_t i = num::bracket(source, x);
        index_[j] = i;
        weight_[j] = x == source[i + 1] ? 1.0 : (x - source[i]) / (source[i + 1] - source[i]);
    }
}

void LinearResampler::apply(std::span<const double> values, std::span<double> out) const {
    for (std::size_t j = 0; j < index_.size(); ++j) {
        if (!inside_[j]) {
            out[j] = 0.0;
            continue;
        }
        const std::size_t i = index_[j];
        const double w = weight_[j];
        if (w == 0.0)
            out[j] = values[i];
        else if (w == 1.0)
            out[j] = values[i + 1];
        else
            out[j] = values[i] + w * (values[i + 1] - values[i]);
    }
}

void Hierarchy::validate() const {
    if (!outer0) throw ParamError("composite: missing constituent outer0");
    if (!outer1) throw ParamError("composite: missing constituent outer1");
    if (!left) throw ParamError("composite: missing constituent left layer set");
    if (!right) throw ParamError("composite: missing constituent right layer set");
    if (!lambda_left) throw ParamError("composite: missing constituent Lambda_1");
    if (!lambda_right) throw ParamError("composite: missing constituent Lambda_2");
    if (!(eps > 0.0)) throw ParamError("composite: eps must be > 0");
    const std::size_t K = outer0->phi.levels();
    for (const TimeField* f : {&outer1->phi, &outer1->v, &left->v_reg, &left->phi_reg, &left->phi_second,
                               &left->v_first, &right->v_reg, &right->phi_reg, &right->phi_second, &right->v_first}) {
        if (f->levels() != K) throw ParamError("composite: constituents have different time levels");
    }
    const std::size_t S = outer0->time.steps();
    if (lambda_left->values.size() != S + 1 || lambda_right->values.size() != S + 1)
        throw ParamError("composite: corrector series do not match the solver time levels");
}

namespace {

/// Level-k scalars entering the homogenizers.
struct HomogenizerTerms {
    double phi_R_far, phi2_R_far, phi2_L_0;  // φ^{b,ε}, φ^{b,2} at −ε^{−1/2}; φ^{B,2}(0)
    double phi_L_far, phi2_L_far, phi2_R_0;  // φ^{B,ε}, φ^{B,2} at ε^{−1/2}; φ^{b,2}(0)
    double v_R_far, v1_R_far, lambda1;
    double v_L_far, v1_L_far, lambda2;
};

HomogenizerTerms terms(const Hierarchy& h, std::size_t k) {
    const double r = 1.0 / std::sqrt(h.eps);
    const std::size_t n = h.outer0->time.recorded_steps().at(k);
    const LayerProfileSet& L = *h.left;
    const LayerProfileSet& R = *h.right;
    HomogenizerTerms t{};
    t.phi_R_far = R.phi_reg.at_level(k, -r);
    t.phi2_R_far = R.phi_second.at_level(k, -r);
    t.phi2_L_0 = L.phi_second.at(k, L.grid.boundary_index());
    t.phi_L_far = L.phi_reg.at_level(k, r);
    t.phi2_L_far = L.phi_second.at_level(k, r);
    t.phi2_R_0 = R.phi_second.at(k, R.grid.boundary_index());
    t.v_R_far = R.v_reg.at_level(k, -r);
    t.v1_R_far = R.v_first.at_level(k, -r);
    t.lambda1 = h.lambda_left->values[n];
    t.v_L_far = L.v_reg.at_level(k, r);
    t.v1_L_far = L.v_first.at_level(k, r);
    t.lambda2 = h.lambda_right->values[n];
    return t;
}

double b_phi(const Hierarchy& h, const HomogenizerTerms& t, double x) {
    const double se = std::sqrt(h.eps), e = h.eps, en = std::pow(h.eps, h.nu);
    return -(1.0 - x) * (se * t.phi_R_far + e * t.phi2_R_far) - (1.0 - x) * std::exp(-x / en) * e * t.phi2_L_0 -
           x * (se * t.phi_L_far + e * t.phi2_L_far) - x * std::exp(-(1.0 - x) / en) * e * t.phi2_R_0;
}

double b_v(const Hierarchy& h, const HomogenizerTerms& t, double x) {
    const double se = std::sqrt(h.eps);
    return (x - 1.0) * (t.v_R_far + se * t.v1_R_far + t.lambda1) - x * (t.v_L_far + se * t.v1_L_far + t.lambda2);
}

std::vector<double> scaled(std::span<const double> x, double shift, double scale) {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - shift) * scale;
    return z;
}

}  // namespace

double homogenizer_b_phi(const Hierarchy& h, double x, std::size_t level) {
    h.validate();
    return b_phi(h, terms(h, level), x);
}

double homogenizer_b_v(const Hierarchy& h, double x, std::size_t level) {
    h.validate();
    return b_v(h, terms(h, level), x);
}

CompositeApproximation build_composite(const Hierarchy& h, const Grid1D& grid) {
    h.validate();
    const auto x = grid.nodes();
    const std::size_t N = x.size();
    const double se = std::sqrt(h.eps), r = 1.0 / se;
    const std::vector<double> z = scaled(x, 0.0, r), xi = scaled(x, 1.0, r);
    const LayerProfileSet& L = *h.left;
    const LayerProfileSet& R = *h.right;
    const LinearResampler outer(h.outer0->grid.nodes(), x, false);
    const LinearResampler left(L.grid.nodes(), z, true);
    const LinearResampler right(R.grid.nodes(), xi, true);

    CompositeApproximation c;
    c.eps = h.eps;
    const std::vector<double> times(h.outer0->phi.times().begin(), h.outer0->phi.times().end());
    c.Phi_a = TimeField(grid.shared_nodes(), times);
    c.V_a = TimeField(grid.shared_nodes(), times);

    std::vector<double> p0(N), p1(N), pL(N), pR(N), p2L(N), p2R(N);
    std::vector<double> v0(N), v1(N), vL(N), vR(N), v1L(N), v1R(N);
    for (std::size_t k = 0; k < times.size(); ++k) {
        outer.apply(h.outer0->phi.level(k), p0);
        outer.apply(h.outer1->phi.level(k), p1);
        left.apply(L.phi_reg.level(k), pL);
        right.apply(R.phi_reg.level(k), pR);
        left.apply(L.phi_second.level(k), p2L);
        right.apply(R.phi_second.level(k), p2R);
        outer.apply(h.outer0->v.level(k), v0);
        outer.apply(h.outer1->v.level(k), v1);
        left.apply(L.v_reg.level(k), vL);
        right.apply(R.v_reg.level(k), vR);
        left.apply(L.v_first.level(k), v1L);
        right.apply(R.v_first.level(k), v1R);
        const HomogenizerTerms t = terms(h, k);
        auto Phi = c.Phi_a.level(k);
        auto V = c.V_a.level(k);
        for (std::size_t i = 0; i < N; ++i) {
            Phi[i] = p0[i] + se * (p1[i] + pL[i] + pR[i]) + h.eps * (p2L[i] + p2R[i]) + b_phi(h, t, x[i]);
            V[i] = v0[i] + vL[i] + vR[i] + se * (v1[i] + v1L[i] + v1R[i]) + b_v(h, t, x[i]);
        }
        c.boundary_defect_phi = std::max({c.boundary_defect_phi, std::abs(Phi[0]), std::abs(Phi[N - 1])});
        c.boundary_defect_v =
            std::max({c.boundary_defect_v, std::abs(V[0] - h.v_star), std::abs(V[N - 1] - h.v_star)});
    }
    return c;
}

ErrorMetrics theorem_errors(const FullSolution& full, const Hierarchy& h, double t_min) {
    if (!(t_min > 0.0)) throw ParamError("theorem_errors: t_min must be > 0 for the weighted metrics");
    if (!h.outer0) throw ParamError("theorem_errors: missing constituent outer0");
    if (!h.left || !h.right) throw ParamError("theorem_errors: missing layer constituents");
    const OuterSolution& O = *h.outer0;
    if (full.phi.levels() != O.phi.levels()) throw ParamError("theorem_errors: time levels differ");
    for (std::size_t k = 0; k < O.phi.levels(); ++k)
        if (full.phi.times()[k] != O.phi.times()[k]) throw ParamError("theorem_errors: time levels differ");
    const double eps = full.eps;
    if (!(eps > 0.0)) throw ParamError("theorem_errors: eps must be > 0");

    const auto x = full.grid.nodes();
    const std::size_t N = x.size();
    const double r = 1.0 / std::sqrt(eps);
    const std::vector<double> z = scaled(x, 0.0, r), xi = scaled(x, 1.0, r);
    const LayerProfileSet& L = *h.left;
    const LayerProfileSet& R = *h.right;
    const LinearResampler outer(O.grid.nodes(), x, false);
    const LinearResampler left(L.grid.nodes(), z, true);
    const LinearResampler right(R.grid.nodes(), xi, true);
    const num::DiffOperator Dfull(x), Douter(O.grid.nodes()), DL(L.grid.nodes()), DR(R.grid.nodes());

    std::vector<double> p0(N), v0(N), vL(N), vR(N), p0x_c(O.grid.size()), p0x(N), pLz_c(L.grid.size()),
        pRz_c(R.grid.size()), pLz(N), pRz(N), px(N);
    ErrorMetrics m;
    m.t_min = t_min;
    const auto& steps = O.time.recorded_steps();
    for (std::size_t k = 0; k < O.phi.levels(); ++k) {
        const double t = O.phi.times()[k];
        const auto phi = full.phi.level(k);
        const auto v = full.v.level(k);
        outer.apply(O.phi.level(k), p0);
        outer.apply(O.v.level(k), v0);
        left.apply(L.v_lead.level(k), vL);
        right.apply(R.v_lead.level(k), vR);
        for (std::size_t i = 0; i < N; ++i) {
            m.e1_sup = std::max(m.e1_sup, std::abs(phi[i] - p0[i]));
            m.e2_sup = std::max(m.e2_sup, std::abs(v[i] - v0[i] - vL[i] - vR[i]));
        }
        if (t < t_min) continue;
        const double w = std::pow(t, 1.25);
        Douter.first(O.phi.level(k), p0x_c);
        outer.apply(p0x_c, p0x);
        DL.first(L.phi_first.level(k), pLz_c);
        DR.first(R.phi_first.level(k), pRz_c);
        left.apply(pLz_c, pLz);
        right.apply(pRz_c, pRz);
        Dfull.first(phi, px);
        const double aL = O.traces.rate(Side::left, steps[k]);
        const double aR = O.traces.rate(Side::right, steps[k]);
        double ex = 0.0, eu = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ex = std::max(ex, std::abs(px[i] - p0x[i] - (pLz[i] + pRz[i])));
            const double u = px[i] + full.mass;
            const double uI = p0x[i] + O.mass;
            const double uB = aL * std::expm1(vL[i]);
            const double ub = aR * std::expm1(vR[i]);
            eu = std::max(eu, std::abs(u - uI - uB - ub));
        }
        m.e1x_weighted = std::max(m.e1x_weighted, w * ex);
        m.u_weighted = std::max(m.u_weighted, w * eu);
    }
    return m;
}

}  // namespace chemlayer
