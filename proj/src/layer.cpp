#include "chemlayer/layer.hpp"

#include "chemlayer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <sstream>

namespace chemlayer {

namespace {

constexpr double kNewtonTol = 1e-12;
constexpr std::size_t kNewtonMaxIter = 8;
constexpr double kFixedPointTol = 1e-10;
constexpr std::size_t kFixedPointMaxSweeps = 5;

std::size_t boundary_index(Side side, std::size_t n) { return side == Side::left ? 0 : n - 1; }
std::size_t far_index(Side side, std::size_t n) { return side == Side::left ? n - 1 : 0; }

}  // namespace

void BoundStats::observe(std::span<const double> v, double upper) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    min = seen ? std::min(min, *lo) : *lo;
    max = seen ? std::max(max, *hi) : *hi;
    seen = true;
    const double floor = 1e-14 * std::abs(upper);
    for (double e : v)
        if (e < -floor || e > upper + floor) ++violations;
}

LeadingLayerStepper::LeadingLayerStepper(Side side, const HalfLineGrid& grid, const OuterTraces& traces,
                                         double v_star, double dt, const CorrectorSeries* corrector)
    : side_(side), traces_(&traces), corrector_(corrector), v_star_(v_star), dt_(dt), D_(grid.nodes()) {
    if (grid.side() != side) throw ParamError("LeadingLayerStepper: grid side does not match");
    if (corrector && corrector->values.size() != traces.times.size())
        throw ParamError("LeadingLayerStepper: corrector series does not match the solver time levels");
    const std::size_t n = grid.size();
    v_.assign(n, 0.0);
    for (auto* b : {&w_, &lo_, &di_, &up_, &res_, &scratch_, &half_}) b->assign(n, 0.0);
}

double LeadingLayerStepper::boundary_value(std::size_t n) const {
    const double g = v_star_ - traces_->at(side_).v[n];
    return corrector_ ? g + corrector_->values[n] : g;
}

bool LeadingLayerStepper::newton(std::span<const double> v_old, double a, double vI, double g, double dt,
                                 std::span<double> w) {
    const std::size_t n = v_old.size();
    const std::size_t ib = boundary_index(side_, n), ifar = far_index(side_, n);
    std::copy(v_old.begin(), v_old.end(), w.begin());
    w[ib] = g;
    w[ifar] = 0.0;
    const double inv_dt = 1.0 / dt;
    for (std::size_t it = 1; it <= kNewtonMaxIter; ++it) {
        lo_[0] = up_[0] = lo_[n - 1] = up_[n - 1] = 0.0;
        di_[0] = di_[n - 1] = 1.0;
        res_[0] = res_[n - 1] = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double e = std::exp(w[i]);
            const double lap = D_.lap_lower(i) * w[i - 1] + D_.lap_centre(i) * w[i] + D_.lap_upper(i) * w[i + 1];
            const double react = a * (vI * (e - 1.0) + e * w[i]);
            res_[i] = -((w[i] - v_old[i]) * inv_dt - lap + react);
            lo_[i] = -D_.lap_lower(i);
            di_[i] = inv_dt - D_.lap_centre(i) + a * (vI * e + e * (1.0 + w[i]));
            up_[i] = -D_.lap_upper(i);
        }
        num::solve_tridiagonal(lo_, di_, up_, res_, scratch_);
        double dmax = 0.0, wmax = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            w[i] += res_[i];
            dmax = std::max(dmax, std::abs(res_[i]));
            wmax = std::max(wmax, std::abs(w[i]));
        }
        if (!std::isfinite(dmax)) return false;
        if (dmax <= kNewtonTol * std::max(1.0, wmax)) {
            max_iters_ = std::max(max_iters_, it);
            return true;
        }
    }
    return false;
}

void LeadingLayerStepper::step() {
    if (n_ >= traces_->steps()) throw RangeError("LeadingLayerStepper: stepped past the final time");
    const BoundaryTrace& tr = traces_->at(side_);
    const std::size_t m = n_ + 1;
    const double a1 = traces_->rate(side_, m), vI1 = tr.v[m], g1 = boundary_value(m);
    if (!newton(v_, a1, vI1, g1, dt_, w_)) {
        ++halvings_;
        const double a0 = traces_->rate(side_, n_), vI0 = tr.v[n_], g0 = boundary_value(n_);
        const bool ok = newton(v_, 0.5 * (a0 + a1), 0.5 * (vI0 + vI1), 0.5 * (g0 + g1), 0.5 * dt_, half_) &&
                        newton(half_, a1, vI1, g1, 0.5 * dt_, w_);
        if (!ok) {
            std::ostringstream os;
            os << "layer solver (" << to_string(side_) << "): Newton failed at step " << m << " (t = "
               << traces_->times[m] << ", a = " << a1 << ", v_I = " << vI1 << ", boundary " << g1
               << ") after step halving";
            throw SolverError(os.str());
        }
    }
    v_.swap(w_);
    n_ = m;
}

void integrate_from_far(Side side, std::span<const double> z, std::span<const double> f, std::span<double> out) {
    const std::size_t n = z.size();
    if (side == Side::left) {
        out[n - 1] = 0.0;
        for (std::size_t i = n - 1; i-- > 0;) out[i] = out[i + 1] - 0.5 * (z[i + 1] - z[i]) * (f[i] + f[i + 1]);
    } else {
        out[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * (z[i] - z[i - 1]) * (f[i - 1] + f[i]);
    }
}

void phi_layer_profile(Side side, std::span<const double> z, std::span<const double> v, double a,
                       std::span<double> out) {
    std::vector<double> f(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) f[i] = a * std::expm1(v[i]);
    integrate_from_far(side, z, f, out);
}

TimeField phi_layer_first(Side side, const TimeField& v, std::span<const double> rate) {
    if (rate.size() != v.levels()) throw ParamError("phi_layer_first: rate series does not match the levels");
    TimeField phi(v.shared_nodes(), std::vector<double>(v.times().begin(), v.times().end()), true);
    for (std::size_t k = 0; k < v.levels(); ++k) phi_layer_profile(side, v.nodes(), v.level(k), rate[k], phi.level(k));
    return phi;
}

LeadingLayer solve_layer_leading(Side side, const OuterTraces& traces, double v_star, const HalfLineGrid& grid,
                                 const TimeGrid& time, const CorrectorSeries* corrector) {
    if (traces.steps() != time.steps()) throw ParamError("solve_layer_leading: traces do not match the time grid");
    LeadingLayerStepper st(side, grid, traces, v_star, time.dt(), corrector);
    LeadingLayer out;
    out.v = TimeField(grid.shared_nodes(), time.recorded_times(), true);
    out.phi_boundary.reserve(time.steps() + 1);
    const std::size_t ib = grid.boundary_index();
    std::vector<double> phi(grid.size());
    const double upper = v_star;
    std::size_t k = 0;
    auto record = [&](std::size_t n) {
        phi_layer_profile(side, grid.nodes(), st.v(), traces.rate(side, n), phi);
        out.phi_boundary.push_back(phi[ib]);
        out.bounds.observe(st.v(), upper);
        if (time.is_recorded(n)) {
            std::copy(st.v().begin(), st.v().end(), out.v.level(k).begin());
            ++k;
        }
    };
    record(0);
    for (std::size_t n = 0; n < time.steps(); ++n) {
        st.step();
        record(n + 1);
    }
    out.max_newton_iterations = st.max_newton_iterations();
    out.halvings = st.halvings();
    return out;
}

namespace {

/// Coefficients of the second-order layer problem at one time.
struct SecondCoeffs {
    double a, vI0, vI0x, phi0xx, phi1x, vI1;
    std::span<const double> v_eps;  // regularized leading layer
};

class SecondOrderStepper {
public:
    SecondOrderStepper(Side side, std::span<const double> z)
        : side_(side), z_(z), D_(z), n_(z.size()) {
        for (auto* b : {&v1_, &psi_, &phi2_, &vz_, &pz_, &v1z_, &F_, &rhs_, &react_, &trial_, &mid_, &vmid_})
            b->assign(n_, 0.0);
    }

    std::span<const double> v1() const { return v1_; }
    std::span<const double> psi() const { return psi_; }
    std::span<const double> phi2() const { return phi2_; }
    std::size_t max_sweeps() const { return max_sweeps_; }
    std::size_t halvings() const { return halvings_; }

    /// Advances v₁ by dt to a time with coefficients c1; c0 holds the start coefficients.
    void step(const SecondCoeffs& c0, const SecondCoeffs& c1, double dt) {
        if (advance(v1_, c1, dt, trial_)) {
            v1_.swap(trial_);
            return;
        }
        ++halvings_;
        for (std::size_t i = 0; i < n_; ++i) vmid_[i] = 0.5 * (c0.v_eps[i] + c1.v_eps[i]);
        SecondCoeffs cm{0.5 * (c0.a + c1.a),       0.5 * (c0.vI0 + c1.vI0),     0.5 * (c0.vI0x + c1.vI0x),
                        0.5 * (c0.phi0xx + c1.phi0xx), 0.5 * (c0.phi1x + c1.phi1x), 0.5 * (c0.vI1 + c1.vI1),
                        vmid_};
        if (!advance(v1_, cm, 0.5 * dt, mid_) || !advance(mid_, c1, 0.5 * dt, trial_)) {
            std::ostringstream os;
            os << "second-order layer (" << to_string(side_) << "): fixed-point iteration stalled after step halving";
            throw SolverError(os.str());
        }
        v1_.swap(trial_);
    }

private:
    num::ImplicitDiffusion& heat_for(double dt) {
        for (auto& [h, solver] : heat_)
            if (h == dt) return *solver;
        heat_.emplace_back(dt, std::make_unique<num::ImplicitDiffusion>(D_, 1.0, dt));
        return *heat_.back().second;
    }

    /// ψ and φ₂ for given v₁ (stored in psi_ / phi2_).
    void solve_phi(const SecondCoeffs& c, std::span<const double> v1) {
        D_.first(v1, v1z_);
        for (std::size_t i = 0; i < n_; ++i) {
            const double s = z_[i];
            F_[i] = vz_[i] * (c.phi0xx * s + c.phi1x) + v1z_[i] * (c.a + pz_[i]) + pz_[i] * c.vI0x;
        }
        if (side_ == Side::left) {
            psi_[n_ - 1] = 0.0;
            for (std::size_t i = n_ - 1; i-- > 0;) {
                const double h = z_[i + 1] - z_[i];
                psi_[i] = (psi_[i + 1] * (1.0 - 0.5 * h * vz_[i + 1]) - 0.5 * h * (F_[i] + F_[i + 1])) /
                          (1.0 + 0.5 * h * vz_[i]);
            }
        } else {
            psi_[0] = 0.0;
            for (std::size_t i = 0; i + 1 < n_; ++i) {
                const double h = z_[i + 1] - z_[i];
                psi_[i + 1] = (psi_[i] * (1.0 + 0.5 * h * vz_[i]) + 0.5 * h * (F_[i] + F_[i + 1])) /
                              (1.0 - 0.5 * h * vz_[i + 1]);
            }
        }
        integrate_from_far(side_, z_, psi_, phi2_);
    }

    bool advance(std::span<const double> v_old, const SecondCoeffs& c, double dt, std::span<double> out) {
        D_.first(c.v_eps, vz_);
        for (std::size_t i = 0; i < n_; ++i) {
            pz_[i] = c.a * std::expm1(c.v_eps[i]);
            react_[i] = c.a + pz_[i];
        }
        num::ImplicitDiffusion& heat = heat_for(dt);
        const std::size_t ib = boundary_index(side_, n_);
        const double g = -c.vI1;
        std::vector<double>& guess = guess_;
        guess.assign(v_old.begin(), v_old.end());
        guess[ib] = g;
        guess[far_index(side_, n_)] = 0.0;
        const double inv_dt = 1.0 / dt;
        for (std::size_t sweep = 1; sweep <= kFixedPointMaxSweeps; ++sweep) {
            solve_phi(c, guess);
            for (std::size_t i = 0; i < n_; ++i) {
                const double s = z_[i];
                rhs_[i] = v_old[i] * inv_dt - (pz_[i] * (c.vI0x * s + c.vI1) + (c.phi0xx * s + c.phi1x) * c.v_eps[i] +
                                               psi_[i] * (c.vI0 + c.v_eps[i]));
            }
            heat.solve(rhs_, side_ == Side::left ? g : 0.0, side_ == Side::left ? 0.0 : g, react_);
            double diff = 0.0, vmax = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                diff = std::max(diff, std::abs(rhs_[i] - guess[i]));
                vmax = std::max(vmax, std::abs(rhs_[i]));
            }
            std::copy(rhs_.begin(), rhs_.end(), guess.begin());
            if (diff <= kFixedPointTol * std::max(1.0, vmax)) {
                max_sweeps_ = std::max(max_sweeps_, sweep);
                solve_phi(c, guess);
                std::copy(guess.begin(), guess.end(), out.begin());
                return true;
            }
        }
        return false;
    }

    Side side_;
    std::span<const double> z_;
    num::DiffOperator D_;
    std::size_t n_;
    std::vector<std::pair<double, std::unique_ptr<num::ImplicitDiffusion>>> heat_;
    std::vector<double> guess_;
    std::vector<double> v1_, psi_, phi2_, vz_, pz_, v1z_, F_, rhs_, react_, trial_, mid_, vmid_;
    std::size_t max_sweeps_ = 0;
    std::size_t halvings_ = 0;
};

}  // namespace

SecondOrderLayer solve_layer_second(Side side, const HalfLineGrid& grid, const TimeGrid& time,
                                    const OuterTraces& outer, const FirstOrderTraces& first,
                                    const CorrectorSeries& corrector, double v_star) {
    const std::size_t S = time.steps();
    if (outer.steps() != S || first.v(side).size() != S + 1 || first.phi_x(side).size() != S + 1 ||
        corrector.values.size() != S + 1)
        throw ParamError("solve_layer_second: input series do not match the solver time levels");
    if (grid.side() != side) throw ParamError("solve_layer_second: grid side does not match");

    LeadingLayerStepper lead(side, grid, outer, v_star, time.dt(), &corrector);
    SecondOrderStepper st(side, grid.nodes());
    const BoundaryTrace& tr = outer.at(side);

    SecondOrderLayer out;
    const auto levels = time.recorded_times();
    out.phi = TimeField(grid.shared_nodes(), levels, true);
    out.phi_z = TimeField(grid.shared_nodes(), levels, true);
    out.v = TimeField(grid.shared_nodes(), levels, true);

    std::vector<double> v_prev(grid.size(), 0.0);
    auto coeffs = [&](std::size_t n, std::span<const double> v_eps) {
        return SecondCoeffs{outer.rate(side, n), tr.v[n],           tr.v_x[n],
                            tr.phi_xx[n],        first.phi_x(side)[n], first.v(side)[n],
                            v_eps};
    };

    std::size_t k = 0;
    auto record = [&](std::size_t n) {
        if (!time.is_recorded(n)) return;
        std::copy(st.phi2().begin(), st.phi2().end(), out.phi.level(k).begin());
        std::copy(st.psi().begin(), st.psi().end(), out.phi_z.level(k).begin());
        std::copy(st.v1().begin(), st.v1().end(), out.v.level(k).begin());
        ++k;
    };
    record(0);
    for (std::size_t n = 0; n < S; ++n) {
        std::copy(lead.v().begin(), lead.v().end(), v_prev.begin());
        lead.step();
        st.step(coeffs(n, v_prev), coeffs(n + 1, lead.v()), time.dt());
        record(n + 1);
    }
    out.max_sweeps = st.max_sweeps();
    out.halvings = st.halvings();
    return out;
}

GapSeries layer_gap(const TimeField& a, const TimeField& b) {
    if (a.levels() != b.levels() || a.size() != b.size()) throw ParamError("layer_gap: field shapes differ");
    for (std::size_t k = 0; k < a.levels(); ++k)
        if (a.times()[k] != b.times()[k]) throw ParamError("layer_gap: time levels differ");
    GapSeries g;
    g.per_level.resize(a.levels());
    for (std::size_t k = 0; k < a.levels(); ++k) {
        double m = 0.0;
        const auto ra = a.level(k), rb = b.level(k);
        for (std::size_t i = 0; i < ra.size(); ++i) m = std::max(m, std::abs(ra[i] - rb[i]));
        g.per_level[k] = m;
        g.sup = std::max(g.sup, m);
    }
    return g;
}

}  // namespace chemlayer
