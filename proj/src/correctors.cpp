#include "chemlayer/correctors.hpp"

#include "chemlayer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace chemlayer {

double chi(double s) {
    if (!(s >= 0.0)) throw ParamError("chi: argument must be >= 0");
    if (s >= 1.0) return 0.0;
    return (1.0 - s) * std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double CorrectorSeries::value(double t) const {
    if (times.empty()) throw RangeError("CorrectorSeries: empty series");
    if (t < times.front() || t > times.back()) throw RangeError("CorrectorSeries: t outside [0, T]");
    const std::size_t k = num::bracket(times, t);
    if (t == times[k + 1]) return values[k + 1];
    const double w = (t - times[k]) / (times[k + 1] - times[k]);
    return values[k] + w * (values[k + 1] - values[k]);
}

double CorrectorSeries::sup() const { return num::max_abs(values); }

double CorrectorSeries::bound_constant() const { return sup() / std::pow(eps, alpha); }

CorrectorSeries build_corrector(Side side, const OuterTraces& traces, double v_star, double eps, double alpha,
                                std::size_t points_per_scale) {
    if (!(eps > 0.0)) throw ParamError("build_corrector: eps must be > 0");
    if (traces.times.size() < 2) throw ParamError("build_corrector: trace series too short");
    if (points_per_scale < 32) throw ParamError("build_corrector: need at least 32 points per eps^alpha");
    const BoundaryTrace& tr = traces.at(side);
    const std::size_t S = traces.steps();
    const auto& t = traces.times;
    const double scale = std::pow(eps, alpha);
    const double A0 = traces.rate(side, 0) * v_star;

    std::vector<double> A(S + 1);
    for (std::size_t n = 0; n <= S; ++n) A[n] = traces.rate(side, n) * tr.v[n];

    CorrectorSeries out;
    out.side = side;
    out.eps = eps;
    out.alpha = alpha;
    out.times = t;
    out.values.assign(S + 1, 0.0);

    const double cutoff = 12.0 * scale;
    double I = 0.0, G = 0.0;
    std::size_t n = 0;
    for (; n < S && t[n] < cutoff; ++n) {
        const double h = t[n + 1] - t[n];
        const auto m = static_cast<std::size_t>(
            std::max(1.0, std::ceil(h * static_cast<double>(points_per_scale) / scale)));
        const double hs = h / static_cast<double>(m);
        auto g = [&](std::size_t j) {
            const double w = static_cast<double>(j) / static_cast<double>(m);
            const double s = t[n] + w * h;
            const double As = A[n] + w * (A[n + 1] - A[n]);
            const double r = s / scale;
            return std::erf(r) * (As - A0 * chi(r));
        };
        double acc = 0.5 * (g(0) + g(m));
        for (std::size_t j = 1; j < m; ++j) acc += g(j);
        G += acc * hs;
        I += 0.5 * h * (A[n] + A[n + 1]);
        out.values[n + 1] = G - I;
    }
    for (std::size_t k = n + 1; k <= S; ++k) out.values[k] = out.values[n];
    return out;
}

double lambda(Side side, double t, const OuterTraces& traces, double v_star, double eps, double alpha) {
    if (traces.times.empty() || t < 0.0 || t > traces.times.back())
        throw RangeError("lambda: t outside [0, T]");
    return build_corrector(side, traces, v_star, eps, alpha).value(t);
}

num::LineFit corrector_bound_check(std::span<const CorrectorSeries> series) {
    std::vector<double> e, s;
    std::set<double> distinct;
    for (const auto& c : series) {
        e.push_back(c.eps);
        s.push_back(c.sup());
        distinct.insert(c.eps);
    }
    if (distinct.size() < 3) throw ParamError("corrector_bound_check: need at least three distinct eps values");
    return num::fit_loglog(e, s);
}

}  // namespace chemlayer
