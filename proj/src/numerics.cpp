#include "chemlayer/numerics.hpp"

#include "chemlayer/errors.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

namespace chemlayer::num {

std::vector<double> fd_weights(double x0, std::span<const double> stencil, int order) {
    const std::size_t n = stencil.size();
    if (order < 0 || n <= static_cast<std::size_t>(order)) {
        throw ParamError("fd_weights: stencil too small for derivative order");
    }
    const auto m = static_cast<std::size_t>(order);
    std::vector<double> c(n * (m + 1), 0.0);
    auto C = [&](std::size_t i, std::size_t k) -> double& { return c[i * (m + 1) + k]; };
    double c1 = 1.0;
    double c4 = stencil[0] - x0;
    C(0, 0) = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = stencil[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = stencil[i] - stencil[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    C(i, k) = c1 * (static_cast<double>(k) * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                }
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                C(j, k) = (c4 * C(j, k) - static_cast<double>(k) * C(j, k - 1)) / c3;
            }
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = C(i, m);
    return w;
}

DiffOperator::DiffOperator(std::span<const double> x) : n_(x.size()) {
    if (n_ < 4) throw ParamError("DiffOperator: need at least 4 nodes");
    d1_.assign(3 * n_, 0.0);
    d2_.assign(3 * n_, 0.0);
    for (std::size_t i = 1; i + 1 < n_; ++i) {
        const double h1 = x[i] - x[i - 1];
        const double h2 = x[i + 1] - x[i];
        d1_[3 * i] = -h2 / (h1 * (h1 + h2));
        d1_[3 * i + 1] = (h2 - h1) / (h1 * h2);
        d1_[3 * i + 2] = h1 / (h2 * (h1 + h2));
        d2_[3 * i] = 2.0 / (h1 * (h1 + h2));
        d2_[3 * i + 1] = -2.0 / (h1 * h2);
        d2_[3 * i + 2] = 2.0 / (h2 * (h1 + h2));
    }
    d1_left_ = fd_weights(x[0], x.subspan(0, 3), 1);
    d1_right_ = fd_weights(x[n_ - 1], x.subspan(n_ - 3, 3), 1);
    d2_left_ = fd_weights(x[0], x.subspan(0, 4), 2);
    d2_right_ = fd_weights(x[n_ - 1], x.subspan(n_ - 4, 4), 2);
}

double DiffOperator::first_at(std::span<const double> f, std::size_t i) const {
    if (i == 0) return d1_left_[0] * f[0] + d1_left_[1] * f[1] + d1_left_[2] * f[2];
    if (i == n_ - 1) {
        return d1_right_[0] * f[n_ - 3] + d1_right_[1] * f[n_ - 2] + d1_right_[2] * f[n_ - 1];
    }
    return d1_[3 * i] * f[i - 1] + d1_[3 * i + 1] * f[i] + d1_[3 * i + 2] * f[i + 1];
}

double DiffOperator::second_at(std::span<const double> f, std::size_t i) const {
    if (i == 0) {
        return d2_left_[0] * f[0] + d2_left_[1] * f[1] + d2_left_[2] * f[2] + d2_left_[3] * f[3];
    }
    if (i == n_ - 1) {
        return d2_right_[0] * f[n_ - 4] + d2_right_[1] * f[n_ - 3] + d2_right_[2] * f[n_ - 2] +
               d2_right_[3] * f[n_ - 1];
    }
    return d2_[3 * i] * f[i - 1] + d2_[3 * i + 1] * f[i] + d2_[3 * i + 2] * f[i + 1];
}

void DiffOperator::first(std::span<const double> f, std::span<double> out) const {
    out[0] = first_at(f, 0);
    for (std::size_t i = 1; i + 1 < n_; ++i) {
        out[i] = d1_[3 * i] * f[i - 1] + d1_[3 * i + 1] * f[i] + d1_[3 * i + 2] * f[i + 1];
    }
    out[n_ - 1] = first_at(f, n_ - 1);
}

void DiffOperator::second(std::span<const double> f, std::span<double> out) const {
    out[0] = second_at(f, 0);
    for (std::size_t i = 1; i + 1 < n_; ++i) {
        out[i] = d2_[3 * i] * f[i - 1] + d2_[3 * i + 1] * f[i] + d2_[3 * i + 2] * f[i + 1];
    }
    out[n_ - 1] = second_at(f, n_ - 1);
}

ImplicitDiffusion::ImplicitDiffusion(const DiffOperator& D, double kappa, double dt)
    : D_(&D), kappa_(kappa), inv_dt_(1.0 / dt), lower_(D.size()), diag_(D.size()), upper_(D.size()),
      scratch_(D.size()) {
    if (!(dt > 0.0)) throw ParamError("ImplicitDiffusion: dt must be > 0");
}

void ImplicitDiffusion::solve(std::span<double> rhs, double left, double right, std::span<const double> reaction) {
    const std::size_t n = D_->size();
    lower_[0] = 0.0;
    diag_[0] = 1.0;
    upper_[0] = 0.0;
    rhs[0] = left;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        lower_[i] = -kappa_ * D_->lap_lower(i);
        diag_[i] = inv_dt_ - kappa_ * D_->lap_centre(i) + (reaction.empty() ? 0.0 : reaction[i]);
        upper_[i] = -kappa_ * D_->lap_upper(i);
    }
    lower_[n - 1] = 0.0;
    diag_[n - 1] = 1.0;
    upper_[n - 1] = 0.0;
    rhs[n - 1] = right;
    solve_tridiagonal(lower_, diag_, upper_, rhs, scratch_);
}

double trapezoid(std::span<const double> x, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) s += 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
    return s;
}

void cumulative_trapezoid(std::span<const double> x, std::span<const double> f, std::span<double> out) {
    out[0] = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        out[i + 1] = out[i] + 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
    }
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs, std::span<double> scratch) {
    const std::size_t n = diag.size();
    double beta = diag[0];
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw ParamError("fit_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw ParamError("fit_line: degenerate abscissae (all equal)");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ssr += r * r;
        fit.max_residual = std::max(fit.max_residual, std::abs(r));
    }
    if (n > 2) {
        fit.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
        const boost::math::students_t dist(static_cast<double>(n - 2));
        fit.slope_ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * fit.slope_stderr;
    }
    return fit;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParamError("fit_loglog: non-positive value");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly);
}

std::size_t bracket(std::span<const double> x, double v) {
    const std::size_t n = x.size();
    if (v <= x[0]) return 0;
    if (v >= x[n - 1]) return n - 2;
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    return static_cast<std::size_t>(it - x.begin()) - 1;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

}  // namespace chemlayer::num
