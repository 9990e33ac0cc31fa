#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chemlayer::num {

/// Finite-difference weights for the `order`-th derivative at x0 on an
/// arbitrary stencil (Fornberg's recursion).
std::vector<double> fd_weights(double x0, std::span<const double> stencil, int order);

/// Precomputed second-order derivative stencils on a (possibly nonuniform)
/// node set: three-point centered in the interior, three-point one-sided
/// first derivative and four-point one-sided second derivative at the ends.
class DiffOperator {
public:
    explicit DiffOperator(std::span<const double> x);

    std::size_t size() const noexcept { return n_; }

    void first(std::span<const double> f, std::span<double> out) const;
    void second(std::span<const double> f, std::span<double> out) const;
    double first_at(std::span<const double> f, std::size_t i) const;
    double second_at(std::span<const double> f, std::size_t i) const;

    // Interior three-point second-derivative coefficients (lower, centre, upper).
    double lap_lower(std::size_t i) const { return d2_[3 * i]; }
    double lap_centre(std::size_t i) const { return d2_[3 * i + 1]; }
    double lap_upper(std::size_t i) const { return d2_[3 * i + 2]; }

private:
    std::size_t n_;
    std::vector<double> d1_;  // 3 weights per interior node
    std::vector<double> d2_;
    std::vector<double> d1_left_, d1_right_;  // 3 weights
    std::vector<double> d2_left_, d2_right_;  // 4 weights
};

/// Backward-Euler diffusion rows on a DiffOperator's nodes:
/// (1/dt + r_i)·u_i − κ·(D²u)_i = rhs_i at interior nodes, u₀ and u_N prescribed.
class ImplicitDiffusion {
public:
    ImplicitDiffusion(const DiffOperator& D, double kappa, double dt);

    /// `rhs` holds the interior right-hand side on entry and the solution on exit.
    /// `reaction` is either empty or one entry per node.
    void solve(std::span<double> rhs, double left, double right, std::span<const double> reaction = {});

private:
    const DiffOperator* D_;
    double kappa_;
    double inv_dt_;
    std::vector<double> lower_, diag_, upper_, scratch_;
};

double trapezoid(std::span<const double> x, std::span<const double> f);

/// out[0] = 0, out[i] = ∫_{x0}^{xi} f by the trapezoid rule.
void cumulative_trapezoid(std::span<const double> x, std::span<const double> f, std::span<double> out);

/// Thomas algorithm. `rhs` is overwritten with the solution; `scratch` needs n entries.
/// Row i reads lower[i]·u[i-1] + diag[i]·u[i] + upper[i]·u[i+1] = rhs[i].
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs, std::span<double> scratch);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double slope_ci95 = 0.0;  // half-width of the 95% interval on the slope
    double max_residual = 0.0;
};

/// Least-squares line through (xs, ys). Needs at least two distinct xs.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// Least-squares slope of log(y) against log(x).
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Index i with x[i] <= v < x[i+1] (clamped to [0, n-2]); x strictly increasing, n >= 2.
std::size_t bracket(std::span<const double> x, double v);

double max_abs(std::span<const double> v);

}  // namespace chemlayer::num
