#pragma once

#include "chemlayer/grid.hpp"
#include "chemlayer/polynomial.hpp"
#include "chemlayer/time_field.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chemlayer {

/// A scalar function on [0, 1]: a polynomial, an arbitrary closure, or a
/// table interpolated linearly between its nodes.
class Profile {
public:
    static Profile polynomial(Polynomial p);
    static Profile closure(std::function<double(double)> f);
    static Profile table(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;

    bool tabulated() const { return !table_x_.empty(); }
    const Polynomial* poly() const { return poly_ ? &*poly_ : nullptr; }
    std::span<const double> table_x() const { return table_x_; }
    std::span<const double> table_y() const { return table_y_; }

    std::vector<double> sample(std::span<const double> x) const;

private:
    std::optional<Polynomial> poly_;
    std::function<double(double)> f_;
    std::vector<double> table_x_, table_y_;
};

/// Initial pair (u₀, v₀) with its total mass M = ∫₀¹ u₀.
struct InitialData {
    std::string name;
    Profile u0;
    Profile v0;
    double mass = 0.0;

    /// Computes the mass and rejects data with min u₀ ≤ 0 or min v₀ < 0 (ParamError).
    static InitialData make(std::string name, Profile u0, Profile v0);

    static InitialData constant(double u, double v);
    /// u₀ = M + ½(4x(1−x))⁶(2x−1), v₀ = v*(1 − 0.3(4x(1−x))⁶): smooth, non-constant
    /// and compatible to third order at both ends.
    static InitialData bump(double mass, double v_star);
    static InitialData polynomials(std::vector<double> u_coeffs, std::vector<double> v_coeffs);
    /// Reads a CSV table with columns x,u0,v0 (an optional header line is skipped).
    static InitialData from_csv(const std::string& path);

    /// True when both profiles are closed-form (polynomial or closure).
    bool analytic() const { return !u0.tabulated() && !v0.tabulated(); }
};

struct Antiderivative {
    std::vector<double> phi0;
    double mass = 0.0;
};

/// M by composite trapezoid and φ₀(x) = ∫₀ˣ(u₀ − M) by cumulative trapezoid,
/// with φ₀(1) pinned to exactly 0. Throws ParamError when min u₀ ≤ 0.
Antiderivative antiderivative_transform(std::span<const double> x, std::span<const double> u0);

/// u = φₓ + M level by level.
TimeField recover_u(const TimeField& phi, double mass);

/// Boundary values of ∂ₜⁱφ^{I,0} at t = 0 for i = 1, 2, 3, generated from the
/// initial data through the outer equations.
struct CompatTraces {
    std::array<double, 3> left{};
    std::array<double, 3> right{};
    /// Differentiation noise estimate; zero on the exact polynomial route.
    std::array<double, 3> left_uncertainty{};
    std::array<double, 3> right_uncertainty{};
    bool exact = false;
};

/// Sampled data u₀, v₀ (the traces depend on φ₀ only through φ₀ₓ + M = u₀):
/// least-squares Chebyshev fits of degree 10 over the nodes within max(1/8, 60 nodes)
/// of each end give local Taylor polynomials, which are then evaluated exactly.
/// The uncertainty adds the change against degree-8 fits and against fits on
/// every other node. Needs at least 60 nodes.
CompatTraces compat_traces(std::span<const double> x, std::span<const double> u0, std::span<const double> v0);

/// Exact polynomial evaluation.
CompatTraces compat_traces(const Polynomial& phi0, const Polynomial& v0, double mass);

/// Dispatch: exact route for polynomial data, otherwise local fits on a uniform
/// 2048-cell grid (analytic closures) or on the table nodes.
CompatTraces compat_traces(const InitialData& data);

struct CompatViolation {
    std::string condition;  ///< "boundary_value" or "time_derivative_order_<i>"
    Side side = Side::left;
    double value = 0.0;
    double threshold = 0.0;
};

struct CompatReport {
    bool pass = true;
    double tol = 0.0;
    CompatTraces traces;
    std::vector<CompatViolation> violations;

    std::string summary() const;
};

/// Default tolerance: 1e−8 for analytic data, 1e−4 for tabulated data. A trace
/// violates when |value| > tol + uncertainty.
CompatReport check_compatibility(const InitialData& data, double v_star, std::optional<double> tol = {});

}  // namespace chemlayer
