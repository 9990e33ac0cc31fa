#pragma once

#include <initializer_list>
#include <vector>

namespace chemlayer {

/// Dense real polynomial with coefficients in increasing degree.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);
    Polynomial(std::initializer_list<double> coeffs);

    static Polynomial constant(double c) { return Polynomial({c}); }

    const std::vector<double>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    double operator()(double x) const;
    Polynomial derivative() const;
    /// Antiderivative vanishing at x = 0.
    Polynomial antiderivative() const;
    double integral(double a, double b) const;
    /// Coefficients of q(y) = p(y + c).
    Polynomial shifted(double c) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(double s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

    /// p^k for k ≥ 0.
    Polynomial pow(unsigned k) const;

private:
    void trim();
    std::vector<double> c_{0.0};
};

}  // namespace chemlayer
