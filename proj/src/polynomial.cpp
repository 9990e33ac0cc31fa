#include "chemlayer/polynomial.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace chemlayer {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(0.0);
    trim();
}

Polynomial::Polynomial(std::initializer_list<double> coeffs) : Polynomial(std::vector<double>(coeffs)) {}

void Polynomial::trim() {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() == 1) return Polynomial{0.0};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(a));
}

double Polynomial::integral(double a, double b) const {
    const Polynomial P = antiderivative();
    return P(b) - P(a);
}

Polynomial Polynomial::shifted(double c) const {
    using Wide = boost::multiprecision::cpp_bin_float_quad;
    std::vector<Wide> q(c_.begin(), c_.end());
    const std::size_t n = q.size();
    const Wide w = c;
    for (std::size_t k = 0; k + 1 < n; ++k)
        for (std::size_t j = n - 1; j-- > k;) q[j] += w * q[j + 1];
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = static_cast<double>(q[j]);
    return Polynomial(std::move(out));
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    for (double& c : c_) c *= s;
    trim();
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::pow(unsigned k) const {
    Polynomial r{1.0};
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
}

}  // namespace chemlayer
