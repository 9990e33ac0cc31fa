#include "chemlayer/transform.hpp"

#include "chemlayer/errors.hpp"
#include "chemlayer/numerics.hpp"

#include <Eigen/QR>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace chemlayer {

Profile Profile::polynomial(Polynomial p) {
    Profile r;
    r.poly_ = std::move(p);
    return r;
}

Profile Profile::closure(std::function<double(double)> f) {
    if (!f) throw ParamError("Profile: empty closure");
    Profile r;
    r.f_ = std::move(f);
    return r;
}

Profile Profile::table(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) throw ParamError("Profile: table columns differ in length");
    if (x.size() < 3) throw ParamError("Profile: table needs at least three rows");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ParamError("Profile: table abscissae must increase strictly");
    if (std::abs(x.front()) > 1e-12 || std::abs(x.back() - 1.0) > 1e-12)
        throw ParamError("Profile: table must span [0, 1]");
    x.front() = 0.0;
    x.back() = 1.0;
    Profile r;
    r.table_x_ = std::move(x);
    r.table_y_ = std::move(y);
    return r;
}

double Profile::operator()(double x) const {
    if (poly_) return (*poly_)(x);
    if (f_) return f_(x);
    const std::size_t i = num::bracket(table_x_, x);
    const double w = (x - table_x_[i]) / (table_x_[i + 1] - table_x_[i]);
    return table_y_[i] + w * (table_y_[i + 1] - table_y_[i]);
}

std::vector<double> Profile::sample(std::span<const double> x) const {
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [this](double s) { return (*this)(s); });
    return y;
}

InitialData InitialData::make(std::string name, Profile u0, Profile v0) {
    InitialData d{std::move(name), std::move(u0), std::move(v0), 0.0};
    if (const Polynomial* p = d.u0.poly()) {
        d.mass = p->integral(0.0, 1.0);
    } else if (d.u0.tabulated()) {
        d.mass = num::trapezoid(d.u0.table_x(), d.u0.table_y());
    } else {
        d.mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double x) { return d.u0(x); }, 0.0, 1.0, 15, 1e-14);
    }
    std::vector<double> probe(4097);
    for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = static_cast<double>(i) / 4096.0;
    auto check = [&](const Profile& p, auto&& ok, const char* msg) {
        for (double x : probe)
            if (!ok(p(x))) throw ParamError(msg);
        for (double y : p.table_y())
            if (!ok(y)) throw ParamError(msg);
    };
    check(d.u0, [](double u) { return u > 0.0; }, "initial data: min u0 must be > 0 (degenerate data unsupported)");
    check(d.v0, [](double v) { return v >= 0.0; }, "initial data: v0 must be >= 0");
    if (!(d.mass > 0.0)) throw ParamError("initial data: mass must be > 0");
    return d;
}

InitialData InitialData::constant(double u, double v) {
    return make("constant", Profile::polynomial(Polynomial::constant(u)),
                Profile::polynomial(Polynomial::constant(v)));
}

InitialData InitialData::bump(double mass, double v_star) {
    const Polynomial w6 = Polynomial{0.0, 4.0, -4.0}.pow(6);
    const Polynomial u = Polynomial::constant(mass) + 0.5 * (w6 * Polynomial{-1.0, 2.0});
    const Polynomial v = Polynomial::constant(v_star) - (0.3 * v_star) * w6;
    return make("bump", Profile::polynomial(u), Profile::polynomial(v));
}

InitialData InitialData::polynomials(std::vector<double> u_coeffs, std::vector<double> v_coeffs) {
    return make("polynomial", Profile::polynomial(Polynomial(std::move(u_coeffs))),
                Profile::polynomial(Polynomial(std::move(v_coeffs))));
}

InitialData InitialData::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParamError("initial data: cannot open " + path);
    std::vector<double> x, u, v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a, b, c;
        if (!(ss >> a >> b >> c)) {
            if (x.empty()) continue;  // header
            throw ParamError("initial data: malformed row " + std::to_string(lineno) + " in " + path);
        }
        x.push_back(a);
        u.push_back(b);
        v.push_back(c);
    }
    std::vector<double> x2 = x;
    return make("table:" + path, Profile::table(std::move(x), std::move(u)),
                Profile::table(std::move(x2), std::move(v)));
}

Antiderivative antiderivative_transform(std::span<const double> x, std::span<const double> u0) {
    if (x.size() != u0.size() || x.size() < 2) throw ParamError("antiderivative_transform: shape mismatch");
    if (*std::min_element(u0.begin(), u0.end()) <= 0.0)
        throw ParamError("antiderivative_transform: min u0 must be > 0 (degenerate data unsupported)");
    Antiderivative r;
    r.mass = num::trapezoid(x, u0);
    std::vector<double> shifted(u0.begin(), u0.end());
    for (double& s : shifted) s -= r.mass;
    r.phi0.resize(x.size());
    num::cumulative_trapezoid(x, shifted, r.phi0);
    r.phi0.front() = 0.0;
    r.phi0.back() = 0.0;
    return r;
}

TimeField recover_u(const TimeField& phi, double mass) {
    TimeField u(phi.shared_nodes(), std::vector<double>(phi.times().begin(), phi.times().end()), phi.zero_extend());
    const num::DiffOperator D(phi.nodes());
    for (std::size_t k = 0; k < phi.levels(); ++k) {
        auto out = u.level(k);
        D.first(phi.level(k), out);
        for (double& val : out) val += mass;
    }
    return u;
}

namespace {

std::array<double, 3> traces_at_origin(const Polynomial& phi0, const Polynomial& v0, double mass) {
    const Polynomial a = phi0.derivative() + Polynomial::constant(mass);
    const Polynomial vx = v0.derivative();
    const Polynomial av = a * v0;
    const Polynomial t1 = phi0.derivative().derivative() - a * vx;
    const Polynomial t1x = t1.derivative();
    const Polynomial t2 = t1x.derivative() + a * av.derivative() - t1x * vx;
    const Polynomial t2x = t2.derivative();
    const Polynomial t3 = t2x.derivative() - t2x * vx + 2.0 * (t1x * av.derivative()) +
                          a * (t1x * v0).derivative() - a * (a * a * v0).derivative();
    return {t1(0.0), t2(0.0), t3(0.0)};
}

/// Taylor polynomial in y = x − x_b of degree `degree`, from a least-squares
/// Chebyshev fit over the nodes within `width` of the end x_b.
Polynomial local_taylor(std::span<const double> x, std::span<const double> f, Side side, double width,
                        int degree) {
    const double xb = side == Side::left ? x.front() : x.back();
    std::vector<double> t, y;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::abs(x[i] - xb);
        if (d <= width * (1.0 + 1e-12)) {
            t.push_back(side == Side::left ? 2.0 * d / width - 1.0 : 1.0 - 2.0 * d / width);
            y.push_back(f[i]);
        }
    }
    const auto m = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd A(m, degree + 1);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double tkm1 = 1.0, tk = t[static_cast<std::size_t>(i)];
        A(i, 0) = 1.0;
        if (degree >= 1) A(i, 1) = tk;
        for (int k = 2; k <= degree; ++k) {
            const double next = 2.0 * t[static_cast<std::size_t>(i)] * tk - tkm1;
            tkm1 = tk;
            tk = next;
            A(i, k) = tk;
        }
        b(i) = y[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    std::vector<double> a(c.data(), c.data() + c.size());
    const double tb = side == Side::left ? -1.0 : 1.0;
    const double dtdx = 2.0 / width;
    std::vector<double> taylor(static_cast<std::size_t>(degree) + 1, 0.0);
    double factorial = 1.0, chain = 1.0;
    for (int k = 0; k <= degree && !a.empty(); ++k) {
        double value = 0.0, power = 1.0;
        for (double ak : a) {
            value += ak * power;
            power *= tb;
        }
        taylor[static_cast<std::size_t>(k)] = value * chain / factorial;
        const std::size_t n = a.size() - 1;
        std::vector<double> d(n, 0.0);
        for (std::size_t j = n; j-- > 0;) d[j] = (j + 2 < n ? d[j + 2] : 0.0) + 2.0 * static_cast<double>(j + 1) * a[j + 1];
        if (!d.empty()) d[0] *= 0.5;
        a = std::move(d);
        factorial *= static_cast<double>(k + 1);
        chain *= dtdx;
    }
    return Polynomial(std::move(taylor));
}

}  // namespace

CompatTraces compat_traces(std::span<const double> x, std::span<const double> u0, std::span<const double> v0) {
    if (x.size() != u0.size() || x.size() != v0.size()) throw ParamError("compat_traces: shape mismatch");
    constexpr int kDegree = 10;
    constexpr std::size_t kMinNodes = 3 * kDegree;
    if (x.size() < 2 * kMinNodes) throw ParamError("compat_traces: need at least 60 nodes");
    std::vector<double> xe, ue, ve;
    for (std::size_t i = 0; i < x.size(); i += 2) {
        xe.push_back(x[i]);
        ue.push_back(u0[i]);
        ve.push_back(v0[i]);
    }
    if (xe.back() != x.back()) {
        xe.push_back(x.back());
        ue.push_back(u0.back());
        ve.push_back(v0.back());
    }
    auto traces = [](std::span<const double> xs, std::span<const double> us, std::span<const double> vs, Side side,
                     double width, int degree) {
        const Polynomial u = local_taylor(xs, us, side, width, degree);
        return traces_at_origin((u - Polynomial::constant(u(0.0))).antiderivative(),
                                local_taylor(xs, vs, side, width, degree), u(0.0));
    };
    CompatTraces r;
    for (Side side : {Side::left, Side::right}) {
        const std::size_t n = x.size();
        const double reach = side == Side::left ? x[2 * kMinNodes - 1] - x.front() : x.back() - x[n - 2 * kMinNodes];
        const double width = std::max(0.125 * (x.back() - x.front()), reach);
        const auto fine = traces(x, u0, v0, side, width, kDegree);
        const auto lower = traces(x, u0, v0, side, width, kDegree - 2);
        const auto half = traces(xe, ue, ve, side, width, kDegree);
        auto& val = side == Side::left ? r.left : r.right;
        auto& unc = side == Side::left ? r.left_uncertainty : r.right_uncertainty;
        for (int i = 0; i < 3; ++i) {
            val[i] = fine[i];
            unc[i] = std::abs(fine[i] - lower[i]) + std::abs(fine[i] - half[i]);
        }
    }
    return r;
}

CompatTraces compat_traces(const Polynomial& phi0, const Polynomial& v0, double mass) {
    CompatTraces r;
    r.exact = true;
    r.left = traces_at_origin(phi0, v0, mass);
    r.right = traces_at_origin(phi0.shifted(1.0), v0.shifted(1.0), mass);
    return r;
}

CompatTraces compat_traces(const InitialData& data) {
    const Polynomial* pu = data.u0.poly();
    const Polynomial* pv = data.v0.poly();
    if (pu && pv) {
        const Polynomial phi0 = (*pu - Polynomial::constant(data.mass)).antiderivative();
        return compat_traces(phi0, *pv, data.mass);
    }
    std::vector<double> x;
    if (data.u0.tabulated()) {
        x.assign(data.u0.table_x().begin(), data.u0.table_x().end());
    } else if (data.v0.tabulated()) {
        x.assign(data.v0.table_x().begin(), data.v0.table_x().end());
    } else {
        const Grid1D g = Grid1D::uniform(2048);
        x.assign(g.nodes().begin(), g.nodes().end());
    }
    const auto u = data.u0.sample(x);
    const auto v = data.v0.sample(x);
    if (*std::min_element(u.begin(), u.end()) <= 0.0)
        throw ParamError("compat_traces: min u0 must be > 0 (degenerate data unsupported)");
    return compat_traces(x, u, v);
}

std::string CompatReport::summary() const {
    if (pass) return "compatible";
    std::ostringstream os;
    os << "incompatible initial data:";
    for (const auto& v : violations)
        os << ' ' << v.condition << '@' << to_string(v.side) << " (|value| " << std::abs(v.value) << " > "
           << v.threshold << ')';
    return os.str();
}

CompatReport check_compatibility(const InitialData& data, double v_star, std::optional<double> tol) {
    CompatReport rep;
    rep.tol = tol.value_or(data.analytic() ? 1e-8 : 1e-4);
    const double vb[2] = {data.v0(0.0) - v_star, data.v0(1.0) - v_star};
    for (int s = 0; s < 2; ++s) {
        if (std::abs(vb[s]) > rep.tol)
            rep.violations.push_back({"boundary_value", s == 0 ? Side::left : Side::right, vb[s], rep.tol});
    }
    rep.traces = compat_traces(data);
    for (int s = 0; s < 2; ++s) {
        const auto& val = s == 0 ? rep.traces.left : rep.traces.right;
        const auto& unc = s == 0 ? rep.traces.left_uncertainty : rep.traces.right_uncertainty;
        for (int i = 0; i < 3; ++i) {
            const double thr = rep.tol + unc[i];
            if (!(std::abs(val[i]) <= thr))
                rep.violations.push_back({"time_derivative_order_" + std::to_string(i + 1),
                                          s == 0 ? Side::left : Side::right, val[i], thr});
        }
    }
    rep.pass = rep.violations.empty();
    return rep;
}

}  // namespace chemlayer
