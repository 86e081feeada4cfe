#include "perfun/jet.hpp"

#include <algorithm>
#include <cmath>

#include "perfun/errors.hpp"

namespace perfun {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// Taylor coefficients f^(k)(u0)/k!, k = 0..order, of the elementary functions.
std::vector<double> expSeries(double u0, int order) {
    std::vector<double> f(static_cast<std::size_t>(order + 1));
    const double e = std::exp(u0);
    for (int k = 0; k <= order; ++k) f[k] = e / factorial(k);
    return f;
}

std::vector<double> sinCosSeries(double u0, int order, bool cosine) {
    const double s = std::sin(u0), c = std::cos(u0);
    const double cycleSin[4] = {s, c, -s, -c};
    const double cycleCos[4] = {c, -s, -c, s};
    std::vector<double> f(static_cast<std::size_t>(order + 1));
    for (int k = 0; k <= order; ++k)
        f[k] = (cosine ? cycleCos[k % 4] : cycleSin[k % 4]) / factorial(k);
    return f;
}

std::vector<double> logSeries(double u0, int order) {
    if (!(u0 > 0.0)) throw EvalError("ln of non-positive value");
    std::vector<double> f(static_cast<std::size_t>(order + 1));
    f[0] = std::log(u0);
    double p = 1.0;
    for (int k = 1; k <= order; ++k) {
        p /= u0;
        f[k] = ((k % 2 == 1) ? 1.0 : -1.0) * p / k;
    }
    return f;
}

std::vector<double> recipSeries(double u0, int order) {
    if (u0 == 0.0) throw EvalError("division by a jet with vanishing value");
    std::vector<double> f(static_cast<std::size_t>(order + 1));
    double p = 1.0 / u0;
    for (int k = 0; k <= order; ++k) {
        f[k] = p;
        p *= -1.0 / u0;
    }
    return f;
}

std::vector<double> sqrtSeries(double u0, int order) {
    if (u0 < 0.0) throw EvalError("sqrt of negative value");
    if (u0 == 0.0 && order > 0) throw EvalError("sqrt is not differentiable at 0");
    std::vector<double> f(static_cast<std::size_t>(order + 1));
    f[0] = std::sqrt(u0);
    double binom = 1.0;  // binom(1/2, k)
    for (int k = 1; k <= order; ++k) {
        binom *= (0.5 - (k - 1)) / k;
        f[k] = f[0] * binom / std::pow(u0, k);
    }
    return f;
}

// f(u) = sum_k f_k (u - u0)^k by Horner on the nilpotent part of u.
template <class J>
J compose(const J& u, const std::vector<double>& f) {
    J delta = u;
    delta -= u.value();
    J result = u.lift(f.back());
    for (int k = static_cast<int>(f.size()) - 2; k >= 0; --k) {
        result = result * delta;
        result += f[static_cast<std::size_t>(k)];
    }
    return result;
}

template <class J>
J signumJet(const J& u) {
    if (u.order() > 0 && u.value() == 0.0)
        throw EvalError("sign() has no derivative at 0");
    return u.lift(signum(u.value()));
}

template <class J>
J ipowJet(const J& u, int n) {
    if (n == 0) return u.lift(1.0);
    if (n < 0) return reciprocal(ipowJet(u, -n));
    J result = u.lift(1.0);
    J base = u;
    unsigned e = static_cast<unsigned>(n);
    while (true) {
        if (e & 1u) result = result * base;
        e >>= 1u;
        if (e == 0) break;
        base = base * base;
    }
    return result;
}

}  // namespace

// ---------------------------------------------------------------- Jet1

Jet1::Jet1(int order, double t0)
    : order_(order), t0_(t0), c_(static_cast<std::size_t>(order + 1), 0.0) {
    if (order < 0) throw PreconditionError("jet order must be >= 0");
}

Jet1 Jet1::constant(double value, int order, double t0) {
    Jet1 j(order, t0);
    j.c_[0] = value;
    return j;
}

Jet1 Jet1::variable(double t0, int order) {
    Jet1 j(order, t0);
    j.c_[0] = t0;
    if (order >= 1) j.c_[1] = 1.0;
    return j;
}

double Jet1::derivative(int k) const { return factorial(k) * c_[static_cast<std::size_t>(k)]; }

Jet1 Jet1::differentiated() const {
    if (order_ == 0) throw PreconditionError("cannot differentiate an order-0 jet");
    Jet1 d(order_ - 1, t0_);
    for (int k = 0; k < order_; ++k) d.c_[k] = (k + 1) * c_[k + 1];
    return d;
}

Jet1 Jet1::truncated(int order) const {
    if (order > order_) throw PreconditionError("cannot raise jet order by truncation");
    Jet1 t(order, t0_);
    std::copy_n(c_.begin(), order + 1, t.c_.begin());
    return t;
}

Jet1& Jet1::operator+=(const Jet1& o) {
    if (o.order_ < order_) *this = truncated(o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] += o.c_[k];
    return *this;
}

Jet1& Jet1::operator-=(const Jet1& o) {
    if (o.order_ < order_) *this = truncated(o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet1& Jet1::operator*=(double v) {
    for (auto& c : c_) c *= v;
    return *this;
}

Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
Jet1 operator*(const Jet1& a, const Jet1& b) {
    const int n = std::min(a.order(), b.order());
    Jet1 r(n, a.point());
    for (int i = 0; i <= n; ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        for (int j = 0; i + j <= n; ++j) r[i + j] += ai * b[j];
    }
    return r;
}
Jet1 operator/(const Jet1& a, const Jet1& b) {
    Jet1 q = a * reciprocal(b);
    q[0] = a.value() / b.value();
    return q;
}
Jet1 operator-(Jet1 a) { return a *= -1.0; }
Jet1 operator+(Jet1 a, double v) { return a += v; }
Jet1 operator+(double v, Jet1 a) { return a += v; }
Jet1 operator-(Jet1 a, double v) { return a -= v; }
Jet1 operator-(double v, const Jet1& a) { return (-a) + v; }
Jet1 operator*(Jet1 a, double v) { return a *= v; }
Jet1 operator*(double v, Jet1 a) { return a *= v; }
Jet1 operator/(Jet1 a, double v) {
    if (v == 0.0) throw EvalError("division by zero");
    return a *= 1.0 / v;
}
Jet1 operator/(double v, const Jet1& a) {
    Jet1 q = reciprocal(a) * v;
    q[0] = v / a.value();
    return q;
}

Jet1 sin(const Jet1& u) { return compose(u, sinCosSeries(u.value(), u.order(), false)); }
Jet1 cos(const Jet1& u) { return compose(u, sinCosSeries(u.value(), u.order(), true)); }
Jet1 exp(const Jet1& u) { return compose(u, expSeries(u.value(), u.order())); }
Jet1 log(const Jet1& u) { return compose(u, logSeries(u.value(), u.order())); }
Jet1 sqrt(const Jet1& u) { return compose(u, sqrtSeries(u.value(), u.order())); }
Jet1 signum(const Jet1& u) { return signumJet(u); }
Jet1 reciprocal(const Jet1& u) { return compose(u, recipSeries(u.value(), u.order())); }
Jet1 ipow(const Jet1& u, int n) { return ipowJet(u, n); }

// ---------------------------------------------------------------- Jet2

Jet2::Jet2(int order, Point p0) : order_(order), p0_(p0), c_(size(order), 0.0) {
    if (order < 0) throw PreconditionError("jet order must be >= 0");
}

Jet2 Jet2::constant(double value, int order, Point p0) {
    Jet2 j(order, p0);
    j.c_[0] = value;
    return j;
}

Jet2 Jet2::variable(int index, Point p0, int order) {
    Jet2 j(order, p0);
    j.c_[0] = index == 0 ? p0.x : p0.y;
    if (order >= 1) j.c_[index == 0 ? Jet2::index(1, 0) : Jet2::index(0, 1)] = 1.0;
    return j;
}

Jet2 Jet2::fromX(const Jet1& fx, Point p0) {
    Jet2 j(fx.order(), p0);
    for (int i = 0; i <= fx.order(); ++i) j.coeff(i, 0) = fx[i];
    return j;
}

Jet2 Jet2::fromY(const Jet1& fy, Point p0) {
    Jet2 j(fy.order(), p0);
    for (int k = 0; k <= fy.order(); ++k) j.coeff(0, k) = fy[k];
    return j;
}

double Jet2::partial(int i, int j) const { return factorial(i) * factorial(j) * coeff(i, j); }

Jet2 Jet2::dx() const {
    if (order_ == 0) throw PreconditionError("cannot differentiate an order-0 jet");
    Jet2 d(order_ - 1, p0_);
    for (int deg = 0; deg < order_; ++deg)
        for (int j = 0; j <= deg; ++j) {
            const int i = deg - j;
            d.coeff(i, j) = (i + 1) * coeff(i + 1, j);
        }
    return d;
}

Jet2 Jet2::dy() const {
    if (order_ == 0) throw PreconditionError("cannot differentiate an order-0 jet");
    Jet2 d(order_ - 1, p0_);
    for (int deg = 0; deg < order_; ++deg)
        for (int j = 0; j <= deg; ++j) {
            const int i = deg - j;
            d.coeff(i, j) = (j + 1) * coeff(i, j + 1);
        }
    return d;
}

Jet2 Jet2::truncated(int order) const {
    if (order > order_) throw PreconditionError("cannot raise jet order by truncation");
    Jet2 t(order, p0_);
    std::copy_n(c_.begin(), size(order), t.c_.begin());
    return t;
}

Jet2& Jet2::operator+=(const Jet2& o) {
    if (o.order_ < order_) *this = truncated(o.order_);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

Jet2& Jet2::operator-=(const Jet2& o) {
    if (o.order_ < order_) *this = truncated(o.order_);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet2& Jet2::operator*=(double v) {
    for (auto& c : c_) c *= v;
    return *this;
}

Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
Jet2 operator*(const Jet2& a, const Jet2& b) {
    const int n = std::min(a.order(), b.order());
    Jet2 r(n, a.point());
    for (int d1 = 0; d1 <= n; ++d1)
        for (int j1 = 0; j1 <= d1; ++j1) {
            const double av = a.coeff(d1 - j1, j1);
            if (av == 0.0) continue;
            for (int d2 = 0; d1 + d2 <= n; ++d2)
                for (int j2 = 0; j2 <= d2; ++j2)
                    r.coeff(d1 - j1 + d2 - j2, j1 + j2) += av * b.coeff(d2 - j2, j2);
        }
    return r;
}
Jet2 operator/(const Jet2& a, const Jet2& b) {
    Jet2 q = a * reciprocal(b);
    q.coeff(0, 0) = a.value() / b.value();
    return q;
}
Jet2 operator-(Jet2 a) { return a *= -1.0; }
Jet2 operator+(Jet2 a, double v) { return a += v; }
Jet2 operator+(double v, Jet2 a) { return a += v; }
Jet2 operator-(Jet2 a, double v) { return a -= v; }
Jet2 operator-(double v, const Jet2& a) { return (-a) + v; }
Jet2 operator*(Jet2 a, double v) { return a *= v; }
Jet2 operator*(double v, Jet2 a) { return a *= v; }
Jet2 operator/(Jet2 a, double v) {
    if (v == 0.0) throw EvalError("division by zero");
    return a *= 1.0 / v;
}
Jet2 operator/(double v, const Jet2& a) {
    Jet2 q = reciprocal(a) * v;
    q.coeff(0, 0) = v / a.value();
    return q;
}

Jet2 sin(const Jet2& u) { return compose(u, sinCosSeries(u.value(), u.order(), false)); }
Jet2 cos(const Jet2& u) { return compose(u, sinCosSeries(u.value(), u.order(), true)); }
Jet2 exp(const Jet2& u) { return compose(u, expSeries(u.value(), u.order())); }
Jet2 log(const Jet2& u) { return compose(u, logSeries(u.value(), u.order())); }
Jet2 sqrt(const Jet2& u) { return compose(u, sqrtSeries(u.value(), u.order())); }
Jet2 signum(const Jet2& u) { return signumJet(u); }
Jet2 reciprocal(const Jet2& u) { return compose(u, recipSeries(u.value(), u.order())); }
Jet2 ipow(const Jet2& u, int n) { return ipowJet(u, n); }

// ---------------------------------------------------------------- scalars

double signum(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double reciprocal(double v) {
    if (v == 0.0) throw EvalError("division by zero");
    return 1.0 / v;
}

double ipow(double v, int n) {
    if (n < 0) return reciprocal(ipow(v, -n));
    double result = 1.0;
    double base = v;
    unsigned e = static_cast<unsigned>(n);
    while (e != 0) {
        if (e & 1u) result *= base;
        e >>= 1u;
        base *= base;
    }
    return result;
}

double checkedLog(double v) {
    if (!(v > 0.0)) throw EvalError("ln of non-positive value");
    return std::log(v);
}

double checkedSqrt(double v) {
    if (v < 0.0) throw EvalError("sqrt of negative value");
    return std::sqrt(v);
}

Jet1 polyval(std::span<const double> poly, const Jet1& t) {
    Jet1 r = t.lift(poly.empty() ? 0.0 : poly.back());
    for (int k = static_cast<int>(poly.size()) - 2; k >= 0; --k) {
        r = r * t;
        r += poly[static_cast<std::size_t>(k)];
    }
    return r;
}

std::vector<double> seriesDivide(std::span<const double> num, std::span<const double> den,
                                 int order) {
    if (den.empty() || den[0] == 0.0) throw EvalError("series division by vanishing leading term");
    std::vector<double> q(static_cast<std::size_t>(order + 1), 0.0);
    for (int k = 0; k <= order; ++k) {
        double acc = k < static_cast<int>(num.size()) ? num[k] : 0.0;
        for (int j = 1; j <= k && j < static_cast<int>(den.size()); ++j) acc -= den[j] * q[k - j];
        q[k] = acc / den[0];
    }
    return q;
}

}  // namespace perfun
