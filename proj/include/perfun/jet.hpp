#pragma once

// Truncated Taylor expansions ("jets") in one and two variables.
//
// Coefficients are stored scaled: c_k = f^(k)(t0)/k! for Jet1 and
// c_ij = d^(i+j)f/dx^i dy^j / (i! j!) for Jet2, so multiplication is a plain
// Cauchy product. Binary operations between jets of different order truncate
// to the smaller order.

#include <span>
#include <vector>

#include "perfun/vec2.hpp"

namespace perfun {

constexpr int kDefaultMaxJetOrder = 8;

class Jet1 {
public:
    Jet1() : Jet1(0, 0.0) {}
    Jet1(int order, double t0);

    static Jet1 constant(double value, int order, double t0 = 0.0);
    static Jet1 variable(double t0, int order);

    int order() const { return order_; }
    double point() const { return t0_; }
    double value() const { return c_[0]; }
    std::span<const double> coeffs() const { return c_; }

    double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

    // k-th derivative at the expansion point (k! c_k).
    double derivative(int k) const;
    // Jet of f' with order reduced by one.
    Jet1 differentiated() const;
    Jet1 truncated(int order) const;
    // Same order and point, given constant.
    Jet1 lift(double value) const { return constant(value, order_, t0_); }

    Jet1& operator+=(const Jet1& o);
    Jet1& operator-=(const Jet1& o);
    Jet1& operator+=(double v) { c_[0] += v; return *this; }
    Jet1& operator-=(double v) { c_[0] -= v; return *this; }
    Jet1& operator*=(double v);

private:
    int order_;
    double t0_;
    std::vector<double> c_;
};

class Jet2 {
public:
    Jet2() : Jet2(0, {}) {}
    Jet2(int order, Point p0);

    static Jet2 constant(double value, int order, Point p0 = {});
    // index 0 -> x, index 1 -> y
    static Jet2 variable(int index, Point p0, int order);
    // f(x) or f(y) lifted into two variables.
    static Jet2 fromX(const Jet1& fx, Point p0);
    static Jet2 fromY(const Jet1& fy, Point p0);

    static constexpr std::size_t size(int order) {
        return static_cast<std::size_t>((order + 1) * (order + 2) / 2);
    }
    static constexpr std::size_t index(int i, int j) {
        const int d = i + j;
        return static_cast<std::size_t>(d * (d + 1) / 2 + j);
    }

    int order() const { return order_; }
    Point point() const { return p0_; }
    double value() const { return c_[0]; }
    std::span<const double> coeffs() const { return c_; }

    // scaled coefficient c_ij
    double coeff(int i, int j) const { return c_[index(i, j)]; }
    double& coeff(int i, int j) { return c_[index(i, j)]; }
    // unscaled partial derivative d^(i+j) f / dx^i dy^j
    double partial(int i, int j) const;

    Jet2 dx() const;
    Jet2 dy() const;
    Jet2 truncated(int order) const;
    Jet2 lift(double value) const { return constant(value, order_, p0_); }

    Jet2& operator+=(const Jet2& o);
    Jet2& operator-=(const Jet2& o);
    Jet2& operator+=(double v) { c_[0] += v; return *this; }
    Jet2& operator-=(double v) { c_[0] -= v; return *this; }
    Jet2& operator*=(double v);

private:
    int order_;
    Point p0_;
    std::vector<double> c_;
};

Jet1 operator+(Jet1 a, const Jet1& b);
Jet1 operator-(Jet1 a, const Jet1& b);
Jet1 operator*(const Jet1& a, const Jet1& b);
Jet1 operator/(const Jet1& a, const Jet1& b);
Jet1 operator-(Jet1 a);
Jet1 operator+(Jet1 a, double v);
Jet1 operator+(double v, Jet1 a);
Jet1 operator-(Jet1 a, double v);
Jet1 operator-(double v, const Jet1& a);
Jet1 operator*(Jet1 a, double v);
Jet1 operator*(double v, Jet1 a);
Jet1 operator/(Jet1 a, double v);
Jet1 operator/(double v, const Jet1& a);

Jet2 operator+(Jet2 a, const Jet2& b);
Jet2 operator-(Jet2 a, const Jet2& b);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
Jet2 operator-(Jet2 a);
Jet2 operator+(Jet2 a, double v);
Jet2 operator+(double v, Jet2 a);
Jet2 operator-(Jet2 a, double v);
Jet2 operator-(double v, const Jet2& a);
Jet2 operator*(Jet2 a, double v);
Jet2 operator*(double v, Jet2 a);
Jet2 operator/(Jet2 a, double v);
Jet2 operator/(double v, const Jet2& a);

// Elementary functions. Domain violations throw EvalError.
Jet1 sin(const Jet1& u);
Jet1 cos(const Jet1& u);
Jet1 exp(const Jet1& u);
Jet1 log(const Jet1& u);
Jet1 sqrt(const Jet1& u);
Jet1 signum(const Jet1& u);
Jet1 reciprocal(const Jet1& u);
Jet1 ipow(const Jet1& u, int n);

Jet2 sin(const Jet2& u);
Jet2 cos(const Jet2& u);
Jet2 exp(const Jet2& u);
Jet2 log(const Jet2& u);
Jet2 sqrt(const Jet2& u);
Jet2 signum(const Jet2& u);
Jet2 reciprocal(const Jet2& u);
Jet2 ipow(const Jet2& u, int n);

// Pointwise counterparts with the same domain checks.
double signum(double v);
double reciprocal(double v);
double ipow(double v, int n);
double checkedLog(double v);
double checkedSqrt(double v);

// Evaluates the polynomial sum_k poly[k] t^k at the jet t.
Jet1 polyval(std::span<const double> poly, const Jet1& t);

// Power-series quotient num/den (both expanded at the same point), to the given order.
// den[0] must be nonzero.
std::vector<double> seriesDivide(std::span<const double> num, std::span<const double> den,
                                 int order);

}  // namespace perfun
