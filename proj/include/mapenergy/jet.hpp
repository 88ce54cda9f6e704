#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace mapenergy {

/// Forward-mode value carrying the function value, gradient and Hessian with
/// respect to a fixed set of n seed variables (second-order dual number).
class Jet2 {
public:
    double v = 0.0;
    Eigen::VectorXd g;  // size n
    Eigen::MatrixXd h;  // n x n, symmetric

    Jet2() = default;
    Jet2(int n, double value)
        : v(value), g(Eigen::VectorXd::Zero(n)), h(Eigen::MatrixXd::Zero(n, n)) {}

    static Jet2 variable(int n, int index, double value) {
        Jet2 j(n, value);
        j.g(index) = 1.0;
        return j;
    }
    static Jet2 constant(int n, double value) { return Jet2(n, value); }

    int vars() const { return static_cast<int>(g.size()); }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r = a;
    r.v += b.v;
    r.g += b.g;
    r.h += b.h;
    return r;
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r = a;
    r.v -= b.v;
    r.g -= b.g;
    r.h -= b.h;
    return r;
}
inline Jet2 operator-(const Jet2& a) {
    Jet2 r = a;
    r.v = -r.v;
    r.g = -r.g;
    r.h = -r.h;
    return r;
}
inline Jet2 operator+(const Jet2& a, double c) { Jet2 r = a; r.v += c; return r; }
inline Jet2 operator+(double c, const Jet2& a) { return a + c; }
inline Jet2 operator-(const Jet2& a, double c) { Jet2 r = a; r.v -= c; return r; }
inline Jet2 operator-(double c, const Jet2& a) { return -(a - c); }
inline Jet2 operator*(const Jet2& a, double c) {
    Jet2 r = a;
    r.v *= c;
    r.g *= c;
    r.h *= c;
    return r;
}
inline Jet2 operator*(double c, const Jet2& a) { return a * c; }
inline Jet2 operator/(const Jet2& a, double c) { return a * (1.0 / c); }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r(a.vars(), a.v * b.v);
    r.g = a.v * b.g + b.v * a.g;
    r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
    return r;
}

/// Composition with a scalar function given its value and first two
/// derivatives at a.v.
inline Jet2 jet_chain(const Jet2& a, double f, double df, double ddf) {
    Jet2 r(a.vars(), f);
    r.g = df * a.g;
    r.h = df * a.h + ddf * (a.g * a.g.transpose());
    return r;
}

inline Jet2 inverse(const Jet2& a) {
    const double iv = 1.0 / a.v;
    return jet_chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inverse(b); }
inline Jet2 operator/(double c, const Jet2& b) { return inverse(b) * c; }

inline Jet2 sin(const Jet2& a) { return jet_chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet2 cos(const Jet2& a) { return jet_chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.v);
    return jet_chain(a, e, e, e);
}
inline Jet2 log(const Jet2& a) { return jet_chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet2 sqrt(const Jet2& a) {
    const double s = std::sqrt(a.v);
    return jet_chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet2 tanh(const Jet2& a) {
    const double t = std::tanh(a.v);
    return jet_chain(a, t, 1.0 - t * t, -2.0 * t * (1.0 - t * t));
}
inline Jet2 pow(const Jet2& a, double p) {
    const double f = std::pow(a.v, p);
    return jet_chain(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}

/// Seeds the n chart coordinates of p as independent variables.
inline std::vector<Jet2> seed_point(const Eigen::VectorXd& p) {
    const int n = static_cast<int>(p.size());
    std::vector<Jet2> x;
    x.reserve(n);
    for (int i = 0; i < n; ++i) x.push_back(Jet2::variable(n, i, p(i)));
    return x;
}

} // namespace mapenergy
