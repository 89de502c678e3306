#pragma once

// Low-degree real polynomials: coefficient arithmetic for assembling the
// value-function equations and real-root solvers for degrees 2 and 3.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

namespace capflow::poly {

/// Dense polynomial, coeffs[i] multiplies x^i.
struct Poly {
    std::vector<double> coeffs;

    Poly() = default;
    Poly(std::initializer_list<double> c) : coeffs(c) {}
    explicit Poly(std::vector<double> c) : coeffs(std::move(c)) {}

    static Poly constant(double v) { return Poly{v}; }
    static Poly x() { return Poly{0.0, 1.0}; }

    std::size_t size() const { return coeffs.size(); }
    double operator[](std::size_t i) const { return i < coeffs.size() ? coeffs[i] : 0.0; }

    double operator()(double x) const {
        double acc = 0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r;
        r.coeffs.assign(std::max(a.size(), b.size()), 0.0);
        for (std::size_t i = 0; i < r.size(); ++i) r.coeffs[i] = a[i] + b[i];
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + b * -1.0; }
    friend Poly operator*(const Poly& a, double k) {
        Poly r = a;
        for (auto& c : r.coeffs) c *= k;
        return r;
    }
    friend Poly operator*(double k, const Poly& a) { return a * k; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.coeffs.empty() || b.coeffs.empty()) return Poly{};
        Poly r;
        r.coeffs.assign(a.size() + b.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
        return r;
    }
};

/// Evaluate sum coeffs[i] x^i (Horner).
template <std::size_t N>
double evaluate(const std::array<double, N>& c, double x) {
    double acc = 0;
    for (std::size_t i = N; i-- > 0;) acc = acc * x + c[i];
    return acc;
}

template <std::size_t N>
double derivative(const std::array<double, N>& c, double x) {
    double acc = 0;
    for (std::size_t i = N; i-- > 1;) acc = acc * x + static_cast<double>(i) * c[i];
    return acc;
}

/// |p(x)| relative to the magnitude of its terms, sum |c_i| |x|^i.
template <std::size_t N>
double relative_residual(const std::array<double, N>& c, double x) {
    double scale = 0, ax = std::fabs(x), pw = 1;
    for (std::size_t i = 0; i < N; ++i) {
        scale += std::fabs(c[i]) * pw;
        pw *= ax;
    }
    const double r = std::fabs(evaluate(c, x));
    return scale > 0 ? r / scale : r;
}

/// Real roots of c0 + c1 x + c2 x^2, ascending. A double root is reported twice.
/// Uses the cancellation-free form q = -(c1 + sign(c1) sqrt(disc))/2.
inline std::vector<double> quadratic_real_roots(const std::array<double, 3>& c) {
    const double a = c[2], b = c[1], k = c[0];
    std::vector<double> out;
    if (a == 0) {
        if (b != 0) out.push_back(-k / b);
        return out;
    }
    double disc = b * b - 4 * a * k;
    // Rounding can push a mathematically zero discriminant slightly negative.
    const double tol = 8 * std::numeric_limits<double>::epsilon() * (b * b + std::fabs(4 * a * k));
    if (disc < 0) {
        if (disc < -tol) return out;
        disc = 0;
    }
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b));
    if (q == 0) {
        out = {0.0, 0.0};
        return out;
    }
    out = {q / a, k / q};
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {
template <std::size_t N>
double newton_polish(const std::array<double, N>& c, double x) {
    double best = x, best_res = std::fabs(evaluate(c, x));
    for (int it = 0; it < 8 && best_res > 0; ++it) {
        const double d = derivative(c, x);
        if (d == 0) break;
        const double nx = x - evaluate(c, x) / d;
        const double r = std::fabs(evaluate(c, nx));
        if (!(r < best_res)) break;
        best = x = nx;
        best_res = r;
    }
    return best;
}
} // namespace detail

/// Real roots of c0 + c1 x + c2 x^2 + c3 x^3, ascending, each Newton-polished.
/// Falls back to the quadratic when c3 == 0.
inline std::vector<double> cubic_real_roots(const std::array<double, 4>& c) {
    if (c[3] == 0) return quadratic_real_roots({c[0], c[1], c[2]});
    const double b = c[2] / c[3], cc = c[1] / c[3], d = c[0] / c[3];
    const double Q = (b * b - 3 * cc) / 9;
    const double R = (2 * b * b * b - 9 * b * cc + 27 * d) / 54;
    const double Q3 = Q * Q * Q;
    std::vector<double> out;
    if (R * R < Q3) {
        const double theta = std::acos(std::clamp(R / std::sqrt(Q3), -1.0, 1.0));
        const double m = -2 * std::sqrt(Q);
        for (int k = 0; k < 3; ++k)
            out.push_back(m * std::cos((theta + 2 * std::numbers::pi * k) / 3) - b / 3);
    } else {
        const double A = -std::copysign(std::cbrt(std::fabs(R) + std::sqrt(R * R - Q3)), R);
        const double B = A == 0 ? 0 : Q / A;
        out.push_back(A + B - b / 3);
    }
    for (auto& x : out) x = detail::newton_polish(c, x);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace capflow::poly
