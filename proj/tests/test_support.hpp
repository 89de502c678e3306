#pragma once

// Independent oracles and random feasible draws shared by the unit and acceptance tests.

#include "capflow/capflow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testsupport {

using namespace capflow;

/// Plain bisection to the given bracket width. Requires f(a) f(b) < 0.
inline double bisect(const std::function<double(double)>& f, double a, double b, double width = 1e-14) {
    double fa = f(a);
    while (b - a > width) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double fm = f(m);
        if (fm == 0) return m;
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

/// Negative real roots of a polynomial found by scanning a dense logarithmic grid
/// on [-hi, -lo] for sign changes and bisecting each one.
template <std::size_t N>
std::vector<double> negative_roots_by_scan(const std::array<double, N>& c, double lo = 1e-8,
                                           double hi = 1e8, int points = 20000) {
    auto f = [&](double x) { return poly::evaluate(c, x); };
    std::vector<double> out;
    const double step = std::log(hi / lo) / points;
    double x_prev = -lo, f_prev = f(x_prev);
    for (int i = 1; i <= points; ++i) {
        const double x = -lo * std::exp(step * i);
        const double fx = f(x);
        if (fx == 0) {
            out.push_back(x);
        } else if ((fx < 0) != (f_prev < 0) && f_prev != 0) {
            out.push_back(bisect(f, x, x_prev, 1e-15 * std::fabs(x)));
        }
        x_prev = x;
        f_prev = fx;
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct Draw {
    ModelParams p;
    ShockMoments s;
    double R = 0;
};

/// Random parameters inside every feasibility window, with R* inside the
/// admissible solver bracket.
inline Draw random_feasible(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    auto in = [&](double a, double b) { return a + (b - a) * u(rng); };
    Draw d;
    d.p.gamma = in(2, 12);
    d.p.beta = in(0.5, 2);
    d.p.B_D = in(0.909, 0.93);
    d.s.eps_var = in(0.05, 0.12);
    d.s.eta_mean = in(0.7, 0.9);
    d.s.eta_var = in(0.05, 0.12);
    d.s.e_ratio_mean = in(0.9, 0.95);
    d.s.e_ratio_var = in(0.1, 0.3);
    const auto rep = validate(d.p, d.s);
    const auto* w = rep.find("borrower_discount_window");
    d.p.B_U = w->lo + in(0.1, 0.9) * (w->hi - w->lo);
    const auto br = solver_bracket(d.p, d.s);
    d.R = br.lo + in(0.05, 0.95) * (br.hi - br.lo);
    return d;
}

/// G^2 (or F^2) coefficient of a quadratic h, from exact second differences.
inline double quadratic_coefficient(const std::function<double(double)>& h, double x0 = 1, double dx = 1) {
    return (h(x0 + dx) - 2 * h(x0) + h(x0 - dx)) / (2 * dx * dx);
}

/// Lender Bellman right-hand side max_mu M^D as a function of F (interior optimum).
inline double lender_bellman_rhs(const ModelParams& p, const ShockMoments& s, double R,
                                 const LenderCoeffs& k, double F) {
    PolicyInputs in{F, 1, R, k, {}};
    return lender_objective(p, s, in, mu_star_raw(p, in));
}

inline double borrower_bellman_rhs(const ModelParams& p, const ShockMoments& s, double R,
                                   const BorrowerCoeffs& k, double G) {
    PolicyInputs in{1, G, R, {}, k};
    return borrower_objective(p, s, in, lambda_star_raw(p, s, in));
}

/// Argmax of f over an evenly spaced grid of n points on [0,1].
inline double grid_argmax(const std::function<double(double)>& f, int n = 100001) {
    double best_x = 0, best = f(0);
    for (int i = 1; i < n; ++i) {
        const double x = static_cast<double>(i) / (n - 1);
        const double v = f(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    return best_x;
}

/// Random state at which both policies are interior, with the fund levels used.
struct PolicyState {
    Draw d;
    PolicyInputs in;
    double mu = 0;
    double lambda = 0;
};

inline PolicyState random_interior_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    for (;;) {
        PolicyState st;
        st.d = random_feasible(rng);
        const double F = 8 + 20 * u(rng);
        const double G = -30 + 50 * u(rng);
        st.in = make_policy_inputs(st.d.p, st.d.s, st.d.R, F, G);
        st.mu = mu_star_raw(st.d.p, st.in);
        st.lambda = lambda_star_raw(st.d.p, st.d.s, st.in);
        if (st.mu > 0.001 && st.mu < 0.999 && st.lambda > 0.001 && st.lambda < 0.999) return st;
    }
}

} // namespace testsupport
