#pragma once

// Per-period market clearing: the exchange rate from the FX quadratic, R* from
// loan-market clearing, and the lambda -> e -> R* -> lambda fixed point.

#include "capflow/errors.hpp"
#include "capflow/model_config.hpp"
#include "capflow/policy.hpp"
#include "capflow/polynomial.hpp"
#include "capflow/stochastics.hpp"
#include "capflow/value_function.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace capflow {

/// Repayment owed abroad this period for last period's borrowing, in foreign currency.
inline double repayment_burden(const ModelParams& p, double R_prev, double lambda_prev,
                               double e_prev) {
    return p.m_U * (1 + R_prev) * lambda_prev * p.K_U / e_prev;
}

struct PeriodState {
    double F = 0;
    double G = 0;
    double e_prev = 0;
    double R_prev = 0;
    double lambda_prev = 0;
    double mu_prev = 0;
    double C_prev = 0;

    static PeriodState make(const ModelParams& p, double F, double G, double e_prev, double R_prev,
                            double lambda_prev, double mu_prev) {
        return {F, G, e_prev, R_prev, lambda_prev, mu_prev,
                repayment_burden(p, R_prev, lambda_prev, e_prev)};
    }
};

struct EquilibriumResult {
    double R_star = 0;
    double e = 0;
    double mu = 0;
    double lambda = 0;
    double inflow = 0;
    double residual_L1 = 0;
    double residual_L2 = 0;
    int iterations = 0;
};

struct IterationRecord {
    int iteration = 0;
    double lambda = 0;
    double e = 0;
    double R_star = 0;
    double L1 = 0;
    double L2 = 0;
};

class MaxIterationsExceeded : public Error {
public:
    explicit MaxIterationsExceeded(std::vector<IterationRecord> trace)
        : Error(Errc::MaxIterationsExceeded,
                "fixed point did not converge in " + std::to_string(trace.size()) + " iterations"),
          trace_(std::move(trace)) {}

    const std::vector<IterationRecord>& trace() const noexcept { return trace_; }

private:
    std::vector<IterationRecord> trace_;
};

inline double net_exports(double N0, double N1, double e) { return -N0 + N1 * e; }

/// Larger root of N1 e^2 - (N0 + C_prev) e + m_U lambda K_U = 0.
inline double solve_exchange_rate(double lambda, double N0, double N1, double C_prev,
                                  const ModelParams& p) {
    const std::array<double, 3> q{p.m_U * lambda * p.K_U, -(N0 + C_prev), N1};
    const auto roots = poly::quadratic_real_roots(q);
    if (roots.empty())
        throw Error(Errc::ComplexRoots, "exchange-rate quadratic has negative discriminant");
    const double e = roots.back();
    if (!(e > 0)) throw Error(Errc::ComplexRoots, "exchange-rate quadratic has no positive root");
    return e;
}

/// FX-market residual: net exports plus new borrowing minus repayment.
inline double fx_residual(double N0, double N1, double e, double lambda, double C_prev,
                          const ModelParams& p) {
    return net_exports(N0, N1, e) + p.m_U * lambda * p.K_U / e - C_prev;
}

/// Policies evaluated at a trial R* without the unit-interval check.
struct RawPolicies {
    double mu = 0;
    double lambda = 0;
};

inline RawPolicies raw_policies(const ModelParams& p, const ShockMoments& s, double R_star,
                                double F, double G) {
    const auto in = make_policy_inputs(p, s, R_star, F, G);
    return {mu_star_raw(p, in), lambda_star_raw(p, s, in)};
}

/// Loan-market excess supply m_D mu F - m_U lambda K_U / e at a trial R*.
inline double loan_excess_supply(const ModelParams& p, const ShockMoments& s, double R_star,
                                 double F, double G, double e) {
    const auto pol = raw_policies(p, s, R_star, F, G);
    return p.m_D * pol.mu * F - p.m_U * pol.lambda * p.K_U / e;
}

/// Admissible search interval for R*: the profitable bracket, cut below where the
/// lender value function stops being concave, shrunk by 1e-9 at both ends.
inline RateBracket solver_bracket(const ModelParams& p, const ShockMoments& s) {
    const auto br = rate_bracket(p, s);
    const double lo = std::max(br.lo, lender_concavity_threshold(p, s)) + 1e-9;
    const double hi = br.hi - 1e-9;
    if (!(lo < hi))
        throw Error(Errc::BracketEmpty, "no rate in the bracket keeps the lender value function concave");
    return {lo, hi};
}

/// Root of the loan-market clearing condition in R* for fixed e.
inline double solve_interest_rate(const PeriodState& st, double e, const ModelParams& p,
                                  const ShockMoments& s) {
    const auto br = solver_bracket(p, s);
    auto f = [&](double r) { return loan_excess_supply(p, s, r, st.F, st.G, e); };
    const double f_lo = f(br.lo), f_hi = f(br.hi);
    if (!(f_lo < 0 && f_hi > 0)) throw NoSignChange(br.lo, br.hi, f_lo, f_hi);
    std::uintmax_t max_iter = 200;
    boost::math::tools::eps_tolerance<double> tol(50);
    const auto [a, b] = boost::math::tools::toms748_solve(f, br.lo, br.hi, f_lo, f_hi, tol, max_iter);
    return 0.5 * (a + b);
}

struct SolveOptions {
    double initial_lambda = -1;  // negative: start from the previous period's lambda
    double tol = 1e-9;
    int max_iter = 500;
    bool record_trace = false;
};

struct PeriodSolution {
    EquilibriumResult result;
    std::vector<IterationRecord> trace;
};

/// Fixed-point iteration lambda -> e -> R* -> lambda for one period.
inline PeriodSolution solve_period_traced(const PeriodState& st, const ShockDraw& draw,
                                          const ModelParams& p, const ShockMoments& s,
                                          const SolveOptions& opt = {}) {
    if (!(st.e_prev > 0) || !(st.C_prev >= 0))
        throw Error(Errc::InvalidParameter, "period state needs e_prev > 0 and C_prev >= 0");
    PeriodSolution out;
    std::vector<IterationRecord> trace;
    double lambda = project_unit(opt.initial_lambda >= 0 ? opt.initial_lambda : st.lambda_prev);
    double e_old = 0, R_old = 0, dl_old = 0;
    int alternations = 0;
    bool damped = false;

    for (int it = 1; it <= opt.max_iter; ++it) {
        const double e = solve_exchange_rate(lambda, draw.N0, draw.N1, st.C_prev, p);
        const double R = solve_interest_rate(st, e, p, s);
        const auto pol = raw_policies(p, s, R, st.F, st.G);
        const double lambda_new = project_unit(pol.lambda);
        double dl = lambda_new - lambda;
        if (dl != 0 && dl_old != 0 && (dl > 0) != (dl_old > 0)) ++alternations;
        if (alternations >= 2) damped = true;
        if (dl != 0) dl_old = dl;
        const double next = damped ? lambda + 0.5 * dl : lambda_new;

        trace.push_back({it, lambda, e, R,
                         p.m_D * pol.mu * st.F - p.m_U * pol.lambda * p.K_U / e,
                         fx_residual(draw.N0, draw.N1, e, lambda, st.C_prev, p)});

        const double change = std::max({std::fabs(next - lambda), it > 1 ? std::fabs(R - R_old) : 1.0,
                                        it > 1 ? std::fabs(e - e_old) / e : 1.0});
        lambda = next;
        e_old = e;
        R_old = R;
        if (change < opt.tol) {
            const auto in = make_policy_inputs(p, s, R, st.F, st.G);
            auto& r = out.result;
            r.R_star = R;
            r.e = e;
            r.mu = mu_star(p, in);
            r.lambda = lambda_star(p, s, in);
            r.inflow = p.m_D * r.mu * st.F;
            r.residual_L1 = r.inflow - p.m_U * r.lambda * p.K_U / e;
            r.residual_L2 = fx_residual(draw.N0, draw.N1, e, r.lambda, st.C_prev, p);
            r.iterations = it;
            if (opt.record_trace) out.trace = std::move(trace);
            return out;
        }
    }
    throw MaxIterationsExceeded(std::move(trace));
}

inline EquilibriumResult solve_period(const PeriodState& st, const ShockDraw& draw,
                                      const ModelParams& p, const ShockMoments& s,
                                      const SolveOptions& opt = {}) {
    return solve_period_traced(st, draw, p, s, opt).result;
}

/// Clearing tolerance, relative to borrower-side scale m_U K_U.
inline double clearing_tolerance(const ModelParams& p) { return 1e-8 * p.m_U * p.K_U; }

} // namespace capflow
