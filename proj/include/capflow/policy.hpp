#pragma once

// Optimal portfolio fractions: mu* for the lender, lambda* for the borrower.

#include "capflow/errors.hpp"
#include "capflow/model_config.hpp"
#include "capflow/value_function.hpp"

#include <algorithm>

namespace capflow {

struct PolicyInputs {
    double F = 0;
    double G = 0;
    double R_star = 0;
    LenderCoeffs lender;
    BorrowerCoeffs borrower;
};

/// Solves both coefficient sets at R* and packages them with the fund levels.
inline PolicyInputs make_policy_inputs(const ModelParams& p, const ShockMoments& s, double R_star,
                                       double F, double G) {
    return {F, G, R_star, solve_lender(p, s, R_star), solve_borrower(p, s, R_star)};
}

/// mu* without the unit-interval check.
inline double mu_star_raw(const ModelParams& p, const PolicyInputs& in) {
    const auto& k = in.lender;
    if (k.Z == 0) return 0.0;
    const double num = k.Z * ((1 + p.B_D * k.b) + 2 * p.B_D * k.c * in.F * (1 + p.R_D) -
                              2 * p.B_D * k.c * k.carry);
    return num / (in.F * k.mu_denom);
}

/// lambda* without the unit-interval check.
inline double lambda_star_raw(const ModelParams& p, const ShockMoments& s, const PolicyInputs& in) {
    const auto& k = in.borrower;
    if (k.A == 0) return 0.0;
    const double num = k.A * ((1 + p.B_U * k.y) + 2 * p.B_U * k.z * (1 + p.R_U) * s.eta_mean * in.G -
                              2 * p.B_U * k.z * k.carry);
    return num / (p.K_U * k.lambda_denom);
}

inline double mu_star(const ModelParams& p, const PolicyInputs& in) {
    if (!(in.F > 0)) throw Error(Errc::InvalidParameter, "lender funds must be positive");
    const double mu = mu_star_raw(p, in);
    if (in.lender.Z == 0) return mu;
    if (!(mu > 0 && mu < 1)) throw OutOfUnitInterval(OutOfUnitInterval::Side::Lender, mu);
    return mu;
}

inline double lambda_star(const ModelParams& p, const ShockMoments& s, const PolicyInputs& in) {
    const double lam = lambda_star_raw(p, s, in);
    if (in.borrower.A == 0) return lam;
    if (!(lam > 0 && lam < 1)) throw OutOfUnitInterval(OutOfUnitInterval::Side::Borrower, lam);
    return lam;
}

// ---------------------------------------------------------------------------
// One-period objectives M = Omega + B E[V(next funds)], up to terms free of the
// control, and their derivatives written term by term.
// ---------------------------------------------------------------------------

inline double lender_objective(const ModelParams& p, const ShockMoments& s,
                               const PolicyInputs& in, double mu) {
    const auto& k = in.lender;
    const double gross = 1 + in.R_star;
    const double F = in.F;
    const double mean_next = F * ((1 - mu) * (1 + p.R_D) + mu * gross * s.eps_mean) - k.carry;
    const double var_next = mu * mu * gross * gross * F * F * s.eps_var;
    const double omega = mean_next - 0.5 * p.gamma * var_next;
    return omega + p.B_D * (k.b * mean_next + k.c * (mean_next * mean_next + var_next));
}

inline double lender_foc(const ModelParams& p, const ShockMoments& s, const PolicyInputs& in,
                         double mu) {
    const auto& k = in.lender;
    const double gross = 1 + in.R_star;
    const double F = in.F;
    const double d_mean = -F * (1 + p.R_D) + F * gross * s.eps_mean;
    const double mean_next = F * ((1 - mu) * (1 + p.R_D) + mu * gross * s.eps_mean) - k.carry;
    return d_mean - p.gamma * F * F * mu * gross * gross * s.eps_var + p.B_D * k.b * d_mean +
           p.B_D * k.c * (2 * mu * gross * gross * F * F * s.eps_var) +
           2 * p.B_D * k.c * mean_next * d_mean;
}

inline double borrower_objective(const ModelParams& p, const ShockMoments& s,
                                 const PolicyInputs& in, double lambda) {
    const auto& k = in.borrower;
    const double gross = 1 + in.R_star;
    const double G = in.G, K = p.K_U;
    const double funding = (1 - lambda) * (1 + p.r_U) + lambda * gross * s.e_ratio_mean;
    const double mean_profit = s.eta_mean * (1 + p.R_U) * G - K * funding;
    const double var_next = (1 + p.R_U) * (1 + p.R_U) * G * G * s.eta_var +
                            K * K * lambda * lambda * gross * gross * s.e_ratio_var;
    const double mean_next = mean_profit + K;
    const double omega = mean_profit - 0.5 * p.beta * var_next;
    return omega + p.B_U * (k.y * mean_next + k.z * (mean_next * mean_next + var_next));
}

inline double borrower_foc(const ModelParams& p, const ShockMoments& s, const PolicyInputs& in,
                           double lambda) {
    const auto& k = in.borrower;
    const double gross = 1 + in.R_star;
    const double G = in.G, K = p.K_U;
    const double d_mean = K * (1 + p.r_U) - K * gross * s.e_ratio_mean;
    const double funding = (1 - lambda) * (1 + p.r_U) + lambda * gross * s.e_ratio_mean;
    const double mean_next = s.eta_mean * (1 + p.R_U) * G - K * funding + K;
    const double d_var = 2 * K * K * lambda * gross * gross * s.e_ratio_var;
    return d_mean - 0.5 * p.beta * d_var + p.B_U * k.y * d_mean +
           p.B_U * k.z * (d_var + 2 * mean_next * d_mean);
}

/// Projection onto [0,1], the constrained maximiser of a concave objective.
inline double project_unit(double x) { return std::clamp(x, 0.0, 1.0); }

} // namespace capflow
