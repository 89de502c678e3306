#pragma once

// Coefficients of the quadratic value functions V^D(F) = a + bF + cF^2 and
// V^U(G) = x + yG + zG^2. Only the slopes and curvatures enter the policies,
// so the constants a and x are never formed.

#include "capflow/errors.hpp"
#include "capflow/model_config.hpp"
#include "capflow/polynomial.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace capflow {

inline constexpr double kRootResidualTol = 1e-10;

/// Lender-side value-function coefficients at a given international rate.
struct LenderCoeffs {
    double c = 0;         // curvature, < 0
    double b = 0;         // slope
    double L = 0;         // (1+R_D)(1 - (-2 B_D c Z^2)/mu_denom)
    double mu_denom = 0;  // (gamma - 2 B_D c)(1+R*)^2 V(eps) - 2 B_D c Z^2
    double Z = 0;         // (1+R*) E(eps) - (1+R_D)
    double carry = 0;     // r_D K_D
};

/// Borrower-side value-function coefficients at a given international rate.
struct BorrowerCoeffs {
    double z = 0;             // curvature, < 0
    double y = 0;             // slope
    double J = 0;             // (1+R_U) E(eta) (1 - (-2 B_U z A^2)/lambda_denom)
    double lambda_denom = 0;  // (1+R*)^2 V(e'/e)(beta - 2 B_U z) - 2 B_U z A^2
    double A = 0;             // (1+r_U) - (1+R*) E(e'/e)
    double carry = 0;         // r_U K_U
};

inline double lender_spread(const ModelParams& p, const ShockMoments& s, double R_star) {
    return (1 + R_star) * s.eps_mean - (1 + p.R_D);
}

inline double borrower_spread(const ModelParams& p, const ShockMoments& s, double R_star) {
    return (1 + p.r_U) - (1 + R_star) * s.e_ratio_mean;
}

// ---------------------------------------------------------------------------
// Lender
// ---------------------------------------------------------------------------

/// Quadratic q0 + q1 c + q2 c^2 = 0 matching the F^2 coefficients of the
/// lender Bellman equation, with
///   A = gamma (1+R*)^2 V(eps),  E = 2 B_D (Z^2 + A/gamma),  T = B_D (1+R_D)^2:
///   c^2 (E^2 (1-T) + 2 Z^2 B_D T E) - 2c (A E (1-T) + Z^2 B_D T A) + A^2 (1-T) = 0.
/// It factors as (A - cE)[(1-T)(A - cE) - 2 B_D T Z^2 c]; the root A/E makes
/// mu_denom vanish, the other is the concave solution when T > 1.
struct LenderQuadratic {
    std::array<double, 3> coeffs{};  // q0, q1, q2
    double A = 0, E = 0, T = 0, Z = 0, P = 0;
};

inline LenderQuadratic lender_quadratic(const ModelParams& p, const ShockMoments& s,
                                        double R_star) {
    LenderQuadratic q;
    const double gross = 1 + R_star;
    q.Z = lender_spread(p, s, R_star);
    q.P = gross * gross * s.eps_var;
    q.A = p.gamma * q.P;
    q.E = 2 * p.B_D * (q.Z * q.Z + q.P);
    q.T = p.B_D * (1 + p.R_D) * (1 + p.R_D);
    const double z2bt = q.Z * q.Z * p.B_D * q.T;
    const double one_minus_t = 1 - q.T;
    q.coeffs[2] = q.E * q.E * one_minus_t + 2 * z2bt * q.E;
    q.coeffs[1] = -2 * (q.A * q.E * one_minus_t + z2bt * q.A);
    q.coeffs[0] = q.A * q.A * one_minus_t;
    return q;
}

/// Lowest international rate at which the lender value function can be concave:
/// 1+R* = (1+R_D)/(E(eps) - sqrt((T-1) V(eps))). Returns +inf when no rate works.
inline double lender_concavity_threshold(const ModelParams& p, const ShockMoments& s) {
    const double T = p.B_D * (1 + p.R_D) * (1 + p.R_D);
    if (T <= 1) return std::numeric_limits<double>::infinity();
    const double denom = s.eps_mean - std::sqrt((T - 1) * s.eps_var);
    if (denom <= 0) return std::numeric_limits<double>::infinity();
    return (1 + p.R_D) / denom - 1;
}

/// Unique negative root of the lender quadratic.
inline double solve_c(const ModelParams& p, const ShockMoments& s, double R_star) {
    const auto q = lender_quadratic(p, s, R_star);
    if (!(q.Z > 0))
        throw Error(Errc::NoNegativeRoot,
                    "lender spread Z = " + std::to_string(q.Z) + " is not positive at R* = " +
                        std::to_string(R_star));
    const auto roots = poly::quadratic_real_roots(q.coeffs);
    std::vector<double> negative;
    for (double r : roots)
        if (r < 0) negative.push_back(r);
    if (negative.size() != 1)
        throw Error(Errc::NoNegativeRoot,
                    "lender curvature equation has " + std::to_string(negative.size()) +
                        " negative real roots at R* = " + std::to_string(R_star) +
                        " (T = " + std::to_string(q.T) + ")");
    const double c = negative.front();
    if (poly::relative_residual(q.coeffs, c) >= kRootResidualTol)
        throw Error(Errc::CoefficientInvalid, "lender curvature root failed residual check");
    return c;
}

/// Lender coefficients for a given curvature c. Does not check the sign of c,
/// which lets tests inject boundary cases.
inline LenderCoeffs lender_coeffs_from_c(const ModelParams& p, const ShockMoments& s,
                                         double R_star, double c) {
    LenderCoeffs k;
    const double gross = 1 + R_star;
    const double P = gross * gross * s.eps_var;
    k.c = c;
    k.Z = lender_spread(p, s, R_star);
    k.carry = p.lender_carry();
    k.mu_denom = (p.gamma - 2 * p.B_D * c) * P - 2 * p.B_D * c * k.Z * k.Z;
    const double ratio = k.mu_denom != 0 ? (-2 * p.B_D * c * k.Z * k.Z) / k.mu_denom : 0.0;
    k.L = (1 + p.R_D) * (1 - ratio);
    k.b = (1 - 2 * p.B_D * c * k.carry) * k.L / (1 - p.B_D * k.L);
    return k;
}

inline LenderCoeffs solve_lender(const ModelParams& p, const ShockMoments& s, double R_star) {
    const double c = solve_c(p, s, R_star);
    auto k = lender_coeffs_from_c(p, s, R_star, c);
    if (!(p.B_D * k.L < 1) || !(k.mu_denom > 0))
        throw Error(Errc::CoefficientInvalid,
                    "lender coefficients invalid: B_D L = " + std::to_string(p.B_D * k.L) +
                        ", mu_denom = " + std::to_string(k.mu_denom));
    return k;
}

// ---------------------------------------------------------------------------
// Borrower
// ---------------------------------------------------------------------------

/// Cubic a0 + a1 z + a2 z^2 + a3 z^3 = 0 obtained by moving every term of the
/// G^2 coefficient identity to one side:
///   z ld^2 = ld^2 Qv (B_U z - beta/2) + 4 B_U^2 P A^2 Qe z^2 (B_U z - beta/2)
///            + B_U z Qe (ld^2 + 4 B_U^2 A^4 z^2 + 4 B_U ld A^2 z),
/// where ld = P beta - 2 B_U H z is lambda_denom as a function of z,
/// P = (1+R*)^2 V(e'/e), H = A^2 + P, Qv = (1+R_U)^2 V(eta), Qe = (1+R_U)^2 E(eta)^2.
struct BorrowerCubic {
    std::array<double, 4> coeffs{};  // a0..a3
    double A = 0, H = 0, P = 0, Qv = 0, Qe = 0;
};

inline BorrowerCubic borrower_cubic(const ModelParams& p, const ShockMoments& s, double R_star) {
    using poly::Poly;
    BorrowerCubic cub;
    const double gross = 1 + R_star;
    const double g2U = (1 + p.R_U) * (1 + p.R_U);
    const double B = p.B_U, beta = p.beta;
    cub.A = borrower_spread(p, s, R_star);
    cub.P = gross * gross * s.e_ratio_var;
    cub.H = cub.A * cub.A + cub.P;
    cub.Qv = g2U * s.eta_var;
    cub.Qe = g2U * s.eta_mean * s.eta_mean;
    const double A2 = cub.A * cub.A;

    const Poly z = Poly::x();
    const Poly ld{cub.P * beta, -2 * B * cub.H};
    const Poly ld2 = ld * ld;
    const Poly risk = Poly{-beta / 2, B};  // B_U z - beta/2

    const Poly lhs = z * ld2;
    const Poly rhs = ld2 * cub.Qv * risk
                   + (4 * B * B * cub.P * A2 * cub.Qe) * (z * z * risk)
                   + (B * cub.Qe) * z * (ld2 + (4 * B * B * A2 * A2) * (z * z) + (4 * B * A2) * (ld * z));
    const Poly cubic = lhs - rhs;
    for (std::size_t i = 0; i < 4; ++i) cub.coeffs[i] = cubic[i];
    return cub;
}

/// Unique negative real root of the borrower cubic; RootCountViolation otherwise.
inline double solve_z(const ModelParams& p, const ShockMoments& s, double R_star) {
    const auto cub = borrower_cubic(p, s, R_star);
    const auto roots = poly::cubic_real_roots(cub.coeffs);
    std::vector<double> negative;
    for (double r : roots)
        if (r < 0) negative.push_back(r);
    if (negative.size() != 1)
        throw Error(Errc::RootCountViolation,
                    "borrower curvature cubic has " + std::to_string(negative.size()) +
                        " negative real roots at R* = " + std::to_string(R_star));
    const double z = negative.front();
    if (poly::relative_residual(cub.coeffs, z) >= kRootResidualTol)
        throw Error(Errc::CoefficientInvalid, "borrower curvature root failed residual check");
    return z;
}

/// Borrower coefficients for a given curvature z (sign unchecked, test hook).
inline BorrowerCoeffs borrower_coeffs_from_z(const ModelParams& p, const ShockMoments& s,
                                             double R_star, double z) {
    BorrowerCoeffs k;
    const double gross = 1 + R_star;
    const double P = gross * gross * s.e_ratio_var;
    k.z = z;
    k.A = borrower_spread(p, s, R_star);
    k.carry = p.borrower_carry();
    k.lambda_denom = P * (p.beta - 2 * p.B_U * z) - 2 * p.B_U * z * k.A * k.A;
    const double ratio = k.lambda_denom != 0 ? (-2 * p.B_U * z * k.A * k.A) / k.lambda_denom : 0.0;
    k.J = (1 + p.R_U) * s.eta_mean * (1 - ratio);
    k.y = k.J * (1 - 2 * p.B_U * z * k.carry) / (1 - p.B_U * k.J);
    return k;
}

inline BorrowerCoeffs solve_borrower(const ModelParams& p, const ShockMoments& s, double R_star) {
    const double z = solve_z(p, s, R_star);
    auto k = borrower_coeffs_from_z(p, s, R_star, z);
    if (!(p.B_U * k.J < 1) || !(k.lambda_denom > 0))
        throw Error(Errc::CoefficientInvalid,
                    "borrower coefficients invalid: B_U J = " + std::to_string(p.B_U * k.J) +
                        ", lambda_denom = " + std::to_string(k.lambda_denom));
    return k;
}

} // namespace capflow
