#pragma once

#include "capflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace capflow {

/// Structural constants of the two-country banking model. Defaults are the
/// baseline calibration.
struct ModelParams {
    double B_D = 0.91;   // lender discount factor
    double B_U = 0.8;    // borrower discount factor
    double gamma = 4.0;  // lender risk aversion
    double beta = 1.0;   // borrower risk aversion
    int m_D = 10;        // number of lender banks
    int m_U = 100;       // number of borrower banks
    double K_D = 10.0;   // per-bank deposits, constant over time
    double K_U = 20.0;
    double R_D = 0.05;   // lender-country loan rate
    double r_D = 0.04;   // lender-country deposit rate
    double R_U = 0.2;    // borrower-country loan rate
    double r_U = 0.15;   // borrower-country deposit rate
    double R0_star = 0.14;
    double e0 = 75.0;
    double F0 = 10.0;
    double G0 = 10.0;
    int horizon = 30;

    /// Net deposit carry r_tk = (1+r)K_t - K_{t+1}; with constant deposits it is r*K.
    double lender_carry() const { return r_D * K_D; }
    double borrower_carry() const { return r_U * K_U; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// First and second moments of the shocks plus the uniform supports of the
/// net-export coefficients. Defaults are the baseline.
struct ShockMoments {
    double eps_mean = 0.94;
    double eps_var = 0.09;
    double eta_mean = 0.85;
    double eta_var = 0.09;
    double e_ratio_mean = 0.92;
    double e_ratio_var = 0.25;
    double N0_lo = 1100.0;
    double N0_hi = 1200.0;
    double N1_lo = 15.0;
    double N1_hi = 18.0;

    friend bool operator==(const ShockMoments&, const ShockMoments&) = default;
};

/// Throws InvalidParameter on the first violated type invariant.
inline void check_invariants(const ModelParams& p, const ShockMoments& s) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(Errc::InvalidParameter, what);
    };
    require(p.B_D > 0 && p.B_D < 1, "B_D must lie in (0,1)");
    require(p.B_U > 0 && p.B_U < 1, "B_U must lie in (0,1)");
    require(p.gamma > 0, "gamma must be positive");
    require(p.beta > 0, "beta must be positive");
    require(p.m_D >= 1 && p.m_U >= 1, "bank counts must be >= 1");
    require(p.K_D > 0 && p.K_U > 0, "deposits must be positive");
    require(p.F0 > 0 && p.G0 > 0, "initial funds must be positive");
    require(p.R_D > -1 && p.r_D > -1 && p.R_U > -1 && p.r_U > -1 && p.R0_star > -1,
            "rates must exceed -1");
    require(p.e0 > 0, "e0 must be positive");
    require(p.horizon >= 0, "horizon must be non-negative");
    require(s.eps_mean > 0 && s.eps_mean <= 1, "eps_mean must lie in (0,1]");
    require(s.eta_mean > 0 && s.eta_mean <= 1, "eta_mean must lie in (0,1]");
    require(s.e_ratio_mean > 0, "e_ratio_mean must be positive");
    require(s.eps_var >= 0 && s.eta_var >= 0 && s.e_ratio_var >= 0,
            "variances must be non-negative");
    require(s.N0_lo <= s.N0_hi, "N0_lo must not exceed N0_hi");
    require(s.N1_lo > 0 && s.N1_lo <= s.N1_hi, "need 0 < N1_lo <= N1_hi");
}

struct RateBracket {
    double lo;
    double hi;

    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double r) const { return r > lo && r < hi; }
};

/// Interval of international rates at which lending beats domestic loans in
/// expectation and foreign borrowing beats domestic deposits.
inline RateBracket rate_bracket_unchecked(const ModelParams& p, const ShockMoments& s) {
    return {(1 + p.R_D) / s.eps_mean - 1, (1 + p.r_U) / s.e_ratio_mean - 1};
}

inline RateBracket rate_bracket(const ModelParams& p, const ShockMoments& s) {
    if (!(s.eps_mean > 0) || !(s.e_ratio_mean > 0))
        throw Error(Errc::InvalidParameter, "eps_mean and e_ratio_mean must be positive");
    auto b = rate_bracket_unchecked(p, s);
    if (!(b.lo < b.hi))
        throw Error(Errc::BracketEmpty, "no mutually profitable rate: lower bound " +
                                            std::to_string(b.lo) + " >= upper bound " +
                                            std::to_string(b.hi));
    return b;
}

/// Largest B_D(1+R_D)^2 for which the lender value function is concave at R*:
/// 1 + Z^2 / ((1+R*)^2 V(eps)).
inline double lender_concavity_limit(const ModelParams& p, const ShockMoments& s,
                                     double R_star) {
    const double gross = 1 + R_star;
    const double Z = gross * s.eps_mean - (1 + p.R_D);
    const double P = gross * gross * s.eps_var;
    if (P <= 0) return std::numeric_limits<double>::infinity();
    return 1 + Z * Z / P;
}

struct FeasibilityCheck {
    std::string name;
    bool passed = false;
    double value = 0;  // quantity tested
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    std::string note;
};

struct FeasibilityReport {
    RateBracket rate_bracket{};
    std::vector<FeasibilityCheck> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }
    const FeasibilityCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// Pre-flight feasibility conditions. Failures are reported, never thrown.
inline FeasibilityReport validate(const ModelParams& p, const ShockMoments& s) {
    FeasibilityReport rep;
    const auto br = rate_bracket_unchecked(p, s);
    rep.rate_bracket = br;
    const double inf = std::numeric_limits<double>::infinity();
    const double gross_D = 1 + p.R_D;

    {
        FeasibilityCheck c{"lender_discount_lower", false, p.B_D, 1 / (gross_D * gross_D), 1.0,
                           "1/(1+R_D)^2 < B_D < 1"};
        c.passed = c.lo < c.value && c.value < c.hi;
        rep.checks.push_back(c);
    }
    {
        // Concavity window upper bound; pass/fail at the midpoint, worst case reported.
        auto bound_at = [&](double r) { return lender_concavity_limit(p, s, r) / (gross_D * gross_D); };
        const double at_lo = bound_at(br.lo), at_mid = bound_at(br.mid()), at_hi = bound_at(br.hi);
        const double worst = std::min({at_lo, at_mid, at_hi});
        FeasibilityCheck c{"lender_discount_upper", false, p.B_D, -inf, at_mid, {}};
        c.passed = std::isfinite(br.mid()) && p.B_D < at_mid;
        c.note = "B_D < (1 + Z^2/((1+R*)^2 V(eps)))/(1+R_D)^2 at R* mid; bound at lo/mid/hi = " +
                 std::to_string(at_lo) + "/" + std::to_string(at_mid) + "/" + std::to_string(at_hi) +
                 ", worst " + std::to_string(worst) +
                 (p.B_D < worst ? " (holds across bracket)" : " (fails somewhere in bracket)");
        rep.checks.push_back(c);
    }
    {
        const double g2 = (1 + p.R_U) * (1 + p.R_U);
        const double qv = g2 * s.eta_var, qe = g2 * s.eta_mean * s.eta_mean;
        FeasibilityCheck c{"borrower_discount_window", false, p.B_U, 1 / (3 * qv + qe), 1 / (qv + qe),
                           "1/[3(1+R_U)^2 V(eta) + (1+R_U)^2 E(eta)^2] < B_U < 1/[(1+R_U)^2 (V(eta)+E(eta)^2)]"};
        c.passed = c.lo < c.value && c.value < c.hi;
        rep.checks.push_back(c);
    }
    {
        FeasibilityCheck c{"fx_real_root", false, s.N0_lo * s.N0_lo,
                           4 * s.N1_hi * p.m_U * p.K_U, inf, "N0_lo^2 > 4 N1_hi m_U K_U"};
        c.passed = c.value > c.lo;
        rep.checks.push_back(c);
    }
    {
        FeasibilityCheck c{"rate_bracket_nonempty", false, br.hi - br.lo, br.lo, br.hi,
                           "(1+R_D)/E(eps) < (1+R*) < (1+r_U)/E(e'/e)"};
        c.passed = br.lo < br.hi;
        rep.checks.push_back(c);
    }
    return rep;
}

} // namespace capflow
